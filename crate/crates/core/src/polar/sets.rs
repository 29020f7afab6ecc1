use log::warn;
use serde::{Deserialize, Serialize};

use super::law::SideLaw;
use super::params::PolarParams;
use super::profile::{entropy_profile, EntropyProfile, ProfileMethod};
use crate::error::{Error, Result};
use crate::seed;
use crate::source::{JointModel, ParticipantSet, Var};

/// Profiles needed to build index sets: no side information, side `X`, and
/// side `Y_A` for each decoder set `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub none: EntropyProfile,
    pub given_x: EntropyProfile,
    pub given_decoders: Vec<(ParticipantSet, EntropyProfile)>,
}

/// Polarized index sets, all 0-based and ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSets {
    pub params: PolarParams,
    /// very high entropy: `H(V^i|V^{<i}) >= 1 - delta_N`
    pub v_u: Vec<usize>,
    /// high entropy: `H(V^i|V^{<i}) >= delta_N`
    pub h_u: Vec<usize>,
    /// very high entropy given `X`
    pub v_u_given_x: Vec<usize>,
    /// high entropy given each decoder's observations
    pub h_u_given_y: Vec<(ParticipantSet, Vec<usize>)>,
    /// indices dropped from `v_u_given_x` to restore the inclusions
    pub repaired: Vec<usize>,
}

pub fn threshold(profile: &EntropyProfile, floor: f64) -> Vec<usize> {
    profile.values.iter().enumerate().filter(|(_, &h)| h >= floor).map(|(i, _)| i).collect()
}

pub fn complement(set: &[usize], len: usize) -> Vec<usize> {
    let mut mask = vec![true; len];
    for &i in set {
        mask[i] = false;
    }
    (0..len).filter(|&i| mask[i]).collect()
}

/// `a \ b` for ascending index lists.
pub fn difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|i| b.binary_search(i).is_err()).collect()
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|i| b.binary_search(i).is_ok())
}

impl IndexSets {
    pub fn len(&self) -> usize {
        self.params.len
    }

    pub fn is_empty(&self) -> bool {
        self.params.len == 0
    }

    pub fn decoder(&self, set: ParticipantSet) -> Option<&[usize]> {
        self.h_u_given_y.iter().find(|(s, _)| *s == set).map(|(_, h)| h.as_slice())
    }

    /// `V_U \ V_{U|X}`
    pub fn v_u_minus_x(&self) -> Vec<usize> {
        difference(&self.v_u, &self.v_u_given_x)
    }

    /// `V_U^c`
    pub fn v_u_complement(&self) -> Vec<usize> {
        complement(&self.v_u, self.len())
    }

    /// `H_U^c`, the indices that are almost deterministic given the past.
    pub fn h_u_complement(&self) -> Vec<usize> {
        complement(&self.h_u, self.len())
    }

    /// Message positions `H_{U|Y_A} \ V_{U|X}` of one decoder.
    pub fn message_positions(&self, set: ParticipantSet) -> Result<Vec<usize>> {
        let h = self.decoder(set).ok_or_else(|| Error::InclusionViolation(set.to_string()))?;
        if !is_subset(&self.v_u_given_x, h) {
            return Err(Error::InclusionViolation(set.to_string()));
        }
        Ok(difference(h, &self.v_u_given_x))
    }
}

/// Thresholds the profiles and restores `V_{U|X} ⊆ V_U` and
/// `V_{U|X} ⊆ H_{U|Y_A}` by shrinking `V_{U|X}`.
pub fn build_index_sets(profiles: &ProfileSet, params: PolarParams) -> Result<IndexSets> {
    let len = params.len;
    let all = std::iter::once(&profiles.none)
        .chain(std::iter::once(&profiles.given_x))
        .chain(profiles.given_decoders.iter().map(|(_, p)| p));
    for p in all {
        if p.len() != len {
            return Err(Error::LengthMismatch(format!("profile of length {} for N = {len}", p.len())));
        }
    }
    let hi = 1.0 - params.delta_n;
    let lo = params.delta_n;
    let v_u = threshold(&profiles.none, hi);
    let h_u = threshold(&profiles.none, lo);
    let raw = threshold(&profiles.given_x, hi);
    let h_u_given_y: Vec<(ParticipantSet, Vec<usize>)> = profiles
        .given_decoders
        .iter()
        .map(|(s, p)| (*s, threshold(p, lo)))
        .collect();
    let mut v_u_given_x = Vec::with_capacity(raw.len());
    let mut repaired = Vec::new();
    for &i in &raw {
        let ok = v_u.binary_search(&i).is_ok()
            && h_u_given_y.iter().all(|(_, h)| h.binary_search(&i).is_ok());
        if ok {
            v_u_given_x.push(i);
        } else {
            repaired.push(i);
        }
    }
    if !repaired.is_empty() {
        warn!("dropped {} indices from V(U|X) to restore set inclusions: {:?}", repaired.len(), repaired);
        if v_u_given_x.is_empty() {
            return Err(Error::InclusionUnrepairable(format!(
                "all {} indices of V(U|X) violate an inclusion",
                raw.len()
            )));
        }
    }
    Ok(IndexSets { params, v_u, h_u, v_u_given_x, h_u_given_y, repaired })
}

/// Profiles a target variable against the base side variables alone, with
/// `X` added, and with each decoder's `Y_A` added.
pub fn construct_profiles(
    model: &JointModel,
    target: Var,
    base: &[Var],
    decoders: &[ParticipantSet],
    len: usize,
    method: ProfileMethod,
    seed: u64,
) -> Result<ProfileSet> {
    let with = |extra: &[Var]| {
        let mut v = base.to_vec();
        v.extend_from_slice(extra);
        v
    };
    let none = entropy_profile(
        &SideLaw::from_model(model, target, base)?,
        len,
        method,
        seed::derive(seed, "profile-none", 0),
    )?;
    let given_x = entropy_profile(
        &SideLaw::from_model(model, target, &with(&[Var::X]))?,
        len,
        method,
        seed::derive(seed, "profile-x", 0),
    )?;
    let given_decoders = decoders
        .iter()
        .enumerate()
        .map(|(k, set)| {
            let ys: Vec<Var> = set.members().into_iter().map(Var::Y).collect();
            let law = SideLaw::from_model(model, target, &with(&ys))?;
            let p = entropy_profile(&law, len, method, seed::derive(seed, "profile-decoder", k as u64))?;
            Ok((*set, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileSet { none, given_x, given_decoders })
}

/// Profiles and thresholds in one step for the single-layer scheme.
pub fn construct_index_sets(
    model: &JointModel,
    decoders: &[ParticipantSet],
    params: PolarParams,
    method: ProfileMethod,
    seed: u64,
) -> Result<IndexSets> {
    let profiles = construct_profiles(model, Var::U, &[], decoders, params.len, method, seed)?;
    build_index_sets(&profiles, params)
}
