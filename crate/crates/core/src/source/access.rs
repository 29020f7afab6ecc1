use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A subset of participants `[J]`, stored as a bitmask (bit `j-1` = participant `j`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ParticipantSet(pub u32);

impl ParticipantSet {
    pub const EMPTY: ParticipantSet = ParticipantSet(0);

    /// Builds a set from 1-based participant labels.
    pub fn from_members(members: &[usize], count: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &p in members {
            if p == 0 || p > count {
                return Err(Error::ParticipantRange { participant: p, count });
            }
            mask |= 1 << (p - 1);
        }
        Ok(ParticipantSet(mask))
    }

    pub fn full(count: usize) -> Self {
        ParticipantSet(((1u64 << count) - 1) as u32)
    }

    /// 1-based members in ascending order.
    pub fn members(self) -> Vec<usize> {
        (0..32).filter(|b| self.0 >> b & 1 == 1).map(|b| b + 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, participant: usize) -> bool {
        participant >= 1 && self.0 >> (participant - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: ParticipantSet) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Display for ParticipantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

impl fmt::Debug for ParticipantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn all_subsets(count: usize) -> impl Iterator<Item = ParticipantSet> {
    (0..(1u32 << count)).map(ParticipantSet)
}

/// Upward closure of `sets` inside `2^[count]`.
///
/// The input order is kept; sets added by the closure follow, smallest first.
pub fn monotone_closure(count: usize, sets: &[ParticipantSet]) -> Vec<ParticipantSet> {
    let mut out: Vec<ParticipantSet> = Vec::new();
    for s in sets {
        if !out.contains(s) {
            out.push(*s);
        }
    }
    let mut added: Vec<ParticipantSet> = all_subsets(count)
        .filter(|t| !out.contains(t) && sets.iter().any(|s| s.is_subset_of(*t)))
        .collect();
    added.sort_by_key(|s| (s.len(), s.members()));
    out.extend(added);
    out
}

/// Qualified sets (monotone) and the colluding sets that must learn nothing.
///
/// The order of `qualified` is significant: it is the order in which the
/// chaining encoder composes decoders, the last one taking the backward role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccessStructure {
    participants: usize,
    qualified: Vec<ParticipantSet>,
    unqualified: Vec<ParticipantSet>,
}

impl AccessStructure {
    /// Validates and closes an access structure given as 1-based member lists.
    ///
    /// With `unqualified = None` the colluding sets default to every subset
    /// that is not qualified, including the empty set.
    pub fn new(
        participants: usize,
        qualified: &[Vec<usize>],
        unqualified: Option<&[Vec<usize>]>,
    ) -> Result<Self> {
        let q = qualified
            .iter()
            .map(|m| ParticipantSet::from_members(m, participants))
            .collect::<Result<Vec<_>>>()?;
        let u = match unqualified {
            Some(list) => Some(
                list.iter()
                    .map(|m| ParticipantSet::from_members(m, participants))
                    .collect::<Result<Vec<_>>>()?,
            ),
            None => None,
        };
        Self::from_sets(participants, q, u)
    }

    pub fn from_sets(
        participants: usize,
        qualified: Vec<ParticipantSet>,
        unqualified: Option<Vec<ParticipantSet>>,
    ) -> Result<Self> {
        if participants == 0 || participants > 16 {
            return Err(Error::ParamRange(format!(
                "participant count {participants} must be in 1..=16"
            )));
        }
        if qualified.is_empty() {
            return Err(Error::EmptyQualified);
        }
        let full = ParticipantSet::full(participants);
        for s in qualified.iter().chain(unqualified.iter().flatten()) {
            if !s.is_subset_of(full) {
                let p = s.members().into_iter().find(|&p| p > participants).unwrap_or(0);
                return Err(Error::ParticipantRange { participant: p, count: participants });
            }
        }
        let qualified = monotone_closure(participants, &qualified);
        let unqualified = match unqualified {
            Some(list) => {
                if let Some(bad) = list.iter().find(|s| qualified.contains(s)) {
                    return Err(Error::Overlap(bad.to_string()));
                }
                let mut dedup = Vec::new();
                for s in list {
                    if !dedup.contains(&s) {
                        dedup.push(s);
                    }
                }
                dedup
            }
            None => {
                let mut rest: Vec<ParticipantSet> =
                    all_subsets(participants).filter(|s| !qualified.contains(s)).collect();
                rest.sort_by(|a, b| b.len().cmp(&a.len()).then(a.members().cmp(&b.members())));
                rest
            }
        };
        Ok(AccessStructure { participants, qualified, unqualified })
    }

    pub fn participants(&self) -> usize {
        self.participants
    }

    pub fn qualified(&self) -> &[ParticipantSet] {
        &self.qualified
    }

    pub fn unqualified(&self) -> &[ParticipantSet] {
        &self.unqualified
    }

    pub fn is_qualified(&self, set: ParticipantSet) -> bool {
        self.qualified.contains(&set)
    }
}
