use std::collections::BTreeMap;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::field_for_input;
use super::hash::HashFamily;
use crate::chaining::LayerCode;
use crate::error::{Error, Result};
use crate::polar::{decode_with_mask, transform, SideLaw};
use crate::seed;
use crate::source::{sample, JointModel, JointSource, ParticipantSet, Var};

/// Enumeration budget of the exact probe: `2^N` sources, `|Y_U|^N`
/// eavesdropper views, `2^N` quantizer outputs and the nonzero seeds.
pub const EXACT_LEAKAGE_LIMIT: f64 = (1u64 << 24) as f64;

fn entropy_of<K: Ord>(counts: &BTreeMap<K, f64>) -> f64 {
    counts.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `I(S; R, transcript, Y_U^N)` for one block of a single-layer code, by
/// enumerating every source sequence, eavesdropper view, quantizer output
/// and hash seed. `secret_bits` is at most 2.
pub fn exact_leakage(
    source: &JointSource,
    code: &LayerCode,
    eavesdropper: ParticipantSet,
    secret_bits: usize,
) -> Result<f64> {
    let len = code.sets.len();
    if code.laws.base.is_some() || code.plan.total_blocks() != 1 {
        return Err(Error::TooLargeForExact("exact leakage needs a single-layer, single-block code".into()));
    }
    if secret_bits > 2 || secret_bits > len {
        return Err(Error::TooLargeForExact(format!("{secret_bits} secret bits")));
    }
    if secret_bits == 0 {
        return Ok(0.0);
    }
    let side_alphabet = source.side_alphabet(eavesdropper);
    let field = field_for_input(len)?;
    let seeds = (1u64 << field.degree()) - 1;
    let work = 4f64.powi(len as i32) * (side_alphabet as f64).powi(len as i32) * seeds as f64;
    if work > EXACT_LEAKAGE_LIMIT || field.degree() > 63 {
        return Err(Error::TooLargeForExact(format!("enumeration of {work:.3e} outcomes")));
    }
    let family = HashFamily::with_field(field, len, secret_bits)?;

    let mut letter = vec![vec![0.0; side_alphabet]; 2];
    for idx in 0..source.pmf().len() {
        let (x, ys) = source.atom(idx);
        letter[x as usize][source.side_symbol(eavesdropper, &ys)] += source.pmf()[idx];
    }

    let quantizer = code.quantizer();
    let codec = code.codec()?;
    let side_base = code.laws.base_side(len, None)?;
    let to_bits = |value: usize| -> Vec<u8> { (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect() };
    let word = |bits: &[u8]| bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64);

    // Per quantizer output: the transcript and the hashed sequence.
    let outputs = (0..1usize << len)
        .map(|value| {
            let v = to_bits(value);
            let r1: Vec<u8> = code.sets.v_u_given_x.iter().map(|&i| v[i]).collect();
            let frame = codec.build_frame(&[v.clone()], &r1)?;
            let mut transcript = frame.r1.clone();
            transcript.extend(frame.flat());
            Ok((v.clone(), word(&transcript), word(&transform(&v)?)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut joint: BTreeMap<(u64, u64, u64, usize), f64> = BTreeMap::new();
    for x_value in 0..1usize << len {
        let x = to_bits(x_value);
        let side_x = code.laws.x_side(&x, None)?;
        let kernel = outputs
            .iter()
            .map(|(v, _, _)| quantizer.kernel_probability(&side_x, &side_base, v, false))
            .collect::<Result<Vec<_>>>()?;
        for view in 0..side_alphabet.pow(len as u32) {
            let mut p_view = 1.0;
            let mut rest = view;
            for &xi in &x {
                p_view *= letter[xi as usize][rest % side_alphabet];
                rest /= side_alphabet;
            }
            if p_view == 0.0 {
                continue;
            }
            for ((_, transcript, sequence), &pk) in outputs.iter().zip(&kernel) {
                if pk == 0.0 {
                    continue;
                }
                let mass = p_view * pk / seeds as f64;
                for r in 1..=seeds {
                    let s = family.hash_word(r, *sequence)?;
                    *joint.entry((s, r, *transcript, view)).or_insert(0.0) += mass;
                }
            }
        }
    }
    let mut secret = BTreeMap::new();
    let mut observed = BTreeMap::new();
    for (&(s, r, t, view), &p) in &joint {
        *secret.entry(s).or_insert(0.0) += p;
        *observed.entry((r, t, view)).or_insert(0.0) += p;
    }
    Ok((entropy_of(&secret) + entropy_of(&observed) - entropy_of(&joint)).max(0.0))
}

/// Plug-in leakage estimate with a basic bootstrap interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalLeakage {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: usize,
    pub feature_bits: usize,
}

/// Plug-in mutual information of a table of paired symbols.
pub fn plugin_mutual_information(pairs: &[(u64, u64)]) -> f64 {
    let n = pairs.len() as f64;
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut ab = BTreeMap::new();
    for &(x, y) in pairs {
        *a.entry(x).or_insert(0.0) += 1.0 / n;
        *b.entry(y).or_insert(0.0) += 1.0 / n;
        *ab.entry((x, y)).or_insert(0.0) += 1.0 / n;
    }
    (entropy_of(&a) + entropy_of(&b) - entropy_of(&ab)).max(0.0)
}

/// Estimates leakage through a discretized transcript feature: the
/// eavesdropper decodes the chain as if qualified, using the public
/// messages, the shared bits and its own observations, hashes its estimate
/// with the public seed, and the first `feature_bits` bits of that guess are
/// paired with the same bits of the secret.
#[allow(clippy::too_many_arguments)]
pub fn empirical_leakage(
    source: &JointSource,
    model: &JointModel,
    code: &LayerCode,
    eavesdropper: ParticipantSet,
    secret_bits: usize,
    feature_bits: usize,
    trials: usize,
    bootstrap: usize,
    master: u64,
) -> Result<EmpiricalLeakage> {
    if code.plan.depth() != 1 || code.laws.base.is_some() {
        return Err(Error::PlanMismatch("the eavesdropper probe needs a single-level, single-layer code".into()));
    }
    if feature_bits == 0 || feature_bits > secret_bits || feature_bits > 16 {
        return Err(Error::ParamRange(format!("{feature_bits} feature bits for a {secret_bits}-bit secret")));
    }
    let len = code.sets.len();
    let blocks = code.plan.total_blocks();
    let family = HashFamily::new(len * blocks, secret_bits)?;
    let ys: Vec<Var> = eavesdropper.members().into_iter().map(Var::Y).collect();
    let law = SideLaw::from_model(model, Var::U, &ys)?;
    let positions = code.sets.message_positions(code.order[0])?;
    let feature = |bits: &[u8]| bits[..feature_bits].iter().fold(0u64, |acc, &b| acc << 1 | b as u64);

    let pairs = (0..trials)
        .into_par_iter()
        .map(|t| {
            let t = t as u64;
            let samples = sample(source, len, blocks, seed::derive(master, "leak-sample", t))?;
            let budget = code.draw_budget(seed::derive(master, "leak-budget", t));
            let (q, frame) = code.encode(&samples, None, &budget, seed::derive(master, "leak-draw", t))?;
            let mut guess = Vec::with_capacity(len * blocks);
            for (b, s) in samples.iter().enumerate() {
                let mut mask = vec![None; len];
                for (&i, &bit) in code.sets.v_u_given_x.iter().zip(&frame.r1) {
                    mask[i] = Some(bit);
                }
                for (&i, &bit) in positions.iter().zip(&frame.entries[b]) {
                    mask[i] = Some(bit);
                }
                let side = code.laws.decoder_side(eavesdropper, &s.y, None)?;
                guess.extend(decode_with_mask(&law, &side, &mask)?);
            }
            let hash_seed = family.draw_seed(&mut seed::stream(master, "leak-seed", t));
            let secret = family.hash(&hash_seed, &q.quantized.concat())?;
            let estimate = family.hash(&hash_seed, &guess)?;
            Ok((feature(&secret), feature(&estimate)))
        })
        .collect::<Result<Vec<_>>>()?;

    let estimate = plugin_mutual_information(&pairs);
    let mut rng = seed::stream(master, "leak-bootstrap", 0);
    let mut resampled: Vec<f64> = (0..bootstrap)
        .map(|_| {
            let draw: Vec<(u64, u64)> = (0..pairs.len()).map(|_| pairs[rng.gen_range(0..pairs.len())]).collect();
            plugin_mutual_information(&draw)
        })
        .collect();
    resampled.sort_by(|a, b| a.total_cmp(b));
    let quantile = |q: f64| {
        if resampled.is_empty() {
            estimate
        } else {
            resampled[((q * (resampled.len() - 1) as f64).round()) as usize]
        }
    };
    // basic bootstrap: reflects the resampling bias of the plug-in estimator
    let ci_low = (2.0 * estimate - quantile(0.975)).max(0.0);
    let ci_high = (2.0 * estimate - quantile(0.025)).max(0.0);
    Ok(EmpiricalLeakage { estimate, ci_low, ci_high, trials, feature_bits })
}
