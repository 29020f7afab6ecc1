//! Per-index conditional entropies `H(V^i | V^{1:i-1}, side)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::SideLaw;
use super::sc::ScEngine;
use super::transform::transform_in_place;
use crate::error::{Error, Result};
use crate::seed;
use crate::source::binary_entropy;

/// Largest `|side alphabet|^N * 2^N` the exact enumeration accepts.
pub const EXACT_WORK_LIMIT: f64 = (1u64 << 24) as f64;

const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMethod {
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub values: Vec<f64>,
    /// Standard error per index (all zero for exact profiles).
    pub std_err: Vec<f64>,
    pub method: ProfileMethod,
}

impl EntropyProfile {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Standard error of `sum()` under independence across indices.
    pub fn sum_std_err(&self) -> f64 {
        self.std_err.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

fn entropy_of(table: &[f64]) -> f64 {
    table.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// Word transform: bit `k` of the word is sequence element `k`.
fn transform_word(mut w: u64, len: usize) -> u64 {
    let mut half = 1;
    while half < len {
        let mut mask = 0u64;
        let mut start = 0;
        while start < len {
            mask |= ((1u64 << half) - 1) << start;
            start += 2 * half;
        }
        w ^= (w >> half) & mask;
        half *= 2;
    }
    w
}

/// Exact profile by enumerating every side sequence and every `v`, without
/// the successive-cancellation recursion.
pub fn entropy_profile_exact(law: &SideLaw, len: usize) -> Result<EntropyProfile> {
    if !len.is_power_of_two() {
        return Err(Error::LengthNotPow2(len));
    }
    let alphabet = law.side_alphabet();
    let work = (alphabet as f64).powi(len as i32) * (len as f64).exp2();
    if work > EXACT_WORK_LIMIT {
        return Err(Error::TooLargeForExact(format!(
            "block length {len} with side alphabet {alphabet}"
        )));
    }
    let sequences = alphabet.pow(len as u32);
    let transform_words: Vec<u64> = (0..1u64 << len).map(|w| transform_word(w, len)).collect();
    let mut prefix_entropy = vec![0.0; len + 1];
    let mut side = vec![0usize; len];
    let mut p_u = Vec::with_capacity(1 << len);
    let mut p_v = vec![0.0; 1 << len];
    for code in 0..sequences {
        let mut c = code;
        for s in side.iter_mut() {
            *s = c % alphabet;
            c /= alphabet;
        }
        let weight: f64 = side.iter().map(|&s| law.side_prob(s)).product();
        if weight == 0.0 {
            continue;
        }
        p_u.clear();
        p_u.push(1.0);
        for &s in &side {
            let cond = law.conditional(s);
            let old = p_u.len();
            for idx in 0..old {
                let base = p_u[idx];
                p_u.push(base * cond[1]);
                p_u[idx] = base * cond[0];
            }
        }
        for (w, slot) in p_v.iter_mut().enumerate() {
            *slot = p_u[transform_words[w] as usize];
        }
        let mut marg = p_v.clone();
        for i in (0..=len).rev() {
            prefix_entropy[i] += weight * entropy_of(&marg[..1 << i]);
            if i > 0 {
                let half = 1 << (i - 1);
                for w in 0..half {
                    marg[w] += marg[w + half];
                }
            }
        }
    }
    let values = (0..len)
        .map(|i| (prefix_entropy[i + 1] - prefix_entropy[i]).clamp(0.0, 1.0))
        .collect();
    Ok(EntropyProfile { values, std_err: vec![0.0; len], method: ProfileMethod::Exact })
}

/// Monte-Carlo profile. Each sample draws `(u, side)` i.i.d. from the law,
/// runs the engine along `v = transform(u)` and accumulates the binary entropy
/// of the conditional probability of each `V^i` (the conditional expectation
/// of `-log p̂`, which has the same mean and lower variance).
pub fn entropy_profile_mc(law: &SideLaw, len: usize, samples: usize, seed: u64) -> Result<EntropyProfile> {
    if !len.is_power_of_two() {
        return Err(Error::LengthNotPow2(len));
    }
    if samples < 2 {
        return Err(Error::ParamRange("at least two samples are required".into()));
    }
    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = vec![0.0; len];
            let mut sq = vec![0.0; len];
            let mut engine = ScEngine::new(vec![[1.0; 2]; len]).unwrap();
            let mut leaves = vec![[0.0; 2]; len];
            let mut u = vec![0u8; len];
            for t in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let mut rng = seed::stream(seed, "profile", t as u64);
                for k in 0..len {
                    let (s, bit) = law.sample(&mut rng);
                    leaves[k] = law.conditional(s);
                    u[k] = bit;
                }
                transform_in_place(&mut u).unwrap();
                engine.reset(&leaves).unwrap();
                for i in 0..len {
                    let p = engine.peek();
                    let h = binary_entropy(p[0].min(p[1]));
                    sum[i] += h;
                    sq[i] += h * h;
                    engine.set(u[i]);
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; len];
    let mut sq = vec![0.0; len];
    for (s, q) in partials {
        for i in 0..len {
            sum[i] += s[i];
            sq[i] += q[i];
        }
    }
    let count = samples as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / count).collect();
    let std_err = values
        .iter()
        .zip(&sq)
        .map(|(m, q)| ((q / count - m * m).max(0.0) * count / (count - 1.0) / count).sqrt())
        .collect();
    Ok(EntropyProfile { values, std_err, method: ProfileMethod::MonteCarlo { samples } })
}

pub fn entropy_profile(law: &SideLaw, len: usize, method: ProfileMethod, seed: u64) -> Result<EntropyProfile> {
    match method {
        ProfileMethod::Exact => entropy_profile_exact(law, len),
        ProfileMethod::MonteCarlo { samples } => entropy_profile_mc(law, len, samples, seed),
    }
}
