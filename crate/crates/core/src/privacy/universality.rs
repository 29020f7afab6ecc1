use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::field_for_input;
use super::hash::HashFamily;
use crate::error::{Error, Result};
use crate::seed;

/// Which input pairs a collision count visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PairSelection {
    All,
    Sampled { pairs: usize, seed: u64 },
}

/// Worst collision frequency over the visited pairs, per output length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub degree: usize,
    pub pairs: usize,
    /// `worst[r]`: largest fraction of nonzero seeds on which one pair
    /// collides in the top `r` output bits, for `r = 0..=degree`
    pub worst: Vec<f64>,
}

impl CollisionReport {
    /// Whether every output length satisfies `worst[r] <= 2^-r`.
    pub fn holds(&self) -> bool {
        self.worst.iter().enumerate().all(|(r, &w)| w <= (-(r as f64)).exp2() + 1e-12)
    }
}

/// Counts, for each pair of distinct `degree`-bit inputs and every nonzero
/// seed, how many leading output bits of the two hashes agree.
pub fn collision_profile(degree: usize, selection: PairSelection) -> Result<CollisionReport> {
    if degree == 0 || degree > 20 {
        return Err(Error::ParamRange(format!("collision profile of degree {degree}")));
    }
    let family = HashFamily::with_field(field_for_input(degree)?, degree, degree)?;
    if family.field().degree() != degree {
        return Err(Error::ParamRange(format!("no field of degree exactly {degree}")));
    }
    let size = 1u64 << degree;
    let pairs: Vec<(u64, u64)> = match selection {
        PairSelection::All => (0..size).flat_map(|a| (a + 1..size).map(move |b| (a, b))).collect(),
        PairSelection::Sampled { pairs, seed: master } => {
            let mut rng = seed::stream(master, "collision-pairs", degree as u64);
            (0..pairs)
                .map(|_| {
                    let a = rng.gen_range(0..size);
                    let b = (a + rng.gen_range(1..size)) % size;
                    (a, b)
                })
                .collect()
        }
    };
    let seeds = size - 1;
    let worst_counts = pairs
        .par_iter()
        .map(|&(a, b)| {
            let mut agree = vec![0u64; degree + 1];
            for s in 1..=seeds {
                let diff = family.hash_word(s, a)? ^ family.hash_word(s, b)?;
                let leading = if diff == 0 { degree } else { degree - 1 - diff.ilog2() as usize };
                agree[leading] += 1;
            }
            let mut at_least = vec![0u64; degree + 1];
            let mut running = 0;
            for r in (0..=degree).rev() {
                running += agree[r];
                at_least[r] = running;
            }
            Ok::<_, Error>(at_least)
        })
        .try_reduce(
            || vec![0u64; degree + 1],
            |x, y| Ok(x.iter().zip(&y).map(|(a, b)| *a.max(b)).collect()),
        )?;
    Ok(CollisionReport {
        degree,
        pairs: pairs.len(),
        worst: worst_counts.iter().map(|&c| c as f64 / seeds as f64).collect(),
    })
}
