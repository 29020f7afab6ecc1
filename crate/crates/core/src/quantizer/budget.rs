use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::IndexSets;
use crate::seed;

/// How the indices of `V_U \ V_{U|X}` are filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FillRule {
    /// Only `V_{U|X}` is uniform (the shared `R1`); every other index is drawn
    /// from `p(V^j | V^{<j}, X)`.
    #[default]
    Conditional,
    /// `V_U \ V_{U|X}` is filled with fresh uniform bits `R̄_i` per block.
    AsPublished,
}

/// Uniform bits consumed by the quantizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomBudget {
    /// fills `V_{U|X}` in every block
    pub r1: Vec<u8>,
    /// per block, fills `V_U \ V_{U|X}` under [`FillRule::AsPublished`]
    pub rbar: Vec<Vec<u8>>,
    /// per block, fills `V_{U|X}` in the deterministic-tail variant
    pub rcheck: Vec<Vec<u8>>,
}

fn uniform_bits(master: u64, label: &str, index: u64, count: usize) -> Vec<u8> {
    let mut rng = seed::stream(master, label, index);
    (0..count).map(|_| rng.gen_range(0..2u8)).collect()
}

impl RandomBudget {
    pub fn draw(sets: &IndexSets, blocks: usize, rule: FillRule, oracle: bool, master: u64) -> Self {
        let rbar_len = sets.v_u_minus_x().len();
        RandomBudget {
            r1: uniform_bits(master, "r1", 0, sets.v_u_given_x.len()),
            rbar: match rule {
                FillRule::AsPublished => {
                    (0..blocks).map(|i| uniform_bits(master, "rbar", i as u64, rbar_len)).collect()
                }
                FillRule::Conditional => Vec::new(),
            },
            rcheck: if oracle {
                (0..blocks)
                    .map(|i| uniform_bits(master, "rcheck", i as u64, sets.v_u_given_x.len()))
                    .collect()
            } else {
                Vec::new()
            },
        }
    }

    pub fn validate(&self, sets: &IndexSets, blocks: usize, rule: FillRule, oracle: bool) -> Result<()> {
        let mismatch = |what: String| Err(Error::BudgetMismatch(what));
        let shared = sets.v_u_given_x.len();
        if !oracle && self.r1.len() != shared {
            return mismatch(format!("R1 has {} bits, V(U|X) has {shared}", self.r1.len()));
        }
        match rule {
            FillRule::AsPublished => {
                let want = sets.v_u_minus_x().len();
                if self.rbar.len() != blocks || self.rbar.iter().any(|r| r.len() != want) {
                    return mismatch(format!("need {blocks} fresh sequences of {want} bits"));
                }
            }
            FillRule::Conditional => {
                if !self.rbar.is_empty() {
                    return mismatch("fresh per-block bits are unused by the conditional rule".into());
                }
            }
        }
        if oracle && (self.rcheck.len() != blocks || self.rcheck.iter().any(|r| r.len() != shared)) {
            return mismatch(format!("need {blocks} per-block sequences of {shared} bits"));
        }
        Ok(())
    }
}
