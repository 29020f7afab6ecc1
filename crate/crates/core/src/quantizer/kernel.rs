use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::budget::{FillRule, RandomBudget};
use crate::error::{Error, Result};
use crate::polar::{transform, IndexSets, ScEngine, SideLaw};
use crate::seed::{self, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    /// position in the shared `R1`
    Shared(usize),
    /// position in the per-block `R̄_i`
    Fresh(usize),
    /// position in the per-block `Ř_i`
    Check(usize),
    Conditional,
    Argmax,
}

/// Quantizer for one layer: index sets plus the laws of the target given
/// `X` (draws) and given the base variables only (argmax tail).
#[derive(Clone, Debug)]
pub struct Quantizer<'a> {
    sets: &'a IndexSets,
    given_x: &'a SideLaw,
    given_base: &'a SideLaw,
    rule: FillRule,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub len: usize,
    pub rule: FillRule,
    pub oracle: bool,
    pub draw_seed: u64,
    pub first_block: usize,
    /// `|V_{U|X}|`, the length of `R1`
    pub shared_bits: usize,
    pub very_high_bits: usize,
    pub high_bits: usize,
}

/// Quantized blocks: `transformed[i]` is `Ṽ_i`, `quantized[i] = transform(Ṽ_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizedBlocks {
    pub transformed: Vec<Vec<u8>>,
    pub quantized: Vec<Vec<u8>>,
    pub provenance: Provenance,
}

impl QuantizedBlocks {
    pub fn blocks(&self) -> usize {
        self.quantized.len()
    }
}

impl<'a> Quantizer<'a> {
    pub fn new(sets: &'a IndexSets, given_x: &'a SideLaw, given_base: &'a SideLaw, rule: FillRule) -> Self {
        Quantizer { sets, given_x, given_base, rule }
    }

    pub fn rule(&self) -> FillRule {
        self.rule
    }

    pub fn sets(&self) -> &IndexSets {
        self.sets
    }

    fn roles(&self, oracle: bool) -> Vec<Role> {
        let len = self.sets.len();
        let mut roles = vec![Role::Conditional; len];
        if oracle {
            for &i in &self.sets.h_u_complement() {
                roles[i] = Role::Argmax;
            }
        }
        if self.rule == FillRule::AsPublished {
            for (k, i) in self.sets.v_u_minus_x().into_iter().enumerate() {
                roles[i] = Role::Fresh(k);
            }
        }
        for (k, &i) in self.sets.v_u_given_x.iter().enumerate() {
            roles[i] = if oracle { Role::Check(k) } else { Role::Shared(k) };
        }
        roles
    }

    #[allow(clippy::too_many_arguments)]
    fn run_block(
        &self,
        roles: &[Role],
        side_x: &[usize],
        side_base: &[usize],
        r1: &[u8],
        fresh: &[u8],
        check: &[u8],
        rng: &mut Rng,
    ) -> Result<Vec<u8>> {
        let len = self.sets.len();
        if side_x.len() != len || side_base.len() != len {
            return Err(Error::LengthMismatch(format!("side of length {} for N = {len}", side_x.len())));
        }
        let mut cond = ScEngine::new(self.given_x.leaves(side_x)?)?;
        let mut marg = if roles.contains(&Role::Argmax) {
            Some(ScEngine::new(self.given_base.leaves(side_base)?)?)
        } else {
            None
        };
        let mut v = vec![0u8; len];
        for (j, role) in roles.iter().enumerate() {
            let bit = match *role {
                Role::Shared(k) => r1[k],
                Role::Fresh(k) => fresh[k],
                Role::Check(k) => check[k],
                Role::Conditional => {
                    let p = cond.peek();
                    u8::from(rng.gen::<f64>() < p[1])
                }
                Role::Argmax => {
                    let p = marg.as_mut().expect("argmax engine").peek();
                    u8::from(p[1] > p[0])
                }
            };
            v[j] = bit;
            cond.set(bit);
            if let Some(m) = marg.as_mut() {
                m.set(bit);
            }
        }
        Ok(v)
    }

    fn run(
        &self,
        sides_x: &[Vec<usize>],
        sides_base: &[Vec<usize>],
        budget: &RandomBudget,
        oracle: bool,
        draw_seed: u64,
        first_block: usize,
    ) -> Result<QuantizedBlocks> {
        let blocks = sides_x.len();
        if sides_base.len() != blocks {
            return Err(Error::LengthMismatch(format!("{} base blocks for {blocks} blocks", sides_base.len())));
        }
        budget.validate(self.sets, blocks, self.rule, oracle)?;
        let roles = self.roles(oracle);
        let transformed = (0..blocks)
            .into_par_iter()
            .map(|i| {
                let mut rng = seed::stream(draw_seed, "draw", (first_block + i) as u64);
                let fresh = budget.rbar.get(i).map_or(&[][..], |r| r.as_slice());
                let check = budget.rcheck.get(i).map_or(&[][..], |r| r.as_slice());
                self.run_block(&roles, &sides_x[i], &sides_base[i], &budget.r1, fresh, check, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        let quantized = transformed.iter().map(|v| transform(v)).collect::<Result<Vec<_>>>()?;
        Ok(QuantizedBlocks {
            transformed,
            quantized,
            provenance: Provenance {
                len: self.sets.len(),
                rule: self.rule,
                oracle,
                draw_seed,
                first_block,
                shared_bits: self.sets.v_u_given_x.len(),
                very_high_bits: self.sets.v_u.len(),
                high_bits: self.sets.h_u.len(),
            },
        })
    }

    /// Quantizes each block; block `first_block + i` draws from the sub-stream
    /// `("draw", first_block + i)` of `draw_seed`.
    pub fn quantize(
        &self,
        sides_x: &[Vec<usize>],
        sides_base: &[Vec<usize>],
        budget: &RandomBudget,
        draw_seed: u64,
        first_block: usize,
    ) -> Result<QuantizedBlocks> {
        self.run(sides_x, sides_base, budget, false, draw_seed, first_block)
    }

    /// Deterministic-tail variant: `V_{U|X}` from fresh `Ř_i`, `H_U^c` set to
    /// the argmax of `p(V^j | V^{<j})` (ties to 0).
    pub fn quantize_oracle(
        &self,
        sides_x: &[Vec<usize>],
        sides_base: &[Vec<usize>],
        budget: &RandomBudget,
        draw_seed: u64,
        first_block: usize,
    ) -> Result<QuantizedBlocks> {
        self.run(sides_x, sides_base, budget, true, draw_seed, first_block)
    }

    /// Exact probability that one block quantizes to `v` given its side
    /// sequences, with all uniform bits (R1, R̄, Ř) marginalized.
    pub fn kernel_probability(&self, side_x: &[usize], side_base: &[usize], v: &[u8], oracle: bool) -> Result<f64> {
        let len = self.sets.len();
        if v.len() != len || side_x.len() != len || side_base.len() != len {
            return Err(Error::LengthMismatch(format!("kernel inputs for N = {len}")));
        }
        let roles = self.roles(oracle);
        let mut cond = ScEngine::new(self.given_x.leaves(side_x)?)?;
        let mut marg = ScEngine::new(self.given_base.leaves(side_base)?)?;
        let mut prob = 1.0;
        for (j, role) in roles.iter().enumerate() {
            let bit = v[j] & 1;
            prob *= match role {
                Role::Shared(_) | Role::Fresh(_) | Role::Check(_) => 0.5,
                Role::Conditional => cond.peek()[bit as usize],
                Role::Argmax => {
                    let p = marg.peek();
                    if u8::from(p[1] > p[0]) == bit {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            if prob == 0.0 {
                return Ok(0.0);
            }
            cond.set(bit);
            marg.set(bit);
        }
        Ok(prob)
    }
}
