use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block counts per recursion level. Level 1 is the base code over `k_1`
/// blocks of length `N`; level `d` chains `k_d` super-blocks of the level
/// below. The total number of blocks is the product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub len: usize,
    pub levels: Vec<usize>,
    pub epsilon: f64,
    pub delta: f64,
    /// rate slack given to each level
    pub level_delta: f64,
    /// decoding error budget of each level (`epsilon` divided by the block
    /// counts of the levels above it)
    pub level_error: Vec<f64>,
    /// `max I(U;X|Y_A)` over the sets handled up to each level
    pub level_rates: Vec<f64>,
}

impl BlockPlan {
    /// A plan with explicit block counts.
    pub fn fixed(len: usize, levels: Vec<usize>) -> Result<Self> {
        if levels.is_empty() || levels.contains(&0) {
            return Err(Error::PlanMismatch("every level needs at least one block".into()));
        }
        let count = levels.len();
        Ok(BlockPlan {
            len,
            level_error: vec![0.0; count],
            level_rates: vec![0.0; count],
            levels,
            epsilon: 0.0,
            delta: 0.0,
            level_delta: 0.0,
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn total_blocks(&self) -> usize {
        self.levels.iter().product()
    }

    /// Base blocks covered by one unit of level `d` (1-based).
    pub fn blocks_at(&self, level: usize) -> usize {
        self.levels[..level].iter().product()
    }
}

/// The smallest `k` with `(1 + 1/k)(rate + delta/2) + h_u_given_x / k <= rate + delta`.
pub fn footnote_k(rate: f64, h_u_given_x: f64, delta: f64) -> Result<usize> {
    if !(delta > 0.0) || !delta.is_finite() || !(rate >= 0.0) || !(h_u_given_x >= 0.0) {
        return Err(Error::InfeasibleDelta(format!("delta {delta}, rate {rate}, H(U|X) {h_u_given_x}")));
    }
    let bound = 2.0 * (rate + h_u_given_x) / delta + 1.0;
    if !bound.is_finite() || bound > 1e9 {
        return Err(Error::InfeasibleDelta(format!("block count {bound} is unreachable")));
    }
    let mut k = (bound.ceil() as usize).max(1);
    while k > 1 && footnote_holds(k - 1, rate, h_u_given_x, delta) {
        k -= 1;
    }
    while !footnote_holds(k, rate, h_u_given_x, delta) {
        k += 1;
    }
    Ok(k)
}

pub fn footnote_holds(k: usize, rate: f64, h_u_given_x: f64, delta: f64) -> bool {
    let k = k as f64;
    (1.0 + 1.0 / k) * (rate + delta / 2.0) + h_u_given_x / k <= rate + delta
}

/// Plans block counts for an ordered access structure.
///
/// `set_rates[d]` is `I(U;X|Y_A)` of the `d`-th set in order. The slack
/// `delta` is split equally over the levels; the base count keeps the
/// overhead of the shared bits below half of a level's slack.
pub fn plan_blocks(
    set_rates: &[f64],
    h_u_given_x: f64,
    shared_bits: usize,
    len: usize,
    delta: f64,
    epsilon: f64,
) -> Result<BlockPlan> {
    if set_rates.is_empty() {
        return Err(Error::EmptyQualified);
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InfeasibleDelta(format!("delta {delta} must be positive")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::ParamRange(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let depth = set_rates.len();
    let level_delta = delta / depth as f64;
    let base = ((2.0 * shared_bits as f64) / (level_delta * len as f64)).ceil().max(1.0) as usize;
    let mut levels = vec![base];
    let mut level_rates = vec![set_rates[0]];
    let mut running = set_rates[0];
    for &r in &set_rates[1..] {
        running = running.max(r);
        levels.push(footnote_k(running, h_u_given_x, level_delta)?);
        level_rates.push(running);
    }
    let mut level_error = vec![epsilon; depth];
    for d in (0..depth.saturating_sub(1)).rev() {
        level_error[d] = level_error[d + 1] / levels[d + 1] as f64;
    }
    Ok(BlockPlan { len, levels, epsilon, delta, level_delta, level_error, level_rates })
}
