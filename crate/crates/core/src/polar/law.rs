use rand::Rng as _;

use crate::error::{Error, Result};
use crate::seed::Rng;
use crate::source::{JointModel, Var};

/// Per-letter law of a binary target given a finite side symbol, stored as
/// the joint table `P(s, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SideLaw {
    joint: Vec<[f64; 2]>,
    cdf: Vec<f64>,
}

impl SideLaw {
    pub fn from_joint(joint: Vec<[f64; 2]>) -> Result<Self> {
        if joint.is_empty() || joint.iter().flatten().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf("side law needs nonnegative entries".into()));
        }
        let total: f64 = joint.iter().flatten().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPmf(format!("side law sums to {total}")));
        }
        let mut cdf = Vec::with_capacity(joint.len() * 2);
        let mut acc = 0.0;
        for p in joint.iter().flatten() {
            acc += p;
            cdf.push(acc);
        }
        Ok(SideLaw { joint, cdf })
    }

    /// Law of `target` given the listed side variables (first one least
    /// significant in the side symbol).
    pub fn from_model(model: &JointModel, target: Var, side: &[Var]) -> Result<Self> {
        Self::from_joint(model.pair_table(target, side)?)
    }

    /// `p_U` with no side information.
    pub fn marginal(&self) -> SideLaw {
        let mut m = [0.0; 2];
        for row in &self.joint {
            m[0] += row[0];
            m[1] += row[1];
        }
        SideLaw::from_joint(vec![m]).expect("marginal of a valid law")
    }

    pub fn side_alphabet(&self) -> usize {
        self.joint.len()
    }

    pub fn joint(&self) -> &[[f64; 2]] {
        &self.joint
    }

    pub fn side_prob(&self, s: usize) -> f64 {
        self.joint[s][0] + self.joint[s][1]
    }

    /// `[P(t=0|s), P(t=1|s)]`, uniform for a null side symbol.
    pub fn conditional(&self, s: usize) -> [f64; 2] {
        let [a, b] = self.joint[s];
        if a + b > 0.0 {
            [a / (a + b), b / (a + b)]
        } else {
            [0.5, 0.5]
        }
    }

    pub fn leaves(&self, side: &[usize]) -> Result<Vec<[f64; 2]>> {
        side.iter()
            .map(|&s| {
                if s < self.joint.len() {
                    Ok(self.conditional(s))
                } else {
                    Err(Error::IndexRange { index: s, len: self.joint.len() })
                }
            })
            .collect()
    }

    /// Draws `(side symbol, target bit)` from the joint table.
    pub fn sample(&self, rng: &mut Rng) -> (usize, u8) {
        let total = *self.cdf.last().unwrap();
        let r = rng.gen::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= r).min(self.cdf.len() - 1);
        (idx / 2, (idx % 2) as u8)
    }
}
