use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::polar::IndexSets;
use crate::source::{AccessStructure, JointModel, ParticipantSet, Var};

/// Per-letter entropy terms that fix the secret length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyTerms {
    /// `min H(T|B,Y_U)` over the unqualified sets (`H(T|B)` when there are none)
    pub min_unqualified: f64,
    /// `max H(T|B,Y_A)` over the qualified sets
    pub max_qualified: f64,
}

impl EntropyTerms {
    pub fn gap(&self) -> f64 {
        self.min_unqualified - self.max_qualified
    }

    /// Terms for target `U` (single layer) or `V` given `U` (layered).
    pub fn compute(model: &JointModel, access: &AccessStructure, layered: bool) -> Result<Self> {
        let (target, base) = if layered { (Var::V, vec![Var::U]) } else { (Var::U, Vec::new()) };
        let given = |set: &ParticipantSet| {
            let mut g = base.clone();
            g.extend(set.members().into_iter().map(Var::Y));
            g
        };
        let mut max_qualified = f64::NEG_INFINITY;
        for a in access.qualified() {
            max_qualified = max_qualified.max(model.cond_entropy(&[target], &given(a))?);
        }
        let mut min_unqualified = model.cond_entropy(&[target], &base)?;
        for u in access.unqualified() {
            min_unqualified = min_unqualified.min(model.cond_entropy(&[target], &given(u))?);
        }
        Ok(EntropyTerms { min_unqualified, max_qualified })
    }
}

/// Finite-length deduction per block standing in for the vanishing term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "bits", rename_all = "kebab-case")]
pub enum SlackPolicy {
    /// `|V(U|X)| + |V_U^c| - |H_U^c|` from the constructed index sets
    #[default]
    SetSizes,
    /// public bits per block in excess of `N max I(U;X|Y_A)`
    MeasuredMessage,
    /// a fixed number of bits per block
    Fixed(f64),
    None,
}

impl SlackPolicy {
    /// Bits deducted per block. `public_bits_per_block` is only read by
    /// [`SlackPolicy::MeasuredMessage`].
    pub fn bits_per_block(&self, sets: &IndexSets, max_rate: f64, public_bits_per_block: f64) -> f64 {
        match self {
            SlackPolicy::SetSizes => {
                (sets.v_u_given_x.len() + sets.v_u_complement().len()) as f64 - sets.h_u_complement().len() as f64
            }
            SlackPolicy::MeasuredMessage => (public_bits_per_block - sets.len() as f64 * max_rate).max(0.0),
            SlackPolicy::Fixed(bits) => *bits,
            SlackPolicy::None => 0.0,
        }
    }
}

/// `floor(t (k (N gap - slack) - 2 delta))`, clamped at zero, for `t`
/// repetitions of `k` blocks of length `N`.
pub fn secret_length(len: usize, repetitions: usize, blocks: usize, terms: EntropyTerms, slack: f64, delta: f64) -> usize {
    let per_repetition = blocks as f64 * (len as f64 * terms.gap() - slack) - 2.0 * delta;
    let total = repetitions as f64 * per_repetition;
    if total > 0.0 {
        total.floor() as usize
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_and_linearity() {
        let closed = EntropyTerms { min_unqualified: 0.3, max_qualified: 0.4 };
        assert_eq!(secret_length(1024, 3, 2, closed, 0.0, 0.1), 0);
        let open = EntropyTerms { min_unqualified: 0.75, max_qualified: 0.25 };
        let one = secret_length(1000, 1, 1, open, 10.0, 0.5);
        let two = secret_length(1000, 2, 1, open, 10.0, 0.5);
        assert_eq!(one, 489);
        assert_eq!(two, 978);
    }
}
