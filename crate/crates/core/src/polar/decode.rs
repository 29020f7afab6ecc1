use std::collections::BTreeMap;

use super::law::SideLaw;
use super::sc::ScEngine;
use crate::error::{Error, Result};

/// Successive-cancellation decoding. Indices listed in `frozen` take their
/// given values, every other index the more likely bit (ties to 0). Returns
/// `û = transform(v̂)`.
pub fn sc_decode(
    law: &SideLaw,
    side: &[usize],
    high_entropy: &[usize],
    frozen: &BTreeMap<usize, u8>,
) -> Result<Vec<u8>> {
    let len = side.len();
    if frozen.len() != high_entropy.len() || high_entropy.iter().any(|i| !frozen.contains_key(i)) {
        return Err(Error::FrozenSetMismatch(format!(
            "{} frozen positions for a set of {}",
            frozen.len(),
            high_entropy.len()
        )));
    }
    let mut fixed = vec![None; len];
    for (&i, &b) in frozen {
        if i >= len {
            return Err(Error::IndexRange { index: i, len });
        }
        fixed[i] = Some(b & 1);
    }
    decode_with_mask(law, side, &fixed)
}

/// Decoding against a dense `Option` mask of fixed bits.
pub fn decode_with_mask(law: &SideLaw, side: &[usize], fixed: &[Option<u8>]) -> Result<Vec<u8>> {
    if fixed.len() != side.len() {
        return Err(Error::LengthMismatch(format!("{} mask entries for {} symbols", fixed.len(), side.len())));
    }
    let mut engine = ScEngine::new(law.leaves(side)?)?;
    for slot in fixed {
        let bit = match slot {
            Some(b) => *b,
            None => {
                let p = engine.peek();
                u8::from(p[1] > p[0])
            }
        };
        engine.set(bit);
    }
    Ok(engine.u_bits().to_vec())
}
