use super::budget::RandomBudget;
use super::kernel::{QuantizedBlocks, Quantizer};
use crate::bits::gather;
use crate::error::{Error, Result};
use crate::polar::{decode_with_mask, transform, IndexSets, SideLaw};
use crate::source::ParticipantSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleOutput {
    pub blocks: QuantizedBlocks,
    /// `M_i = Ṽ_i[H_{U|Y_B} \ V_{U|X}]`, ascending index
    pub messages: Vec<Vec<u8>>,
    pub r1: Vec<u8>,
}

/// Message of one block for decoder `set`, read off the quantized sequence.
pub fn message_from_quantized(sets: &IndexSets, set: ParticipantSet, quantized: &[u8]) -> Result<Vec<u8>> {
    let positions = sets.message_positions(set)?;
    Ok(gather(&transform(quantized)?, &positions))
}

pub fn encode_single(
    quantizer: &Quantizer,
    sides_x: &[Vec<usize>],
    sides_base: &[Vec<usize>],
    set: ParticipantSet,
    budget: &RandomBudget,
    draw_seed: u64,
) -> Result<SingleOutput> {
    let positions = quantizer.sets().message_positions(set)?;
    let blocks = quantizer.quantize(sides_x, sides_base, budget, draw_seed, 0)?;
    let messages = blocks.transformed.iter().map(|v| gather(v, &positions)).collect();
    Ok(SingleOutput { blocks, messages, r1: budget.r1.clone() })
}

/// Public bits per source symbol: `(k |M_i| + |R1|) / (k N)`.
pub fn message_rate(sets: &IndexSets, set: ParticipantSet, blocks: usize) -> Result<f64> {
    let m = sets.message_positions(set)?.len();
    Ok((blocks * m + sets.v_u_given_x.len()) as f64 / (blocks * sets.len()) as f64)
}

/// Frozen bits on `H_{U|Y_B}`: `R1` at `V_{U|X}`, the message elsewhere.
pub fn frozen_mask(sets: &IndexSets, set: ParticipantSet, message: &[u8], r1: &[u8]) -> Result<Vec<Option<u8>>> {
    let positions = sets.message_positions(set)?;
    if message.len() != positions.len() || r1.len() != sets.v_u_given_x.len() {
        return Err(Error::LengthMismatch(format!(
            "message {} / R1 {} bits for {} / {} positions",
            message.len(),
            r1.len(),
            positions.len(),
            sets.v_u_given_x.len()
        )));
    }
    let mut mask = vec![None; sets.len()];
    for (&i, &b) in sets.v_u_given_x.iter().zip(r1) {
        mask[i] = Some(b);
    }
    for (&i, &b) in positions.iter().zip(message) {
        mask[i] = Some(b);
    }
    Ok(mask)
}

/// Rebuilds the frozen bits and runs successive cancellation; returns `û`.
pub fn decode_single(
    message: &[u8],
    r1: &[u8],
    side: &[usize],
    sets: &IndexSets,
    set: ParticipantSet,
    law: &SideLaw,
) -> Result<Vec<u8>> {
    if side.len() != sets.len() {
        return Err(Error::LengthMismatch(format!("side of length {} for N = {}", side.len(), sets.len())));
    }
    let mask = frozen_mask(sets, set, message, r1)?;
    decode_with_mask(law, side, &mask)
}
