use crate::chaining::{ChainFrame, LayerCode};
use crate::error::{Error, Result};
use crate::quantizer::{QuantizedBlocks, RandomBudget};
use crate::seed;
use crate::source::{ParticipantSet, SampleBlock};

/// Output of the two-layer quantizer: `Ũ` with its messages, then the upper
/// sequence quantized given `(Ũ, X)` with messages for decoders that know `Ũ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredOutput {
    pub lower: QuantizedBlocks,
    pub lower_frame: ChainFrame,
    pub upper: QuantizedBlocks,
    pub upper_frame: ChainFrame,
}

impl LayeredOutput {
    /// Public rate `R_U + R_V`.
    pub fn rate(&self) -> f64 {
        self.lower_frame.rate() + self.upper_frame.rate()
    }
}

pub fn layered_quantize(
    lower: &LayerCode,
    upper: &LayerCode,
    blocks: &[SampleBlock],
    budgets: (&RandomBudget, &RandomBudget),
    draw_seed: u64,
) -> Result<LayeredOutput> {
    if lower.plan.total_blocks() != upper.plan.total_blocks() {
        return Err(Error::PlanMismatch("layers must cover the same blocks".into()));
    }
    if upper.laws.base.is_none() {
        return Err(Error::PlanMismatch("the upper layer must be conditioned on the lower one".into()));
    }
    let (lower_q, lower_frame) = lower.encode(blocks, None, budgets.0, seed::derive(draw_seed, "lower", 0))?;
    let (upper_q, upper_frame) =
        upper.encode(blocks, Some(&lower_q.quantized), budgets.1, seed::derive(draw_seed, "upper", 0))?;
    Ok(LayeredOutput { lower: lower_q, lower_frame, upper: upper_q, upper_frame })
}

/// Decodes `Û` first, then the upper sequence with `Û` as side information.
pub fn layered_decode(
    lower: &LayerCode,
    upper: &LayerCode,
    output_frames: (&ChainFrame, &ChainFrame),
    set: ParticipantSet,
    blocks: &[SampleBlock],
) -> Result<(Vec<Vec<u8>>, Vec<Vec<u8>>)> {
    let u = lower.decode(output_frames.0, set, blocks, None)?;
    let v = upper.decode(output_frames.1, set, blocks, Some(&u))?;
    Ok((u, v))
}
