use super::frame::ChainFrame;
use super::plan::BlockPlan;
use crate::bits::{gather, xor_padded};
use crate::error::{Error, Result};
use crate::polar::{transform, IndexSets, SideLaw};
use crate::quantizer::{decode_single, QuantizedBlocks, Quantizer, RandomBudget};
use crate::source::ParticipantSet;

/// Frame layout for an ordered list of decoder sets and a block plan. Level
/// `d` (1-based) handles the first `d` sets; the `d`-th set decodes it
/// backward, the earlier ones forward.
#[derive(Clone, Debug)]
pub struct ChainCodec<'a> {
    sets: &'a IndexSets,
    order: Vec<ParticipantSet>,
    plan: BlockPlan,
    positions: Vec<Vec<usize>>,
}

impl<'a> ChainCodec<'a> {
    pub fn new(sets: &'a IndexSets, order: &[ParticipantSet], plan: &BlockPlan) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::EmptyQualified);
        }
        if plan.depth() != order.len() {
            return Err(Error::PlanMismatch(format!(
                "{} levels for {} decoder sets",
                plan.depth(),
                order.len()
            )));
        }
        if plan.len != sets.len() {
            return Err(Error::PlanMismatch(format!("plan for N = {}, sets for N = {}", plan.len, sets.len())));
        }
        let positions = order.iter().map(|s| sets.message_positions(*s)).collect::<Result<Vec<_>>>()?;
        Ok(ChainCodec { sets, order: order.to_vec(), plan: plan.clone(), positions })
    }

    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    pub fn order(&self) -> &[ParticipantSet] {
        &self.order
    }

    pub fn sets(&self) -> &IndexSets {
        self.sets
    }

    pub fn position_of(&self, set: ParticipantSet) -> Option<usize> {
        self.order.iter().position(|s| *s == set)
    }

    fn message_len(&self, set_index: usize) -> usize {
        self.positions[set_index].len()
    }

    /// Flattened frame length of one level-`d` unit.
    pub fn frame_len(&self, level: usize) -> usize {
        if level == 1 {
            return self.plan.levels[0] * self.message_len(0);
        }
        let lower = self.frame_len(level - 1);
        let own = self.plan.blocks_at(level - 1) * self.message_len(level - 1);
        let k = self.plan.levels[level - 1];
        lower + (k - 1) * lower.max(own) + own
    }

    /// Concatenated messages of set `set_index` over the given blocks of `Ṽ`.
    fn singles(&self, set_index: usize, transformed: &[Vec<u8>]) -> Vec<u8> {
        transformed.iter().flat_map(|v| gather(v, &self.positions[set_index])).collect()
    }

    /// Entries and operand lengths of one level-`d` unit built from `Ṽ`.
    fn entries(&self, level: usize, transformed: &[Vec<u8>]) -> (Vec<Vec<u8>>, Vec<(usize, usize)>) {
        if level == 1 {
            let entries: Vec<Vec<u8>> = transformed.iter().map(|v| gather(v, &self.positions[0])).collect();
            let lengths = entries.iter().map(|e| (0, e.len())).collect();
            return (entries, lengths);
        }
        let unit = self.plan.blocks_at(level - 1);
        let lower: Vec<Vec<u8>> = transformed.chunks(unit).map(|c| self.entries(level - 1, c).0.concat()).collect();
        let own: Vec<Vec<u8>> = transformed.chunks(unit).map(|c| self.singles(level - 1, c)).collect();
        let k = lower.len();
        let mut entries = vec![lower[0].clone()];
        let mut lengths = vec![(lower[0].len(), 0)];
        for i in 0..k - 1 {
            entries.push(xor_padded(&lower[i + 1], &own[i]));
            lengths.push((lower[i + 1].len(), own[i].len()));
        }
        entries.push(own[k - 1].clone());
        lengths.push((0, own[k - 1].len()));
        (entries, lengths)
    }

    /// Builds the public frame from the quantized blocks.
    pub fn build_frame(&self, transformed: &[Vec<u8>], r1: &[u8]) -> Result<ChainFrame> {
        if transformed.len() != self.plan.total_blocks() {
            return Err(Error::PlanMismatch(format!(
                "{} blocks for a plan of {}",
                transformed.len(),
                self.plan.total_blocks()
            )));
        }
        let (entries, operand_lengths) = self.entries(self.plan.depth(), transformed);
        Ok(ChainFrame {
            len: self.sets.len(),
            levels: self.plan.levels.clone(),
            order: self.order.clone(),
            r1: r1.to_vec(),
            entries,
            operand_lengths,
        })
    }

    fn check_frame(&self, frame: &ChainFrame) -> Result<()> {
        if frame.levels != self.plan.levels || frame.order != self.order || frame.len != self.sets.len() {
            return Err(Error::PlanMismatch("frame does not match the codec's plan".into()));
        }
        let expect = self.frame_len(self.plan.depth());
        if frame.payload_bits() != expect {
            return Err(Error::PlanMismatch(format!("payload of {} bits, expected {expect}", frame.payload_bits())));
        }
        Ok(())
    }

    /// Reconstructs every block for the decoder at `position` in the order.
    /// `sides[b]` is that decoder's side-symbol block `b`.
    pub fn decode(&self, frame: &ChainFrame, position: usize, sides: &[Vec<usize>], law: &SideLaw) -> Result<Vec<Vec<u8>>> {
        self.check_frame(frame)?;
        if position >= self.order.len() {
            return Err(Error::PlanMismatch(format!("decoder position {position} outside the order")));
        }
        if sides.len() != self.plan.total_blocks() {
            return Err(Error::LengthMismatch(format!(
                "{} side blocks for {} blocks",
                sides.len(),
                self.plan.total_blocks()
            )));
        }
        let mut out = Vec::with_capacity(sides.len());
        self.decode_level(self.plan.depth(), position, &frame.flat(), &frame.r1, sides, law, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn decode_level(
        &self,
        level: usize,
        position: usize,
        flat: &[u8],
        r1: &[u8],
        sides: &[Vec<usize>],
        law: &SideLaw,
        out: &mut Vec<Vec<u8>>,
    ) -> Result<()> {
        let set_index = level - 1;
        if level == 1 {
            let m = self.message_len(0);
            for (b, side) in sides.iter().enumerate() {
                let msg = &flat[b * m..(b + 1) * m];
                out.push(decode_single(msg, r1, side, self.sets, self.order[0], law)?);
            }
            return Ok(());
        }
        let unit = self.plan.blocks_at(level - 1);
        let k = self.plan.levels[level - 1];
        let lower_len = self.frame_len(level - 1);
        let own_len = unit * self.message_len(set_index);
        let mid = lower_len.max(own_len);
        let entry = |i: usize| -> &[u8] {
            if i == 0 {
                &flat[..lower_len]
            } else if i < k {
                let start = lower_len + (i - 1) * mid;
                &flat[start..start + mid]
            } else {
                let start = lower_len + (k - 1) * mid;
                &flat[start..start + own_len]
            }
        };
        let chunk = |i: usize| &sides[i * unit..(i + 1) * unit];
        if position < set_index {
            let mut lower = entry(0).to_vec();
            for i in 0..k {
                let start = out.len();
                self.decode_level(level - 1, position, &lower, r1, chunk(i), law, out)?;
                if i + 1 < k {
                    let decoded: Vec<Vec<u8>> =
                        out[start..].iter().map(|u| transform(u)).collect::<Result<Vec<_>>>()?;
                    let own = self.singles(set_index, &decoded);
                    lower = xor_padded(entry(i + 1), &own);
                    lower.truncate(lower_len);
                }
            }
        } else {
            let mut supers: Vec<Vec<Vec<u8>>> = vec![Vec::new(); k];
            let mut own = entry(k).to_vec();
            for i in (0..k).rev() {
                let blocks = chunk(i)
                    .iter()
                    .enumerate()
                    .map(|(b, side)| {
                        let m = self.message_len(set_index);
                        decode_single(&own[b * m..(b + 1) * m], r1, side, self.sets, self.order[set_index], law)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if i > 0 {
                    let decoded: Vec<Vec<u8>> = blocks.iter().map(|u| transform(u)).collect::<Result<Vec<_>>>()?;
                    let lower = self.entries(level - 1, &decoded).0.concat();
                    own = xor_padded(entry(i), &lower);
                    own.truncate(own_len);
                }
                supers[i] = blocks;
            }
            out.extend(supers.into_iter().flatten());
        }
        Ok(())
    }
}

/// Quantizes all blocks with one shared `R1` and assembles the chained frame.
pub fn encode_chain(
    quantizer: &Quantizer,
    codec: &ChainCodec,
    sides_x: &[Vec<usize>],
    sides_base: &[Vec<usize>],
    budget: &RandomBudget,
    draw_seed: u64,
) -> Result<(QuantizedBlocks, ChainFrame)> {
    if sides_x.len() != codec.plan().total_blocks() {
        return Err(Error::PlanMismatch(format!(
            "{} source blocks for a plan of {}",
            sides_x.len(),
            codec.plan().total_blocks()
        )));
    }
    let blocks = quantizer.quantize(sides_x, sides_base, budget, draw_seed, 0)?;
    let frame = codec.build_frame(&blocks.transformed, &budget.r1)?;
    Ok((blocks, frame))
}

/// Decoder at a position before the last: walks super-blocks forward.
pub fn decode_forward(
    codec: &ChainCodec,
    frame: &ChainFrame,
    position: usize,
    sides: &[Vec<usize>],
    law: &SideLaw,
) -> Result<Vec<Vec<u8>>> {
    if position + 1 >= codec.order().len() && codec.order().len() > 1 {
        return Err(Error::PlanMismatch("the last decoder decodes backward".into()));
    }
    codec.decode(frame, position, sides, law)
}

/// Decoder in the last position: walks super-blocks backward.
pub fn decode_backward(codec: &ChainCodec, frame: &ChainFrame, sides: &[Vec<usize>], law: &SideLaw) -> Result<Vec<Vec<u8>>> {
    codec.decode(frame, codec.order().len() - 1, sides, law)
}
