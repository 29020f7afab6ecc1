use super::codec::{encode_chain, ChainCodec};
use super::frame::ChainFrame;
use super::plan::{plan_blocks, BlockPlan};
use crate::error::{Error, Result};
use crate::polar::{build_index_sets, construct_profiles, IndexSets, PolarParams, ProfileMethod, ProfileSet};
use crate::quantizer::{FillRule, LayerLaws, QuantizedBlocks, Quantizer, RandomBudget};
use crate::seed;
use crate::source::{JointModel, ParticipantSet, SampleBlock, Var};

/// Everything one quantization layer needs: laws, index sets, the decoder
/// order and the block plan.
#[derive(Clone, Debug)]
pub struct LayerCode {
    pub laws: LayerLaws,
    pub sets: IndexSets,
    pub order: Vec<ParticipantSet>,
    pub plan: BlockPlan,
    pub rule: FillRule,
}

impl LayerCode {
    pub fn codec(&self) -> Result<ChainCodec<'_>> {
        ChainCodec::new(&self.sets, &self.order, &self.plan)
    }

    pub fn quantizer(&self) -> Quantizer<'_> {
        Quantizer::new(&self.sets, &self.laws.given_x, &self.laws.given_base, self.rule)
    }

    fn base_of<'b>(base: Option<&'b [Vec<u8>]>, b: usize) -> Option<&'b [u8]> {
        base.map(|blocks| blocks[b].as_slice())
    }

    /// Quantizes `blocks` (one per planned block) and builds the frame.
    /// `base` holds the lower layer's sequences when this is an upper layer.
    pub fn encode(
        &self,
        blocks: &[SampleBlock],
        base: Option<&[Vec<u8>]>,
        budget: &RandomBudget,
        draw_seed: u64,
    ) -> Result<(QuantizedBlocks, ChainFrame)> {
        if blocks.len() != self.plan.total_blocks() {
            return Err(Error::PlanMismatch(format!(
                "{} blocks for a plan of {}",
                blocks.len(),
                self.plan.total_blocks()
            )));
        }
        let len = self.sets.len();
        let sides_x = blocks
            .iter()
            .enumerate()
            .map(|(b, s)| self.laws.x_side(&s.x, Self::base_of(base, b)))
            .collect::<Result<Vec<_>>>()?;
        let sides_base = (0..blocks.len())
            .map(|b| self.laws.base_side(len, Self::base_of(base, b)))
            .collect::<Result<Vec<_>>>()?;
        encode_chain(&self.quantizer(), &self.codec()?, &sides_x, &sides_base, budget, draw_seed)
    }

    pub fn draw_budget(&self, master: u64) -> RandomBudget {
        RandomBudget::draw(&self.sets, self.plan.total_blocks(), self.rule, false, master)
    }

    /// Reconstruction at the decoder holding `set` (which must be in the order).
    pub fn decode(
        &self,
        frame: &ChainFrame,
        set: ParticipantSet,
        blocks: &[SampleBlock],
        base: Option<&[Vec<u8>]>,
    ) -> Result<Vec<Vec<u8>>> {
        let codec = self.codec()?;
        let position = codec
            .position_of(set)
            .ok_or_else(|| Error::FrozenSetMismatch(format!("{set} is not a decoder of this layer")))?;
        let sides = blocks
            .iter()
            .enumerate()
            .map(|(b, s)| self.laws.decoder_side(set, &s.y, Self::base_of(base, b)))
            .collect::<Result<Vec<_>>>()?;
        codec.decode(frame, position, &sides, self.laws.decoder(set)?)
    }
}

/// Rates that drive block planning for one layer: `I(T;X|B,Y_A)` per set in
/// order and `H(T|B,X)`, where `T` is the layer's target and `B` its base.
pub fn layer_rates(model: &JointModel, laws: &LayerLaws, order: &[ParticipantSet]) -> Result<(Vec<f64>, f64)> {
    let base: Vec<Var> = laws.base.into_iter().collect();
    let rates = order
        .iter()
        .map(|set| {
            let mut given = base.clone();
            given.extend(set.members().into_iter().map(Var::Y));
            model.mutual_info(&[laws.target], &[Var::X], &given)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut given = base;
    given.push(Var::X);
    Ok((rates, model.cond_entropy(&[laws.target], &given)?))
}

/// Options shared by the layer builders.
#[derive(Clone, Copy, Debug)]
pub struct LayerOptions {
    pub params: PolarParams,
    pub method: ProfileMethod,
    pub delta: f64,
    pub epsilon: f64,
    pub rule: FillRule,
    pub seed: u64,
}

impl LayerCode {
    /// Entropy profiles of a layer's target: alone, given `X`, and given
    /// each decoder, all conditioned on the layer's base variable.
    pub fn profiles(model: &JointModel, laws: &LayerLaws, order: &[ParticipantSet], opts: &LayerOptions) -> Result<ProfileSet> {
        let base: Vec<Var> = laws.base.into_iter().collect();
        let label = if base.is_empty() { "layer-lower" } else { "layer-upper" };
        construct_profiles(
            model,
            laws.target,
            &base,
            order,
            opts.params.len,
            opts.method,
            seed::derive(opts.seed, label, 0),
        )
    }

    /// Thresholds precomputed profiles and plans the blocks.
    pub fn from_profiles(
        model: &JointModel,
        laws: LayerLaws,
        order: &[ParticipantSet],
        profiles: &ProfileSet,
        opts: &LayerOptions,
    ) -> Result<Self> {
        let sets = build_index_sets(profiles, opts.params)?;
        let (rates, h_given_x) = layer_rates(model, &laws, order)?;
        let plan = plan_blocks(&rates, h_given_x, sets.v_u_given_x.len(), opts.params.len, opts.delta, opts.epsilon)?;
        Ok(LayerCode { laws, sets, order: order.to_vec(), plan, rule: opts.rule })
    }

    fn build(model: &JointModel, laws: LayerLaws, order: &[ParticipantSet], opts: &LayerOptions) -> Result<Self> {
        let profiles = Self::profiles(model, &laws, order, opts)?;
        Self::from_profiles(model, laws, order, &profiles, opts)
    }

    /// The single-layer code for `U`.
    pub fn single(model: &JointModel, order: &[ParticipantSet], opts: &LayerOptions) -> Result<Self> {
        Self::build(model, LayerLaws::single(model, order)?, order, opts)
    }

    /// Both layers of the layered scheme. Each layer receives half of the
    /// rate slack, and the two plans are merged level by level so that both
    /// layers cover the same blocks.
    pub fn layered(model: &JointModel, order: &[ParticipantSet], opts: &LayerOptions) -> Result<(Self, Self)> {
        let half = Self::half_slack(opts);
        let lower = Self::build(model, LayerLaws::single(model, order)?, order, &half)?;
        let upper = Self::build(model, LayerLaws::upper(model, order)?, order, &half)?;
        Ok(Self::align(lower, upper))
    }

    /// Options for each layer of the layered scheme: half of the rate slack.
    pub fn half_slack(opts: &LayerOptions) -> LayerOptions {
        LayerOptions { delta: opts.delta / 2.0, ..*opts }
    }

    /// Merges two layer plans level by level so both cover the same blocks.
    pub fn align(mut lower: Self, mut upper: Self) -> (Self, Self) {
        let merged: Vec<usize> =
            lower.plan.levels.iter().zip(&upper.plan.levels).map(|(a, b)| *a.max(b)).collect();
        for plan in [&mut lower.plan, &mut upper.plan] {
            plan.levels = merged.clone();
            let depth = plan.levels.len();
            plan.level_error = vec![plan.epsilon; depth];
            for d in (0..depth.saturating_sub(1)).rev() {
                plan.level_error[d] = plan.level_error[d + 1] / plan.levels[d + 1] as f64;
            }
        }
        (lower, upper)
    }
}
