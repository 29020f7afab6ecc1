use crate::error::{Error, Result};
use crate::polar::SideLaw;
use crate::source::{JointModel, JointSource, ParticipantSet, Var};

/// Per-letter laws of one quantization layer: the target (`U`, or `V` on the
/// layered scheme's second layer) given the base variables alone, given
/// base and `X`, and given base and each decoder's `Y_A`.
///
/// Side symbols are mixed radix with the base variable least significant,
/// then `X` or the decoder's participants in ascending order.
#[derive(Clone, Debug)]
pub struct LayerLaws {
    pub target: Var,
    pub base: Option<Var>,
    pub given_base: SideLaw,
    pub given_x: SideLaw,
    pub given_decoders: Vec<(ParticipantSet, SideLaw)>,
    y_sizes: Vec<usize>,
}

impl LayerLaws {
    fn build(model: &JointModel, target: Var, base: Option<Var>, decoders: &[ParticipantSet]) -> Result<Self> {
        let base_vars: Vec<Var> = base.into_iter().collect();
        let with = |extra: &[Var]| {
            let mut v = base_vars.clone();
            v.extend_from_slice(extra);
            v
        };
        let given_decoders = decoders
            .iter()
            .map(|set| {
                let ys: Vec<Var> = set.members().into_iter().map(Var::Y).collect();
                Ok((*set, SideLaw::from_model(model, target, &with(&ys))?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LayerLaws {
            target,
            base,
            given_base: SideLaw::from_model(model, target, &base_vars)?,
            given_x: SideLaw::from_model(model, target, &with(&[Var::X]))?,
            given_decoders,
            y_sizes: (1..=model.participants()).map(|j| model.alphabet(Var::Y(j))).collect(),
        })
    }

    /// Laws of `U` for the single-layer scheme.
    pub fn single(model: &JointModel, decoders: &[ParticipantSet]) -> Result<Self> {
        Self::build(model, Var::U, None, decoders)
    }

    /// Laws of `V` given `U` for the second layer of the layered scheme.
    pub fn upper(model: &JointModel, decoders: &[ParticipantSet]) -> Result<Self> {
        if !model.is_layered() {
            return Err(Error::UnknownExpression("V requires a layered test channel".into()));
        }
        Self::build(model, Var::V, Some(Var::U), decoders)
    }

    pub fn decoder(&self, set: ParticipantSet) -> Result<&SideLaw> {
        self.given_decoders
            .iter()
            .find(|(s, _)| *s == set)
            .map(|(_, l)| l)
            .ok_or_else(|| Error::FrozenSetMismatch(set.to_string()))
    }

    fn base_digit(&self, base: Option<&[u8]>, k: usize) -> usize {
        match (self.base, base) {
            (Some(_), Some(b)) => b[k] as usize,
            _ => 0,
        }
    }

    fn base_radix(&self) -> usize {
        if self.base.is_some() {
            2
        } else {
            1
        }
    }

    fn check_base(&self, len: usize, base: Option<&[u8]>) -> Result<()> {
        match (self.base, base) {
            (Some(_), Some(b)) if b.len() == len => Ok(()),
            (Some(_), Some(b)) => Err(Error::LengthMismatch(format!("base of length {} for {len}", b.len()))),
            (Some(_), None) => Err(Error::LengthMismatch("layer needs a base sequence".into())),
            (None, _) => Ok(()),
        }
    }

    pub fn base_side(&self, len: usize, base: Option<&[u8]>) -> Result<Vec<usize>> {
        self.check_base(len, base)?;
        Ok((0..len).map(|k| self.base_digit(base, k)).collect())
    }

    pub fn x_side(&self, x: &[u8], base: Option<&[u8]>) -> Result<Vec<usize>> {
        self.check_base(x.len(), base)?;
        let r = self.base_radix();
        Ok(x.iter().enumerate().map(|(k, &xv)| self.base_digit(base, k) + r * xv as usize).collect())
    }

    /// `ys[j]` is participant `j+1`'s block.
    pub fn decoder_side(&self, set: ParticipantSet, ys: &[Vec<u8>], base: Option<&[u8]>) -> Result<Vec<usize>> {
        let members = set.members();
        if let Some(&m) = members.iter().find(|&&m| m > ys.len()) {
            return Err(Error::ParticipantRange { participant: m, count: ys.len() });
        }
        let len = members.first().map_or(0, |&m| ys[m - 1].len());
        self.check_base(len, base)?;
        let r = self.base_radix();
        Ok((0..len)
            .map(|k| {
                let mut sym = 0;
                for &m in members.iter().rev() {
                    sym = sym * self.y_sizes[m - 1] + ys[m - 1][k] as usize;
                }
                self.base_digit(base, k) + r * sym
            })
            .collect())
    }
}

/// Convenience for callers holding a [`JointSource`] and a test channel.
pub fn single_layer_laws(
    source: &JointSource,
    channel: &crate::source::TestChannel,
    decoders: &[ParticipantSet],
) -> Result<LayerLaws> {
    LayerLaws::single(&JointModel::new(source, channel), decoders)
}
