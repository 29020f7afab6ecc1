use rayon::prelude::*;

use super::field::Poly;
use super::hash::HashFamily;
use crate::chaining::{ChainFrame, LayerCode};
use crate::container::{Reader, Writer};
use crate::error::{Error, Result};
use crate::quantizer::{layered_decode, layered_quantize};
use crate::seed;
use crate::source::{sample, AccessStructure, JointSource, ParticipantSet, SampleBlock};

const MAGIC: &[u8; 4] = b"PSSB";
const VERSION: u16 = 1;

/// The quantization stack behind a secret: one layer hashing `Ũ`, or two
/// layers hashing the upper sequence.
#[derive(Clone, Debug)]
pub enum Scheme {
    Single(LayerCode),
    Layered { lower: LayerCode, upper: LayerCode },
}

impl Scheme {
    /// The layer whose output is hashed.
    pub fn top(&self) -> &LayerCode {
        match self {
            Scheme::Single(code) => code,
            Scheme::Layered { upper, .. } => upper,
        }
    }

    pub fn layers(&self) -> Vec<&LayerCode> {
        match self {
            Scheme::Single(code) => vec![code],
            Scheme::Layered { lower, upper } => vec![lower, upper],
        }
    }

    pub fn len(&self) -> usize {
        self.top().sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn blocks(&self) -> usize {
        self.top().plan.total_blocks()
    }

    pub fn order(&self) -> &[ParticipantSet] {
        &self.top().order
    }

    /// The decoder a qualified set runs: its own position in the chain order
    /// if present, otherwise the first ordered set it contains.
    pub fn decoding_set(&self, set: ParticipantSet) -> Option<ParticipantSet> {
        let order = self.order();
        order.iter().find(|&&s| s == set).or_else(|| order.iter().find(|s| s.is_subset_of(set))).copied()
    }

    /// Quantizes one repetition. Returns the hashed sequences and the frames.
    pub fn encode(&self, blocks: &[SampleBlock], master: u64) -> Result<(Vec<Vec<u8>>, Vec<ChainFrame>)> {
        match self {
            Scheme::Single(code) => {
                let budget = code.draw_budget(seed::derive(master, "budget", 0));
                let (q, frame) = code.encode(blocks, None, &budget, seed::derive(master, "draw", 0))?;
                Ok((q.quantized, vec![frame]))
            }
            Scheme::Layered { lower, upper } => {
                let budgets = (
                    lower.draw_budget(seed::derive(master, "budget", 0)),
                    upper.draw_budget(seed::derive(master, "budget", 1)),
                );
                let out = layered_quantize(lower, upper, blocks, (&budgets.0, &budgets.1), seed::derive(master, "draw", 0))?;
                Ok((out.upper.quantized, vec![out.lower_frame, out.upper_frame]))
            }
        }
    }

    /// Estimate of the hashed sequences at a qualified set.
    pub fn decode(&self, frames: &[ChainFrame], set: ParticipantSet, blocks: &[SampleBlock]) -> Result<Vec<Vec<u8>>> {
        let decoder = self
            .decoding_set(set)
            .ok_or_else(|| Error::FrozenSetMismatch(format!("{set} contains no decoder of the chain")))?;
        match (self, frames) {
            (Scheme::Single(code), [frame]) => code.decode(frame, decoder, blocks, None),
            (Scheme::Layered { lower, upper }, [low, high]) => {
                Ok(layered_decode(lower, upper, (low, high), decoder, blocks)?.1)
            }
            _ => Err(Error::PlanMismatch(format!("{} frames for this scheme", frames.len()))),
        }
    }

    /// Public bits per source symbol, seed excluded.
    pub fn public_rate(frames: &[ChainFrame]) -> f64 {
        frames.iter().map(ChainFrame::rate).sum()
    }
}

/// One independent run of the chained code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Repetition {
    pub frames: Vec<ChainFrame>,
    /// whether each qualified set failed to rebuild this repetition's sequences
    pub errors: Vec<(ParticipantSet, bool)>,
}

/// The secret, each qualified set's estimate, and the public transcript.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretBundle {
    pub len: usize,
    pub blocks: usize,
    pub secret: Vec<u8>,
    pub estimates: Vec<(ParticipantSet, Vec<u8>)>,
    /// hash seed as field-degree bits, empty when the secret is empty
    pub hash_seed: Vec<u8>,
    pub repetitions: Vec<Repetition>,
}

impl SecretBundle {
    pub fn secret_rate(&self) -> f64 {
        self.secret.len() as f64 / (self.repetitions.len() * self.blocks * self.len) as f64
    }

    pub fn public_rate(&self) -> f64 {
        self.repetitions.first().map_or(0.0, |r| Scheme::public_rate(&r.frames))
    }

    pub fn secret_hex(&self) -> String {
        crate::bits::to_hex(&self.secret)
    }

    pub fn secret_error(&self, set: ParticipantSet) -> Option<bool> {
        self.estimates.iter().find(|(s, _)| *s == set).map(|(_, e)| *e != self.secret)
    }

    /// Whether any repetition failed for `set`.
    pub fn any_repetition_error(&self, set: ParticipantSet) -> bool {
        self.repetitions.iter().any(|r| r.errors.iter().any(|(s, e)| *s == set && *e))
    }

    /// `PSSB` container layout (little-endian): magic, `u16` version, `u32`
    /// N, `u32` blocks per repetition, secret bits, hash seed bits, `u32`
    /// estimate count then per estimate a `u32` participant mask and bits,
    /// `u32` repetition count then per repetition a `u32` frame count, each
    /// frame as a length-prefixed `PSCF` container, a `u32` error count and
    /// per error a `u32` mask and a `u8` flag.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(MAGIC, VERSION);
        w.u32(self.len);
        w.u32(self.blocks);
        w.bits(&self.secret);
        w.bits(&self.hash_seed);
        w.u32(self.estimates.len());
        for (set, bits) in &self.estimates {
            w.u32(set.0 as usize);
            w.bits(bits);
        }
        w.u32(self.repetitions.len());
        for rep in &self.repetitions {
            w.u32(rep.frames.len());
            for f in &rep.frames {
                w.bytes(&f.to_bytes());
            }
            w.u32(rep.errors.len());
            for (set, e) in &rep.errors {
                w.u32(set.0 as usize);
                w.u8(*e as u8);
            }
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, MAGIC, VERSION)?;
        let len = r.u32()?;
        let blocks = r.u32()?;
        let secret = r.bits()?;
        let hash_seed = r.bits()?;
        let estimates = (0..r.u32()?)
            .map(|_| Ok((ParticipantSet(r.u32()? as u32), r.bits()?)))
            .collect::<Result<Vec<_>>>()?;
        let mut repetitions = Vec::new();
        for _ in 0..r.u32()? {
            let frames = (0..r.u32()?)
                .map(|_| ChainFrame::from_bytes(r.bytes()?))
                .collect::<Result<Vec<_>>>()?;
            let errors = (0..r.u32()?)
                .map(|_| Ok((ParticipantSet(r.u32()? as u32), r.u8()? != 0)))
                .collect::<Result<Vec<_>>>()?;
            repetitions.push(Repetition { frames, errors });
        }
        r.finish()?;
        Ok(SecretBundle { len, blocks, secret, estimates, hash_seed, repetitions })
    }
}

/// Runs the chained code `repetitions` times on fresh source blocks, hashes
/// the concatenated sequences to `secret_bits` bits and evaluates every
/// qualified set of `access`.
pub fn share_secret(
    source: &JointSource,
    access: &AccessStructure,
    scheme: &Scheme,
    repetitions: usize,
    secret_bits: usize,
    master: u64,
) -> Result<SecretBundle> {
    if repetitions == 0 {
        return Err(Error::ParamRange("at least one repetition is needed".into()));
    }
    let len = scheme.len();
    let blocks = scheme.blocks();
    let qualified = access.qualified().to_vec();
    let runs = (0..repetitions)
        .into_par_iter()
        .map(|t| {
            let samples = sample(source, len, blocks, seed::derive(master, "sample", t as u64))?;
            let (sequences, frames) = scheme.encode(&samples, seed::derive(master, "repetition", t as u64))?;
            let estimates = qualified
                .iter()
                .map(|&a| Ok((a, scheme.decode(&frames, a, &samples)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((sequences, frames, estimates))
        })
        .collect::<Result<Vec<_>>>()?;

    let concat = |pick: &dyn Fn(usize) -> Vec<Vec<u8>>| -> Vec<u8> { (0..repetitions).flat_map(|t| pick(t).concat()).collect() };
    let truth = concat(&|t| runs[t].0.clone());
    let mut reps = Vec::with_capacity(repetitions);
    for (sequences, frames, estimates) in &runs {
        let errors = estimates.iter().map(|(a, e)| (*a, e != sequences)).collect();
        reps.push(Repetition { frames: frames.clone(), errors });
    }

    let (secret, hash_seed, estimates) = if secret_bits == 0 {
        (Vec::new(), Vec::new(), qualified.iter().map(|&a| (a, Vec::new())).collect())
    } else {
        let family = HashFamily::new(truth.len(), secret_bits)?;
        let seed_poly: Poly = family.draw_seed(&mut seed::stream(master, "hash-seed", 0));
        let secret = family.hash(&seed_poly, &truth)?;
        let estimates = qualified
            .iter()
            .enumerate()
            .map(|(i, &a)| Ok((a, family.hash(&seed_poly, &concat(&|t| runs[t].2[i].1.clone()))?)))
            .collect::<Result<Vec<_>>>()?;
        (secret, family.seed_to_bits(&seed_poly), estimates)
    };
    Ok(SecretBundle { len, blocks, secret, estimates, hash_seed, repetitions: reps })
}
