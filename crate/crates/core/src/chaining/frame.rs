use serde::{Deserialize, Serialize};

use crate::container::{Reader, Writer};
use crate::error::{Error, Result};
use crate::source::ParticipantSet;

const MAGIC: &[u8; 4] = b"PSCF";
const VERSION: u16 = 1;

/// Public message of the chained code: the top-level entries
/// `[F_1, F_2 ⊕ M_1, ..., F_k ⊕ M_{k-1}, M_k]` plus `R1`, where `F_i` is the
/// flattened frame of the level below for super-block `i` and `M_i` the
/// concatenated messages of the last set for that super-block. With a single
/// set the entries are the per-block messages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFrame {
    pub len: usize,
    pub levels: Vec<usize>,
    pub order: Vec<ParticipantSet>,
    pub r1: Vec<u8>,
    pub entries: Vec<Vec<u8>>,
    /// operand lengths `(lower frame, last-set message)` of each entry before padding
    pub operand_lengths: Vec<(usize, usize)>,
}

impl ChainFrame {
    pub fn payload_bits(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    /// `(payload + |R1|) / (k N)`
    pub fn rate(&self) -> f64 {
        let blocks: usize = self.levels.iter().product();
        (self.payload_bits() + self.r1.len()) as f64 / (blocks * self.len) as f64
    }

    pub fn flat(&self) -> Vec<u8> {
        self.entries.concat()
    }

    /// `PSCF` container layout (all integers little-endian):
    /// magic, `u16` version, `u32` N, `u32` level count then one `u32` per
    /// level, `u32` set count then one `u32` participant mask per set, `R1`
    /// as a bit field, `u32` entry count, per entry two `u32` operand lengths
    /// and the entry as a bit field.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(MAGIC, VERSION);
        w.u32(self.len);
        w.u32(self.levels.len());
        for &k in &self.levels {
            w.u32(k);
        }
        w.u32(self.order.len());
        for s in &self.order {
            w.u32(s.0 as usize);
        }
        w.bits(&self.r1);
        w.u32(self.entries.len());
        for (e, &(a, b)) in self.entries.iter().zip(&self.operand_lengths) {
            w.u32(a);
            w.u32(b);
            w.bits(e);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, MAGIC, VERSION)?;
        let len = r.u32()?;
        let depth = r.u32()?;
        let levels = (0..depth).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let count = r.u32()?;
        let order = (0..count)
            .map(|_| r.u32().map(|m| ParticipantSet(m as u32)))
            .collect::<Result<Vec<_>>>()?;
        let r1 = r.bits()?;
        let entries_count = r.u32()?;
        let mut entries = Vec::with_capacity(entries_count);
        let mut operand_lengths = Vec::with_capacity(entries_count);
        for _ in 0..entries_count {
            let a = r.u32()?;
            let b = r.u32()?;
            let e = r.bits()?;
            if e.len() != a.max(b) {
                return Err(Error::Format(format!("entry of {} bits for operands ({a}, {b})", e.len())));
            }
            operand_lengths.push((a, b));
            entries.push(e);
        }
        r.finish()?;
        Ok(ChainFrame { len, levels, order, r1, entries, operand_lengths })
    }
}
