use super::budget::FillRule;
use super::kernel::{Provenance, QuantizedBlocks};
use crate::container::{Reader, Writer};
use crate::error::{Error, Result};
use crate::polar::transform;

const MAGIC: &[u8; 4] = b"PSQB";
const VERSION: u16 = 1;

impl QuantizedBlocks {
    /// `PSQB` container: header, then each `Ṽ_i` as a bit field. `Ũ_i` is
    /// recomputed on load.
    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.provenance;
        let mut w = Writer::new(MAGIC, VERSION);
        w.u32(p.len);
        w.u32(self.blocks());
        w.u32(p.shared_bits);
        w.u32(p.very_high_bits);
        w.u32(p.high_bits);
        w.u8(match p.rule {
            FillRule::Conditional => 0,
            FillRule::AsPublished => 1,
        });
        w.u8(u8::from(p.oracle));
        w.u64(p.draw_seed);
        w.u32(p.first_block);
        for v in &self.transformed {
            w.bits(v);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, MAGIC, VERSION)?;
        let len = r.u32()?;
        let blocks = r.u32()?;
        let shared_bits = r.u32()?;
        let very_high_bits = r.u32()?;
        let high_bits = r.u32()?;
        let rule = match r.u8()? {
            0 => FillRule::Conditional,
            1 => FillRule::AsPublished,
            other => return Err(Error::Format(format!("unknown fill rule {other}"))),
        };
        let oracle = r.u8()? != 0;
        let draw_seed = r.u64()?;
        let first_block = r.u32()?;
        let mut transformed = Vec::with_capacity(blocks);
        for _ in 0..blocks {
            let v = r.bits()?;
            if v.len() != len {
                return Err(Error::Format(format!("block of {} bits in a container for N = {len}", v.len())));
            }
            transformed.push(v);
        }
        r.finish()?;
        let quantized = transformed.iter().map(|v| transform(v)).collect::<Result<Vec<_>>>()?;
        Ok(QuantizedBlocks {
            transformed,
            quantized,
            provenance: Provenance {
                len,
                rule,
                oracle,
                draw_seed,
                first_block,
                shared_bits,
                very_high_bits,
                high_bits,
            },
        })
    }
}
