//! Length-prefixed little-endian binary containers. Bit sequences are stored
//! as a `u32` bit count followed by the bits packed most-significant first.

use crate::bits::{pack_msb, unpack_msb};
use crate::error::{Error, Result};

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(magic: &[u8; 4], version: u16) -> Self {
        let mut w = Writer { buf: magic.to_vec() };
        w.u16(version);
        w
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u32(&mut self, v: usize) {
        self.buf.extend_from_slice(&(v as u32).to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn bits(&mut self, bits: &[u8]) {
        self.u32(bits.len());
        self.buf.extend_from_slice(&pack_msb(bits));
    }

    /// A nested container or other raw payload: `u32` byte count then bytes.
    pub fn bytes(&mut self, bytes: &[u8]) {
        self.u32(bytes.len());
        self.buf.extend_from_slice(bytes);
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8], magic: &[u8; 4], version: u16) -> Result<Self> {
        if buf.len() < 6 || &buf[..4] != magic {
            return Err(Error::Format(format!("expected magic {}", String::from_utf8_lossy(magic))));
        }
        let mut r = Reader { buf, pos: 4 };
        let v = r.u16()?;
        if v != version {
            return Err(Error::Format(format!("unsupported version {v}")));
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.buf.len() {
            return Err(Error::Format("truncated container".into()));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    pub fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn bits(&mut self) -> Result<Vec<u8>> {
        let len = self.u32()?;
        let bytes = self.take(len.div_ceil(8))?;
        Ok(unpack_msb(bytes, len))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let len = self.u32()?;
        self.take(len)
    }

    pub fn finish(self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Format(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }
}
