use rand::RngCore;

use super::field::{clmul64, field_for_input, Field, Poly};
use crate::error::{Error, Result};
use crate::seed::Rng;

/// The family `x -> top output_bits of (seed * x)` over `GF(2^m)` with a
/// nonzero seed. Inputs shorter than the field degree are embedded as
/// polynomials of degree below the input length, so distinct inputs stay
/// distinct field elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashFamily {
    field: Field,
    input_bits: usize,
    output_bits: usize,
}

impl HashFamily {
    pub fn new(input_bits: usize, output_bits: usize) -> Result<Self> {
        Self::with_field(field_for_input(input_bits)?, input_bits, output_bits)
    }

    pub fn with_field(field: Field, input_bits: usize, output_bits: usize) -> Result<Self> {
        if input_bits == 0 || input_bits > field.degree() {
            return Err(Error::ParamRange(format!(
                "{input_bits} input bits for a field of degree {}",
                field.degree()
            )));
        }
        if output_bits > input_bits {
            return Err(Error::ParamRange(format!("{output_bits} output bits exceed {input_bits} input bits")));
        }
        Ok(HashFamily { field, input_bits, output_bits })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    /// Bits needed to publish a seed.
    pub fn seed_bits(&self) -> usize {
        self.field.degree()
    }

    /// A uniformly random nonzero field element.
    pub fn draw_seed(&self, rng: &mut Rng) -> Poly {
        let degree = self.field.degree();
        loop {
            let mut words: Vec<u64> = (0..degree.div_ceil(64)).map(|_| rng.next_u64()).collect();
            if degree % 64 != 0 {
                if let Some(last) = words.last_mut() {
                    *last &= (1u64 << (degree % 64)) - 1;
                }
            }
            let p = Poly::from_words(words);
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn seed_from_bits(&self, bits: &[u8]) -> Result<Poly> {
        if bits.len() != self.field.degree() {
            return Err(Error::LengthMismatch(format!("seed of {} bits, field degree {}", bits.len(), self.field.degree())));
        }
        Ok(Poly::from_bits_msb(bits))
    }

    pub fn seed_to_bits(&self, seed: &Poly) -> Vec<u8> {
        seed.to_bits_msb(self.field.degree())
    }

    pub fn hash(&self, seed: &Poly, input: &[u8]) -> Result<Vec<u8>> {
        if seed.is_zero() {
            return Err(Error::ZeroSeed);
        }
        if input.len() != self.input_bits {
            return Err(Error::LengthMismatch(format!("hash input of {} bits, expected {}", input.len(), self.input_bits)));
        }
        if seed.degree().is_some_and(|d| d >= self.field.degree()) {
            return Err(Error::ParamRange("seed is not a reduced field element".into()));
        }
        let product = self.field.mul(seed, &Poly::from_bits_msb(input));
        let degree = self.field.degree();
        Ok((0..self.output_bits).map(|i| product.bit(degree - 1 - i)).collect())
    }

    /// The same map on words for fields of degree at most 63, with the input
    /// and output read as integers whose high bit is the first bit.
    pub fn hash_word(&self, seed: u64, input: u64) -> Result<u64> {
        let degree = self.field.degree();
        if degree > 63 {
            return Err(Error::ParamRange("word hashing needs a field of degree below 64".into()));
        }
        if seed == 0 {
            return Err(Error::ZeroSeed);
        }
        if seed >> degree != 0 || input >> self.input_bits != 0 {
            return Err(Error::ParamRange("seed or input wider than the field".into()));
        }
        let modulus = self.field.modulus().polynomial().words().first().copied().unwrap_or(0) as u128
            | 1u128 << degree;
        let mut product = clmul64(seed, input);
        for bit in (degree..2 * degree).rev() {
            if product >> bit & 1 == 1 {
                product ^= modulus << (bit - degree);
            }
        }
        Ok((product >> (degree - self.output_bits)) as u64 & ((1u64 << self.output_bits) - 1))
    }
}
