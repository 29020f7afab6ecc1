//! Binary polynomials and the fields `GF(2^m)` used by the hash family.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const KARATSUBA_WORDS: usize = 24;

/// Largest degree searched directly for a low-weight irreducible. Larger
/// inputs are embedded into an all-one-polynomial field.
pub const SEARCH_LIMIT: usize = 2048;

/// Published low-weight irreducibles, as the middle exponents of
/// `x^m + x^a (+ x^b + x^c) + 1`.
pub const FROZEN_TABLE: [(usize, &[usize]); 6] = [
    (8, &[4, 3, 1]),
    (12, &[3]),
    (16, &[5, 3, 1]),
    (32, &[7, 3, 2]),
    (64, &[4, 3, 1]),
    (128, &[7, 2, 1]),
];

/// A polynomial over GF(2). Bit `i` of the word vector is the coefficient
/// of `x^i`; trailing zero words are trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    words: Vec<u64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { words: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { words: vec![1] }
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Poly { words }
    }

    pub fn from_exponents(exponents: &[usize]) -> Self {
        let mut p = Poly::zero();
        for &e in exponents {
            p.flip(e);
        }
        p
    }

    /// Bit string to polynomial with the first bit as the leading coefficient
    /// of `x^(len-1)`.
    pub fn from_bits_msb(bits: &[u8]) -> Self {
        let len = bits.len();
        let mut words = vec![0u64; len.div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                let e = len - 1 - i;
                words[e / 64] |= 1 << (e % 64);
            }
        }
        Poly::from_words(words)
    }

    /// The coefficients of `x^(len-1)` down to `x^0`.
    pub fn to_bits_msb(&self, len: usize) -> Vec<u8> {
        (0..len).map(|i| self.bit(len - 1 - i)).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn bit(&self, i: usize) -> u8 {
        self.words.get(i / 64).map_or(0, |w| ((w >> (i % 64)) & 1) as u8)
    }

    pub fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        self.trim();
    }

    pub fn degree(&self) -> Option<usize> {
        self.words.last().map(|w| (self.words.len() - 1) * 64 + 63 - w.leading_zeros() as usize)
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_shifted(other, 0);
        out
    }

    /// `self += other * x^shift`.
    pub fn add_shifted(&mut self, other: &Poly, shift: usize) {
        if other.is_zero() {
            return;
        }
        let (word_shift, bit_shift) = (shift / 64, shift % 64);
        let needed = other.words.len() + word_shift + 1;
        if self.words.len() < needed {
            self.words.resize(needed, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + word_shift] ^= w << bit_shift;
            if bit_shift != 0 {
                self.words[i + word_shift + 1] ^= w >> (64 - bit_shift);
            }
        }
        self.trim();
    }

    /// Coefficients at `x^from` and above, shifted down to `x^0`.
    fn high_part(&self, from: usize) -> Poly {
        let (word_shift, bit_shift) = (from / 64, from % 64);
        if self.words.len() <= word_shift {
            return Poly::zero();
        }
        let src = &self.words[word_shift..];
        let mut words = vec![0u64; src.len()];
        for i in 0..src.len() {
            words[i] = src[i] >> bit_shift;
            if bit_shift != 0 && i + 1 < src.len() {
                words[i] |= src[i + 1] << (64 - bit_shift);
            }
        }
        Poly::from_words(words)
    }

    /// Keeps the coefficients below `x^len`.
    fn truncate(&mut self, len: usize) {
        let words = len.div_ceil(64);
        self.words.truncate(words);
        if len % 64 != 0 {
            if let Some(last) = self.words.get_mut(words - 1) {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        self.trim();
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        Poly::from_words(mul_words(&self.words, &other.words))
    }

    pub fn square(&self) -> Poly {
        let mut words = Vec::with_capacity(2 * self.words.len());
        for &w in &self.words {
            words.push(spread(w as u32));
            words.push(spread((w >> 32) as u32));
        }
        Poly::from_words(words)
    }

    /// Remainder by long division.
    pub fn rem(&self, modulus: &Poly) -> Poly {
        let m = modulus.degree().expect("division by zero polynomial");
        let mut r = self.clone();
        while let Some(d) = r.degree() {
            if d < m {
                break;
            }
            r.add_shifted(modulus, d - m);
        }
        r
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }
}

/// Interleaves zero bits: coefficient `i` moves to `2i`.
fn spread(x: u32) -> u64 {
    let mut x = x as u64;
    x = (x | x << 16) & 0x0000_FFFF_0000_FFFF;
    x = (x | x << 8) & 0x00FF_00FF_00FF_00FF;
    x = (x | x << 4) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | x << 2) & 0x3333_3333_3333_3333;
    (x | x << 1) & 0x5555_5555_5555_5555
}

/// Carry-less 64x64 product with a four-bit window.
pub fn clmul64(a: u64, b: u64) -> u128 {
    let mut table = [0u128; 16];
    for j in 1..16 {
        table[j] = (table[j >> 1] << 1) ^ if j & 1 == 1 { a as u128 } else { 0 };
    }
    let mut out = 0u128;
    for nibble in (0..16).rev() {
        out = (out << 4) ^ table[((b >> (4 * nibble)) & 15) as usize];
    }
    out
}

fn schoolbook(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let p = clmul64(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
}

fn karatsuba(a: &[u64], b: &[u64], out: &mut [u64]) {
    let n = a.len();
    if n <= KARATSUBA_WORDS {
        schoolbook(a, b, out);
        return;
    }
    let half = n / 2;
    let upper = n - half;
    let (a0, a1) = a.split_at(half);
    let (b0, b1) = b.split_at(half);
    let mut low = vec![0u64; 2 * half];
    let mut high = vec![0u64; 2 * upper];
    karatsuba(a0, b0, &mut low);
    karatsuba(a1, b1, &mut high);
    let mut a_sum = a1.to_vec();
    let mut b_sum = b1.to_vec();
    for i in 0..half {
        a_sum[i] ^= a0[i];
        b_sum[i] ^= b0[i];
    }
    let mut middle = vec![0u64; 2 * upper];
    karatsuba(&a_sum, &b_sum, &mut middle);
    for (i, w) in low.iter().enumerate() {
        middle[i] ^= w;
        out[i] ^= w;
    }
    for (i, w) in high.iter().enumerate() {
        middle[i] ^= w;
        out[2 * half + i] ^= w;
    }
    for (i, w) in middle.iter().enumerate() {
        out[half + i] ^= w;
    }
}

fn mul_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len()];
    if a.len().min(b.len()) <= KARATSUBA_WORDS {
        schoolbook(a, b, &mut out);
        return out;
    }
    let n = a.len().max(b.len());
    let mut pa = a.to_vec();
    let mut pb = b.to_vec();
    pa.resize(n, 0);
    pb.resize(n, 0);
    let mut full = vec![0u64; 2 * n];
    karatsuba(&pa, &pb, &mut full);
    full.truncate(out.len());
    full
}

/// A reduction polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Modulus {
    /// `x^degree + sum of x^tap + 1`, taps in descending order.
    Sparse { degree: usize, taps: Vec<usize> },
    /// `1 + x + ... + x^degree` where `degree + 1` is a prime with 2 as a
    /// primitive root.
    AllOnes { degree: usize },
}

impl Modulus {
    pub fn degree(&self) -> usize {
        match self {
            Modulus::Sparse { degree, .. } | Modulus::AllOnes { degree } => *degree,
        }
    }

    pub fn polynomial(&self) -> Poly {
        match self {
            Modulus::Sparse { degree, taps } => {
                let mut exps = vec![*degree, 0];
                exps.extend_from_slice(taps);
                Poly::from_exponents(&exps)
            }
            Modulus::AllOnes { degree } => Poly::from_exponents(&(0..=*degree).collect::<Vec<_>>()),
        }
    }
}

/// Arithmetic in `GF(2)[x] / modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    modulus: Modulus,
}

impl Field {
    /// Wraps a modulus without checking irreducibility.
    pub fn with_modulus(modulus: Modulus) -> Self {
        Field { modulus }
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }

    pub fn reduce(&self, mut p: Poly) -> Poly {
        match &self.modulus {
            Modulus::Sparse { degree, taps } => loop {
                let high = p.high_part(*degree);
                if high.is_zero() {
                    return p;
                }
                p.truncate(*degree);
                p.add_shifted(&high, 0);
                for &t in taps {
                    p.add_shifted(&high, t);
                }
            },
            Modulus::AllOnes { degree } => {
                let period = degree + 1;
                loop {
                    let high = p.high_part(period);
                    if high.is_zero() {
                        break;
                    }
                    p.truncate(period);
                    p.add_shifted(&high, 0);
                }
                if p.bit(*degree) == 1 {
                    p = p.add(&self.modulus.polynomial());
                }
                p
            }
        }
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(a.mul(b))
    }

    pub fn square(&self, a: &Poly) -> Poly {
        self.reduce(a.square())
    }

    /// Rabin's test with an early Ben-Or pass over small factor degrees.
    pub fn is_irreducible(&self) -> bool {
        let m = self.degree();
        if m == 0 {
            return false;
        }
        if m == 1 {
            return true;
        }
        let f = self.modulus.polynomial();
        let x = Poly::from_exponents(&[1]);
        let checkpoints: Vec<usize> = prime_factors(m as u64).into_iter().map(|q| m / q as usize).collect();
        let early = (m / 2).min(16);
        let mut power = x.clone();
        for i in 1..=m {
            power = self.square(&power);
            if i < m && (i <= early || checkpoints.contains(&i)) && power.add(&x).gcd(&f) != Poly::one() {
                return false;
            }
        }
        power == x
    }
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![n]
}

/// Multiplicative order of 2 modulo an odd prime `p`.
pub fn order_of_two(p: u64) -> u64 {
    let mut order = p - 1;
    for q in prime_factors(p - 1) {
        while order % q == 0 && pow_mod(2, order / q, p) == 1 {
            order /= q;
        }
    }
    order
}

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u128;
    let m = modulus as u128;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Least-lexicographic irreducible trinomial, else pentanomial, of a degree.
/// Pentanomials are ordered by their largest middle exponent first.
pub fn search_sparse(degree: usize) -> Result<Modulus> {
    if degree == 0 {
        return Err(Error::ParamRange("field degree must be positive".into()));
    }
    if degree == 1 {
        return Ok(Modulus::Sparse { degree, taps: Vec::new() });
    }
    for k in 1..degree {
        let m = Modulus::Sparse { degree, taps: vec![k] };
        if Field::with_modulus(m.clone()).is_irreducible() {
            return Ok(m);
        }
    }
    for a in 3..degree {
        for b in 2..a {
            for c in 1..b {
                let m = Modulus::Sparse { degree, taps: vec![a, b, c] };
                if Field::with_modulus(m.clone()).is_irreducible() {
                    return Ok(m);
                }
            }
        }
    }
    Err(Error::ParamRange(format!("no low-weight irreducible of degree {degree}")))
}

/// Smallest all-one-polynomial degree at least `bits`.
pub fn all_ones_degree(bits: usize) -> usize {
    let mut p = bits as u64 + 1;
    loop {
        if p > 2 && is_prime(p) && order_of_two(p) == p - 1 {
            return p as usize - 1;
        }
        p += 1;
    }
}

fn cache() -> &'static Mutex<BTreeMap<usize, Modulus>> {
    static CACHE: OnceLock<Mutex<BTreeMap<usize, Modulus>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(BTreeMap::new()))
}

/// Seeds the in-process modulus cache, e.g. from a persisted file.
pub fn preload_moduli(entries: impl IntoIterator<Item = (usize, Modulus)>) {
    cache().lock().expect("modulus cache poisoned").extend(entries);
}

pub fn cached_moduli() -> Vec<(usize, Modulus)> {
    let mut v: Vec<_> = cache().lock().expect("modulus cache poisoned").clone().into_iter().collect();
    v.sort_by_key(|(bits, _)| *bits);
    v
}

/// The field used to hash `bits` input bits: the frozen table, a searched
/// low-weight modulus of exactly that degree, or an all-one-polynomial
/// field of degree at least `bits` for inputs above [`SEARCH_LIMIT`].
pub fn field_for_input(bits: usize) -> Result<Field> {
    if bits == 0 {
        return Err(Error::ParamRange("hash input must be non-empty".into()));
    }
    if let Some((_, taps)) = FROZEN_TABLE.iter().find(|(m, _)| *m == bits) {
        return Ok(Field::with_modulus(Modulus::Sparse { degree: bits, taps: taps.to_vec() }));
    }
    if let Some(m) = cache().lock().expect("modulus cache poisoned").get(&bits) {
        return Ok(Field::with_modulus(m.clone()));
    }
    let modulus = if bits <= SEARCH_LIMIT {
        search_sparse(bits)?
    } else {
        Modulus::AllOnes { degree: all_ones_degree(bits) }
    };
    cache().lock().expect("modulus cache poisoned").insert(bits, modulus.clone());
    Ok(Field::with_modulus(modulus))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bitwise_mul(a: u64, b: u64) -> u128 {
        (0..64).filter(|i| b >> i & 1 == 1).fold(0u128, |acc, i| acc ^ ((a as u128) << i))
    }

    #[test]
    fn clmul_matches_shift_and_add() {
        let mut x = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..200 {
            let y = x.rotate_left(17) ^ 0xD6E8_FEB8_6659_FD93;
            assert_eq!(clmul64(x, y), bitwise_mul(x, y));
            x = x.wrapping_mul(0x2545_F491_4F6C_DD1D).wrapping_add(1);
        }
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let a: Vec<u64> = (0..97u64).map(|i| i.wrapping_mul(0x9E37_79B9_7F4A_7C15)).collect();
        let b: Vec<u64> = (0..61u64).map(|i| (i + 5).wrapping_mul(0xD6E8_FEB8_6659_FD93)).collect();
        let mut reference = vec![0u64; a.len() + b.len()];
        schoolbook(&a, &b, &mut reference);
        assert_eq!(mul_words(&a, &b), reference);
        let c: Vec<u64> = (0..200u64).map(|i| i.wrapping_mul(0xA076_1D64_78BD_642F)).collect();
        let mut reference = vec![0u64; 400];
        schoolbook(&c, &c, &mut reference);
        assert_eq!(mul_words(&c, &c), reference);
        let p = Poly::from_words(c);
        assert_eq!(p.square(), p.mul(&p));
    }

    #[test]
    fn order_of_two_small_primes() {
        assert_eq!(order_of_two(7), 3);
        assert_eq!(order_of_two(11), 10);
        assert_eq!(order_of_two(17), 8);
        assert_eq!(all_ones_degree(3), 4);
        assert_eq!(all_ones_degree(5), 10);
    }

    #[test]
    fn reductions_agree_with_long_division() {
        for modulus in [
            Modulus::Sparse { degree: 163, taps: vec![7, 6, 3] },
            Modulus::AllOnes { degree: all_ones_degree(150) },
            Modulus::Sparse { degree: 12, taps: vec![3] },
        ] {
            let field = Field::with_modulus(modulus.clone());
            let f = modulus.polynomial();
            let d = field.degree();
            let a = Poly::from_exponents(&(0..d).filter(|i| i % 3 == 0).collect::<Vec<_>>());
            let b = Poly::from_exponents(&(0..d).filter(|i| i % 5 != 1).collect::<Vec<_>>());
            assert_eq!(field.mul(&a, &b), a.mul(&b).rem(&f));
        }
    }
}
