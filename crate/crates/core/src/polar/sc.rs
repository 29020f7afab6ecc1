//! Successive-cancellation probability recursion.
//!
//! The engine walks the polar tree left to right. `probs[d]` holds the
//! likelihood pairs of the node currently active at depth `d` (length
//! `2^(n-d)`), `bits[d]` the re-encoded decisions below it. Pairs are kept
//! normalized by their larger entry, so the smaller entry stays accurate down
//! to the smallest positive double without a log domain.

use super::law::SideLaw;
use crate::error::{Error, Result};

fn norm(p: [f64; 2]) -> [f64; 2] {
    let m = p[0].max(p[1]);
    if m > 0.0 && m.is_finite() {
        [p[0] / m, p[1] / m]
    } else {
        [1.0, 1.0]
    }
}

#[derive(Clone, Debug)]
pub struct ScEngine {
    n: usize,
    probs: Vec<Vec<[f64; 2]>>,
    bits: Vec<Vec<u8>>,
    next: usize,
    cached: Option<[f64; 2]>,
}

impl ScEngine {
    /// `leaves[k]` is proportional to `[P(U_k=0|side_k), P(U_k=1|side_k)]`.
    pub fn new(leaves: Vec<[f64; 2]>) -> Result<Self> {
        let len = leaves.len();
        if !len.is_power_of_two() {
            return Err(Error::LengthNotPow2(len));
        }
        let n = len.trailing_zeros() as usize;
        let mut probs: Vec<Vec<[f64; 2]>> = (0..=n).map(|d| vec![[1.0; 2]; len >> d]).collect();
        probs[0] = leaves.into_iter().map(norm).collect();
        let bits = (0..=n).map(|d| vec![0u8; len >> d]).collect();
        Ok(ScEngine { n, probs, bits, next: 0, cached: None })
    }

    pub fn reset(&mut self, leaves: &[[f64; 2]]) -> Result<()> {
        if leaves.len() != self.len() {
            return Err(Error::LengthMismatch(format!(
                "{} leaves for block length {}",
                leaves.len(),
                self.len()
            )));
        }
        for (slot, &p) in self.probs[0].iter_mut().zip(leaves) {
            *slot = norm(p);
        }
        self.next = 0;
        self.cached = None;
        Ok(())
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index whose probability `peek` reports next.
    pub fn position(&self) -> usize {
        self.next
    }

    pub fn is_done(&self) -> bool {
        self.next == self.len()
    }

    fn combine(&mut self, depth: usize, right: bool) {
        let (upper, lower) = self.probs.split_at_mut(depth + 1);
        let src = &upper[depth];
        let dst = &mut lower[0];
        let half = src.len() / 2;
        let (a, b) = src.split_at(half);
        if right {
            let w = &self.bits[depth];
            for k in 0..half {
                let wk = w[k] as usize;
                dst[k] = norm([b[k][0] * a[k][wk], b[k][1] * a[k][wk ^ 1]]);
            }
        } else {
            for k in 0..half {
                dst[k] = norm([
                    a[k][0] * b[k][0] + a[k][1] * b[k][1],
                    a[k][0] * b[k][1] + a[k][1] * b[k][0],
                ]);
            }
        }
    }

    /// `[P(V^i=0 | earlier decisions, side), P(V^i=1 | ...)]` for the current index.
    pub fn peek(&mut self) -> [f64; 2] {
        assert!(!self.is_done(), "all indices already decided");
        if let Some(p) = self.cached {
            return p;
        }
        let i = self.next;
        let start = if i == 0 {
            0
        } else {
            let d = self.n - 1 - i.trailing_zeros() as usize;
            self.combine(d, true);
            d + 1
        };
        for d in start..self.n {
            self.combine(d, false);
        }
        let [a, b] = self.probs[self.n][0];
        let p = [a / (a + b), b / (a + b)];
        self.cached = Some(p);
        p
    }

    /// Fixes `V^i` for the current index and advances.
    pub fn set(&mut self, bit: u8) {
        self.peek();
        let i = self.next;
        let n = self.n;
        self.bits[n][0] = bit & 1;
        let mut d = n;
        while d > 0 {
            let len = 1usize << (n - d);
            let right = (i >> (n - d)) & 1 == 1;
            let (upper, lower) = self.bits.split_at_mut(d);
            let parent = &mut upper[d - 1];
            let child = &lower[0];
            if !right {
                parent[..len].copy_from_slice(child);
                break;
            }
            for k in 0..len {
                parent[k] ^= child[k];
                parent[len + k] = child[k];
            }
            d -= 1;
        }
        self.next += 1;
        self.cached = None;
    }

    /// The re-encoded sequence `transform(v)`, valid once every index is set.
    pub fn u_bits(&self) -> &[u8] {
        &self.bits[0]
    }
}

/// `P(V^i = 0 | prefix, side)` for a fresh block.
pub fn sc_probability(law: &SideLaw, side: &[usize], prefix: &[u8], index: usize) -> Result<f64> {
    if index >= side.len() || prefix.len() < index {
        return Err(Error::IndexRange { index, len: side.len() });
    }
    let mut engine = ScEngine::new(law.leaves(side)?)?;
    for &b in &prefix[..index] {
        engine.set(b);
    }
    Ok(engine.peek()[0])
}
