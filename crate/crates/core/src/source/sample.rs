use rand::Rng as _;

use super::joint::JointSource;
use crate::error::{Error, Result};
use crate::seed;

/// One block of `N` i.i.d. source observations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleBlock {
    pub index: usize,
    pub x: Vec<u8>,
    /// `y[j]` is participant `j+1`'s sequence.
    pub y: Vec<Vec<u8>>,
    pub seed: u64,
}

impl SampleBlock {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Draws `blocks` blocks of `len` i.i.d. observations; block `i` uses the
/// sub-stream `("source", i)` of `seed`.
pub fn sample(source: &JointSource, len: usize, blocks: usize, seed: u64) -> Result<Vec<SampleBlock>> {
    if !len.is_power_of_two() {
        return Err(Error::LengthNotPow2(len));
    }
    let mut cdf = Vec::with_capacity(source.pmf().len());
    let mut acc = 0.0;
    for &p in source.pmf() {
        acc += p;
        cdf.push(acc);
    }
    let j = source.participants();
    Ok((0..blocks)
        .map(|b| {
            let mut rng = seed::stream(seed, "source", b as u64);
            let mut x = Vec::with_capacity(len);
            let mut y = vec![Vec::with_capacity(len); j];
            for _ in 0..len {
                let r: f64 = rng.gen::<f64>() * acc;
                let idx = cdf.partition_point(|&c| c <= r).min(cdf.len() - 1);
                let (xv, ys) = source.atom(idx);
                x.push(xv);
                for (k, v) in ys.into_iter().enumerate() {
                    y[k].push(v);
                }
            }
            SampleBlock { index: b, x, y, seed }
        })
        .collect())
}
