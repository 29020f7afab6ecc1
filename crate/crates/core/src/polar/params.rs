use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.25;

/// Block length and the polarization thresholds derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarParams {
    pub n: usize,
    pub len: usize,
    pub beta: f64,
    /// `2^{-N^beta}`
    pub delta_n: f64,
    /// `sqrt(2 ln 2) sqrt(N delta_n)`, the total-variation bound of the quantizer.
    pub delta1: f64,
    /// `N sqrt(delta_n + 2 delta1 (N - log2 delta1))`
    pub delta2: f64,
}

impl PolarParams {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n > 24 {
            return Err(Error::ParamRange(format!("log block length {n} exceeds 24")));
        }
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::ParamRange(format!("beta {beta} outside (0, 1/2)")));
        }
        let len = 1usize << n;
        let delta_n = (-(len as f64).powf(beta)).exp2();
        let delta1 = (2.0 * std::f64::consts::LN_2).sqrt() * (len as f64 * delta_n).sqrt();
        let delta2 = len as f64 * (delta_n + 2.0 * delta1 * (len as f64 - delta1.log2())).sqrt();
        Ok(PolarParams { n, len, beta, delta_n, delta1, delta2 })
    }

    pub fn from_len(len: usize, beta: f64) -> Result<Self> {
        if !len.is_power_of_two() {
            return Err(Error::LengthNotPow2(len));
        }
        Self::new(len.trailing_zeros() as usize, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_at_1024() {
        let p = PolarParams::new(10, 0.25).unwrap();
        assert_eq!(p.len, 1024);
        let expect = 2f64.powf(-(1024f64).powf(0.25));
        assert!((p.delta_n - expect).abs() < 1e-15);
        assert!(p.delta_n > 0.0 && p.delta_n < 0.5);
        assert!((p.delta1 - (2.0 * 2f64.ln() * 1024.0 * expect).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(PolarParams::new(4, 0.5).is_err());
        assert!(PolarParams::new(4, 0.0).is_err());
        assert!(matches!(PolarParams::from_len(12, 0.2), Err(Error::LengthNotPow2(12))));
    }
}
