use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

use crate::error::{Error, Result};

/// Distance of an empirical secret distribution from uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub secret_bits: usize,
    pub trials: usize,
    /// plug-in total variation distance
    pub tv_plugin: f64,
    /// expected plug-in distance for exactly uniform secrets of this size
    pub tv_null: f64,
    /// `max(0, tv_plugin - tv_null)`
    pub tv_debiased: f64,
    pub chi_square: f64,
    pub p_value: f64,
}

/// `E|B/n - p|` for `B ~ Binomial(n, p)`, summed over the support.
pub fn binomial_mean_abs_deviation(n: usize, p: f64) -> f64 {
    let dist = Binomial::new(p, n as u64).expect("valid binomial parameters");
    let mean = n as f64 * p;
    (0..=n as u64).map(|k| dist.pmf(k) * (k as f64 - mean).abs()).sum::<f64>() / n as f64
}

pub fn uniformity(secrets: &[u64], secret_bits: usize) -> Result<UniformityReport> {
    if secret_bits == 0 || secret_bits > 20 {
        return Err(Error::ParamRange(format!("{secret_bits} secret bits for a histogram")));
    }
    if secrets.is_empty() {
        return Err(Error::ParamRange("no secrets to test".into()));
    }
    let cells = 1usize << secret_bits;
    let mut counts = vec![0usize; cells];
    for &s in secrets {
        let cell = usize::try_from(s).ok().filter(|&c| c < cells).ok_or_else(|| {
            Error::ParamRange(format!("secret {s} exceeds {secret_bits} bits"))
        })?;
        counts[cell] += 1;
    }
    let n = secrets.len() as f64;
    let p = 1.0 / cells as f64;
    let tv_plugin = 0.5 * counts.iter().map(|&c| (c as f64 / n - p).abs()).sum::<f64>();
    let tv_null = 0.5 * cells as f64 * binomial_mean_abs_deviation(secrets.len(), p);
    let expected = n * p;
    let chi_square = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>();
    let p_value = 1.0 - ChiSquared::new((cells - 1) as f64).expect("positive degrees of freedom").cdf(chi_square);
    Ok(UniformityReport {
        secret_bits,
        trials: secrets.len(),
        tv_plugin,
        tv_null,
        tv_debiased: (tv_plugin - tv_null).max(0.0),
        chi_square,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_choose(n: usize, k: usize) -> f64 {
        (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
    }

    #[test]
    fn mean_abs_deviation_matches_de_moivre() {
        for &(n, p) in &[(10usize, 0.3f64), (1000, 1.0 / 256.0), (10_000, 1.0 / 256.0)] {
            let m = (n as f64 * p).floor() as usize + 1;
            let closed = 2.0
                * m as f64
                * (ln_choose(n, m) + m as f64 * p.ln() + (n - m + 1) as f64 * (1.0 - p).ln()).exp()
                / n as f64;
            assert!((binomial_mean_abs_deviation(n, p) - closed).abs() < 1e-9 * closed.max(1.0));
        }
    }

    #[test]
    fn perfectly_balanced_histogram() {
        let secrets: Vec<u64> = (0..1024).map(|i| i % 4).collect();
        let r = uniformity(&secrets, 2).unwrap();
        assert_eq!(r.tv_plugin, 0.0);
        assert_eq!(r.chi_square, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }
}
