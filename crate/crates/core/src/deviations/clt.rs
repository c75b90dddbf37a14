//! Central limit statistics for log|L(½+it)|.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::deviations::tail::normaliser;
use crate::error::{Error, Result};
use crate::lfunc::grid::CriticalLineGrid;
use crate::moments::quadrature::ordered_sum;

pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub samples: usize,
    pub t: f64,
    /// Mean of log|L| / √(½ log log T).
    pub mean: f64,
    /// Variance of log|L| / √(½ log log T).
    pub variance: f64,
    /// Variance of log|L| itself.
    pub raw_variance: f64,
    /// ½ log log T.
    pub expected_variance: f64,
    /// Kolmogorov–Smirnov distance of the normalised sample to N(0, 1).
    pub ks: f64,
}

/// Moments and KS distance of `log_values / √(½ log log T)`.
pub fn clt_statistics(log_values: &[f64], t: f64) -> Result<CltReport> {
    let n = log_values.len();
    if n < MIN_SAMPLES {
        return Err(Error::Statistics(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    if !(t > std::f64::consts::E.exp()) {
        return Err(Error::Domain(format!("need log log T > 1, got T = {t}")));
    }
    let s = normaliser(t);
    let nf = n as f64;
    let raw_mean = ordered_sum(log_values.iter().copied()) / nf;
    let raw_variance = ordered_sum(log_values.iter().map(|v| (v - raw_mean).powi(2))) / (nf - 1.0);
    let mut z: Vec<f64> = log_values.iter().map(|v| v / s).collect();
    z.sort_by(f64::total_cmp);
    let normal = Normal::standard();
    let mut ks: f64 = 0.0;
    for (i, x) in z.iter().enumerate() {
        let f = normal.cdf(*x);
        ks = ks.max((f - i as f64 / nf).abs()).max(((i + 1) as f64 / nf - f).abs());
    }
    Ok(CltReport {
        samples: n,
        t,
        mean: raw_mean / s,
        variance: raw_variance / (s * s),
        raw_variance,
        expected_variance: s * s,
        ks: ks.min(1.0),
    })
}

/// [`clt_statistics`] on a grid, normalised at T = `t`.
pub fn selberg_clt_test(grid: &CriticalLineGrid, t: f64) -> Result<CltReport> {
    clt_statistics(&grid.values, t)
}
