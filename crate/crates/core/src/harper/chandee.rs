//! Empirical audit of the majorant
//! log|L(½+it)| ≤ Re Σ_{n≤x, n=p,p²} 𝚲_x(n) n^{−½−it} + m log T/log x + O(1).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::primes::{prime_power, sieve_primes};
use crate::error::{Error, Result};
use crate::harper::weights::smoothed_lambda;
use crate::lfunc::grid::CriticalLineGrid;
use crate::lfunc::powersum::{eval_grid, Kernel, PowerSum};

/// |prime-square part| above this marks t as exceptional.
pub const EXCEPTIONAL_THRESHOLD: f64 = 1.0;

const QUANTILES: [f64; 7] = [0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99];

/// m log T / log x.
pub fn majorant_constant(m: f64, t: f64, x: f64) -> f64 {
    m * t.ln() / x.ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChandeeReport {
    pub t: f64,
    pub x: f64,
    /// e² ≤ x ≤ T², the range where the lemma is stated.
    pub x_in_lemma_range: bool,
    /// Σ k_i m_i log T / log x.
    pub additive: f64,
    pub samples: usize,
    pub clamped: usize,
    pub min: f64,
    pub mean: f64,
    /// (level, slack quantile).
    pub quantiles: Vec<(f64, f64)>,
    /// −min slack: the smallest constant that makes the bound hold on the grid.
    pub c_emp: f64,
    pub t_at_min: f64,
    /// Fraction of samples whose prime-square part exceeds the threshold.
    pub exceptional_fraction: f64,
}

/// Slack of the majorant on every sample of a log|L| grid. T is taken as the
/// grid's left end; x must satisfy 2 ≤ x ≤ T².
pub fn chandee_audit(grid: &CriticalLineGrid, x: f64) -> Result<ChandeeReport> {
    let t = grid.spec.t0;
    if !(x >= 2.0 && x <= t * t) {
        return Err(Error::Domain(format!("need 2 <= x <= T^2, got x = {x}, T = {t}")));
    }
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let sk = grid.id.satake()?;
    let specs: Vec<_> = sk.iter().map(|p| p.0.clone()).collect();
    let k: Vec<f64> = sk.iter().map(|p| p.1).collect();
    let additive: f64 = sk.iter().map(|(s, k)| majorant_constant(k * s.degree() as f64, t, x)).sum();

    let mut full = PowerSum::new();
    let mut squares = PowerSum::new();
    for p in sieve_primes(x.floor() as u64)?.iter() {
        let mut n = p;
        while n as f64 <= x {
            let (_, l) = prime_power(n).expect("prime power");
            if l > 2 {
                break;
            }
            let w = smoothed_lambda(x, n, &k, &specs)?;
            let nf = n as f64;
            full.push(nf.ln(), w / nf.sqrt());
            if l == 2 {
                squares.push(nf.ln(), w / nf.sqrt());
            }
            match n.checked_mul(p) {
                Some(m) => n = m,
                None => break,
            }
        }
    }
    let count = grid.len();
    let sums = eval_grid(&full, t, grid.spec.step, count, Kernel::Auto);
    let sq = eval_grid(&squares, t, grid.spec.step, count, Kernel::Auto);
    let slack: Vec<f64> = sums.iter().zip(&grid.values).map(|(s, v)| s.re + additive - v).collect();
    let exceptional = sq.iter().filter(|z: &&Complex<f64>| z.re.abs() > EXCEPTIONAL_THRESHOLD).count();

    let (imin, min) = slack
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let mean = crate::moments::quadrature::ordered_sum(slack.iter().copied()) / count as f64;
    let mut sorted = slack;
    sorted.sort_by(f64::total_cmp);
    let quantiles = QUANTILES
        .iter()
        .map(|&q| (q, sorted[((q * (count - 1) as f64).round() as usize).min(count - 1)]))
        .collect();
    Ok(ChandeeReport {
        t,
        x,
        x_in_lemma_range: x >= std::f64::consts::E.powi(2),
        additive,
        samples: count,
        clamped: grid.clamped.len(),
        min,
        mean,
        quantiles,
        c_emp: -min,
        t_at_min: grid.t(imin),
        exceptional_fraction: exceptional as f64 / count as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunc::grid::GridSpec;
    use crate::lfunc::id::LFunctionId;

    #[test]
    fn additive_term_identity() {
        let (m, t, x) = (2.0, 1e5, 30.0);
        let diff = majorant_constant(m, t, x) - majorant_constant(m, t, 2.0 * x);
        let want = m * t.ln() * (1.0 / x.ln() - 1.0 / (2.0 * x).ln());
        assert!((diff - want).abs() < 1e-12);
    }

    #[test]
    fn clamped_point_has_large_slack() {
        // Put a sample on the clamp floor by hand.
        let spec = GridSpec::new(1000.0, 1010.0, 0.5).unwrap();
        let mut values = vec![0.0; spec.len()];
        values[4] = -1e3;
        let g = CriticalLineGrid::from_raw(LFunctionId::Zeta, spec, values, -40.0, 1e-8);
        let r = chandee_audit(&g, 50.0).unwrap();
        assert_eq!(r.clamped, 1);
        let top = r.quantiles.last().unwrap().1;
        assert!(top > 40.0, "{r:?}");
        assert!(r.x_in_lemma_range);
        assert!(chandee_audit(&g, 1.5).is_err());
    }
}
