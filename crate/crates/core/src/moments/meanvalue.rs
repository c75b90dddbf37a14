//! Mean values of Dirichlet polynomials over [T, 2T], computed by
//! quadrature and compared with their diagonal predictions.

use serde::{Deserialize, Serialize};

use crate::arith::primes::{gcd, sieve_primes};
use crate::error::{Error, Result};
use crate::lfunc::powersum::{eval_grid, Kernel, PowerSum};
use crate::moments::quadrature::{simpson_stream, Quad};
use crate::Complex64;

/// Quadrature step in t. The integrands oscillate at frequencies up to
/// ℓ·ln N, which stays below 15 for every supported input.
pub const MV_STEP: f64 = 0.02;

fn mean_over(t: f64, power: impl Fn(&[Complex64]) -> Vec<f64> + Sync, polys: &[PowerSum]) -> Quad {
    let intervals = (t / MV_STEP).round() as usize;
    let h = t / intervals as f64;
    let q = simpson_stream(intervals, h, |start, len| {
        let t0 = t + start as f64 * h;
        let vals: Vec<Vec<Complex64>> = polys.iter().map(|p| eval_grid(p, t0, h, len, Kernel::Auto)).collect();
        let mut out = Vec::with_capacity(len);
        let mut buf = vec![Complex64::new(0.0, 0.0); polys.len()];
        for i in 0..len {
            for (b, v) in buf.iter_mut().zip(&vals) {
                *b = v[i];
            }
            out.extend(power(&buf));
        }
        out
    });
    Quad { value: q.value / t, error: q.error / t }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValueReport {
    pub n: usize,
    pub t: f64,
    /// (1/T)∫_T^{2T} |Σ a_n n^{−it}|² dt.
    pub mean: f64,
    pub quad_error: f64,
    /// Σ |a_n|².
    pub diagonal: f64,
    pub deviation: f64,
}

/// Mean square of Σ_{n≤N} a_n n^{−it} over [T, 2T]; `coeffs[n−1] = a_n`.
pub fn mv_check(coeffs: &[Complex64], t: f64) -> Result<MeanValueReport> {
    let n = coeffs.len();
    if n == 0 || !(t >= n as f64) {
        return Err(Error::Precondition(format!("mean value check needs 1 <= N <= T, got N = {n}, T = {t}")));
    }
    let ps = PowerSum::dirichlet(coeffs, 0.0);
    let q = mean_over(t, |v| vec![v[0].norm_sqr()], std::slice::from_ref(&ps));
    let diagonal: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let deviation = if diagonal > 0.0 { (q.value / diagonal - 1.0).abs() } else { q.value };
    Ok(MeanValueReport { n, t, mean: q.value, quad_error: q.error, diagonal, deviation })
}

/// A Dirichlet polynomial given by its nonzero terms (n, a_n).
pub type SparsePoly = Vec<(u64, Complex64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoprimeReport {
    /// Length of the product polynomial (largest n in its support).
    pub n: u64,
    pub t: f64,
    pub factor_means: Vec<f64>,
    pub product_mean: f64,
    pub ratio: f64,
    /// N log N / T.
    pub scale: f64,
}

impl CoprimeReport {
    /// |ratio − 1| within c·N log N / T.
    pub fn within(&self, c: f64) -> bool {
        (self.ratio - 1.0).abs() < c * self.scale
    }
}

fn to_powersum(p: &SparsePoly) -> PowerSum {
    let mut ps = PowerSum::with_capacity(p.len());
    for &(n, a) in p {
        ps.push((n as f64).ln(), a);
    }
    ps
}

/// Mean of |∏ D_j|² over [T, 2T] divided by ∏ of the means of |D_j|².
pub fn coprime_factorization_check(polys: &[SparsePoly], t: f64) -> Result<CoprimeReport> {
    if polys.is_empty() || polys.iter().any(|p| p.is_empty()) {
        return Err(Error::Domain("coprime check needs nonempty polynomials".into()));
    }
    for p in polys {
        if p.iter().any(|&(n, _)| n == 0) {
            return Err(Error::Domain("polynomial support must be positive integers".into()));
        }
    }
    for (i, p) in polys.iter().enumerate() {
        for r in &polys[i + 1..] {
            for &(m, _) in p {
                for &(n, _) in r {
                    if gcd(m, n) != 1 {
                        return Err(Error::Domain(format!("supports not coprime: gcd({m}, {n}) > 1")));
                    }
                }
            }
        }
    }
    let n: u64 = polys.iter().map(|p| p.iter().map(|x| x.0).max().unwrap_or(1)).product();
    if !(n as f64 <= t / 10.0) {
        return Err(Error::Precondition(format!("product length {n} exceeds T/10 = {}", t / 10.0)));
    }
    let sums: Vec<PowerSum> = polys.iter().map(to_powersum).collect();
    let factor_means: Vec<f64> =
        sums.iter().map(|s| mean_over(t, |v| vec![v[0].norm_sqr()], std::slice::from_ref(s)).value).collect();
    let product_mean = mean_over(t, |v| vec![v.iter().product::<Complex64>().norm_sqr()], &sums).value;
    let ratio = product_mean / factor_means.iter().product::<f64>();
    let nf = n.max(2) as f64;
    Ok(CoprimeReport { n, t, factor_means, product_mean, ratio, scale: nf * nf.ln() / t })
}

/// The product configurations exercised by the lemma suite.
pub fn coprime_suite_configs() -> Vec<Vec<SparsePoly>> {
    let one = Complex64::new(1.0, 0.0);
    let poly = |ns: &[u64]| -> SparsePoly { ns.iter().map(|&n| (n, one)).collect() };
    vec![
        vec![poly(&[1, 2, 4, 8, 16, 32])],
        vec![poly(&[1, 2, 4, 8, 16]), poly(&[1, 3])],
        vec![poly(&[1, 2, 4]), poly(&[1, 3]), poly(&[1, 5])],
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighMomentReport {
    pub n: u64,
    pub ell: u32,
    pub t: f64,
    /// ∫_T^{2T} |Σ_{p≤N} a(p) p^{−1/2−it}|^{2ℓ} dt.
    pub lhs: f64,
    /// T ℓ! (Σ |a(p)|²/p)^ℓ.
    pub bound: f64,
    pub ratio: f64,
}

/// `a(p)` for each prime p ≤ N, in increasing order of p.
pub fn high_moment_check(a: &[Complex64], n: u64, ell: u32, t: f64) -> Result<HighMomentReport> {
    if ell == 0 {
        return Err(Error::Domain("moment order must be positive".into()));
    }
    if !((n as f64).powi(ell as i32) <= t) {
        return Err(Error::Precondition(format!("N^l = {n}^{ell} exceeds T = {t}")));
    }
    let primes: Vec<u64> = sieve_primes(n.max(2))?.iter().filter(|&p| p <= n).collect();
    if a.len() != primes.len() {
        return Err(Error::Domain(format!("expected {} prime coefficients up to {n}, got {}", primes.len(), a.len())));
    }
    let mut ps = PowerSum::with_capacity(a.len());
    let mut mass = 0.0;
    for (&p, &c) in primes.iter().zip(a) {
        let pf = p as f64;
        ps.push(pf.ln(), c / pf.sqrt());
        mass += c.norm_sqr() / pf;
    }
    let lhs = mean_over(t, |v| vec![v[0].norm_sqr().powi(ell as i32)], std::slice::from_ref(&ps)).value * t;
    let fact: f64 = (1..=ell).map(|i| i as f64).product();
    let bound = t * fact * mass.powi(ell as i32);
    let ratio = if bound > 0.0 { lhs / bound } else { 0.0 };
    Ok(HighMomentReport { n, ell, t, lhs, bound, ratio })
}
