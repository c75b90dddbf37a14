//! Smoothed prime weights 𝚲_x(n) and the truncated-exponential lemma.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::primes::prime_power;
use crate::arith::satake::{lambda_pi, SatakeSpec};
use crate::error::{Error, Result};
use crate::Complex64;

/// log(x/n) / (n^{1/log x} log x), at most 1 on 1 ≤ n ≤ x.
#[inline]
pub fn smoothing_factor(x: f64, n: f64) -> f64 {
    let lx = x.ln();
    let ln = n.ln();
    (lx - ln) / lx * (-ln / lx).exp()
}

/// 𝚲_x(n) = Σ_j k_j Λ_{π_j}(n)/log n · log(x/n)/(n^{1/log x} log x).
pub fn smoothed_lambda(x: f64, n: u64, k: &[f64], specs: &[SatakeSpec<f64>]) -> Result<Complex64> {
    if n < 2 || n as f64 > x {
        return Err(Error::Domain(format!("smoothed weight needs 2 <= n <= x, got n = {n}, x = {x}")));
    }
    if prime_power(n).is_none() {
        return Ok(Complex::new(0.0, 0.0));
    }
    let mut acc = Complex::new(0.0, 0.0);
    for (kj, s) in k.iter().zip(specs) {
        acc += lambda_pi(s, n)? * *kj;
    }
    Ok(acc / (n as f64).ln() * smoothing_factor(x, n as f64))
}

/// Σ_j k_j m_j, the GRC bound on |𝚲_x(p)|.
pub fn weight_bound(k: &[f64], specs: &[SatakeSpec<f64>]) -> f64 {
    k.iter().zip(specs).map(|(k, s)| k * s.degree() as f64).sum()
}

/// |Σ_{j≤J} D^j/j!|² and the tail-driven excess exp(2 Re D)/|·|² − 1.
fn truncated_parts(d: Complex64, terms: usize) -> (Complex64, Complex64) {
    // Head and tail accumulated separately so the excess is not lost to
    // cancellation when it is far below machine epsilon.
    let mut head = Complex::new(0.0, 0.0);
    let mut comp = Complex::new(0.0, 0.0);
    let mut term = Complex::new(1.0, 0.0);
    for j in 0..=terms {
        if j > 0 {
            term = term * d / j as f64;
        }
        let y = term - comp;
        let t = head + y;
        comp = (t - head) - y;
        head = t;
    }
    let mut tail = Complex::new(0.0, 0.0);
    let mut j = terms + 1;
    loop {
        term = term * d / j as f64;
        tail += term;
        if term.norm() <= 1e-18 * tail.norm() || term.norm() == 0.0 || j > terms + 2000 {
            break;
        }
        j += 1;
    }
    (head, tail)
}

/// exp(2 Re D)/|Σ_{j≤10V} D^j/j!|² − 1, accurate even when tiny.
pub fn truncation_excess(d: Complex64, v: f64) -> Result<f64> {
    if !(v >= 0.0 && d.norm() <= v) {
        return Err(Error::Precondition(format!("truncation lemma needs |D| <= V, got |D| = {}, V = {v}", d.norm())));
    }
    let terms = (10.0 * v).floor() as usize;
    let (s, r) = truncated_parts(d, terms);
    // |S + R|²/|S|² − 1
    Ok((2.0 * (s * r.conj()).re + r.norm_sqr()) / s.norm_sqr())
}

pub fn truncation_ratio(d: Complex64, v: f64) -> Result<f64> {
    Ok(1.0 + truncation_excess(d, v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationCase {
    pub d: Complex64,
    pub v: f64,
    pub excess: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `count` random cases with |D| ≤ V ≤ `v_max`, from a fixed seed.
pub fn truncation_suite(seed: u64, count: usize, v_max: f64) -> Result<Vec<TruncationCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: f64 = rng.gen_range(0.0..v_max);
            let r: f64 = v * rng.gen::<f64>().sqrt();
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let d = Complex::from_polar(r, phi);
            let excess = truncation_excess(d, v)?;
            let bound = 2.0 * (-9.0 * v).exp();
            Ok(TruncationCase { d, v, excess, bound, pass: excess.abs() <= bound })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lambda_examples() {
        let z = [SatakeSpec::zeta()];
        let x = 10f64.exp();
        let v = smoothed_lambda(x, 2, &[1.0], &z).unwrap();
        // (1 − log 2/10)·2^{−1/10}
        assert!((v.re - 0.868_360_072_791_492_4).abs() < 1e-14, "{v}");
        assert_eq!(smoothed_lambda(x, 6, &[1.0], &z).unwrap(), Complex::new(0.0, 0.0));
        assert_eq!(smoothed_lambda(7.0, 7, &[1.0], &z).unwrap().norm(), 0.0);
        assert!(smoothed_lambda(5.0, 7, &[1.0], &z).is_err());
        // Λ(p²)/log p² = 1/2 for ζ.
        let sq = smoothed_lambda(1e6, 9, &[1.0], &z).unwrap().re;
        assert!((sq - 0.5 * smoothing_factor(1e6, 9.0)).abs() < 1e-15);
    }

    #[test]
    fn truncation_examples() {
        assert_eq!(truncation_ratio(Complex::new(0.0, 0.0), 0.0).unwrap(), 1.0);
        assert_eq!(truncation_ratio(Complex::new(0.0, 0.0), 3.0).unwrap(), 1.0);
        let r = truncation_ratio(Complex::new(2.0, 0.0), 2.0).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
        assert!(truncation_ratio(Complex::new(2.0, 0.0), 1.0).is_err());
        // Direct comparison where the excess is visible in double precision.
        let d: Complex64 = Complex::new(0.3, 0.2);
        let s = Complex::new(1.0, 0.0) + d + d * d / 2.0 + d * d * d / 6.0;
        let want = (2.0 * d.re).exp() / s.norm_sqr() - 1.0;
        assert!(truncation_excess(d, 0.3).is_err());
        assert!((truncation_excess(d, 0.37).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn seeded_suite_passes() {
        let cases = truncation_suite(7, 200, 10.0).unwrap();
        assert!(cases.iter().all(|c| c.pass), "{:?}", cases.iter().find(|c| !c.pass));
        assert_eq!(cases, truncation_suite(7, 200, 10.0).unwrap());
    }

    proptest! {
        #[test]
        fn weight_factor_at_most_one(x in 2.0f64..1e8, u in 0.0f64..1.0) {
            let n = 1.0 + u * (x - 1.0);
            let f = smoothing_factor(x, n);
            prop_assert!((0.0..=1.0 + 1e-15).contains(&f));
        }

        #[test]
        fn truncation_bound(v in 0.0f64..10.0, u in 0.0f64..1.0, phi in 0.0f64..6.3) {
            let d = Complex::from_polar(v * u, phi);
            let e = truncation_excess(d, v).unwrap();
            prop_assert!(e.abs() <= 2.0 * (-9.0 * v).exp());
        }
    }
}
