//! Bernoulli numbers, computed exactly once and cached as `f64` ratios.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Largest j for which B_{2j}/(2j)! is tabulated.
pub const MAX_J: usize = 80;

/// Exact B_0..B_n by the Akiyama–Tanigawa algorithm (B_1 = +1/2 convention,
/// irrelevant here since only even indices are used).
pub fn bernoulli_exact(n: usize) -> Vec<BigRational> {
    let mut a: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(BigRational::new(BigInt::one(), BigInt::from(m as u64 + 1)));
        for j in (1..=m).rev() {
            let diff = &a[j - 1] - &a[j];
            a[j - 1] = diff * BigRational::from_integer(BigInt::from(j as u64));
        }
        out.push(a[0].clone());
    }
    out
}

/// `b[j] = B_{2j}/(2j)!` for j = 0..=MAX_J (b[0] = 1).
pub fn b2j_over_factorial() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let b = bernoulli_exact(2 * MAX_J);
        let mut fact = BigInt::one();
        let mut out = Vec::with_capacity(MAX_J + 1);
        for (i, bi) in b.iter().enumerate() {
            if i > 0 {
                fact *= BigInt::from(i as u64);
            }
            if i % 2 == 0 {
                let r = bi / BigRational::from_integer(fact.clone());
                out.push(ratio_to_f64(&r));
            }
        }
        out
    })
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Scale into range before dividing so tiny values keep full precision.
    let num = r.numer();
    let den = r.denom();
    let shift = den.bits() as i64 - num.bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(num.clone() << (shift as usize + 64), den.clone())
    } else {
        BigRational::new(num.clone() << 64usize, den.clone())
    };
    let q = scaled.to_integer().to_f64().unwrap_or(f64::NAN);
    // Rounding of the integer part is below 2^-60 relative.
    q * 2f64.powi(-(64 + shift.max(0) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let b = bernoulli_exact(12);
        let as_f = |i: usize| b[i].to_f64().unwrap();
        assert_eq!(as_f(2), 1.0 / 6.0);
        assert_eq!(as_f(4), -1.0 / 30.0);
        assert!((as_f(12) + 691.0 / 2730.0).abs() < 1e-15);
        assert_eq!(as_f(7), 0.0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn ratios_match_zeta_formula() {
        // B_{2j}/(2j)! = (−1)^{j+1} 2 ζ(2j)/(2π)^{2j}
        let t = b2j_over_factorial();
        assert_eq!(t[0], 1.0);
        for j in 1..=MAX_J {
            let e = 2 * j as i32;
            // Direct sum plus the midpoint-rule tail ∫_{N+½}^∞ x^{−2j} dx.
            let zeta: f64 = (1..2000).rev().map(|n| (n as f64).powi(-e)).sum::<f64>()
                + 1999.5f64.powi(1 - e) / (e - 1) as f64;
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let expect = sign * 2.0 * zeta / (2.0 * std::f64::consts::PI).powi(2 * j as i32);
            let tol = if j == 1 { 1e-9 } else { 1e-13 };
            assert!(((t[j] - expect) / expect).abs() < tol, "j={j}: {} vs {expect}", t[j]);
        }
    }
}
