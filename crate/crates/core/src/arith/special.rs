//! E₁ and the prime sums of Selberg orthogonality.

use num_complex::Complex;
use serde::Serialize;

use crate::arith::primes::sieve_primes;
use crate::arith::satake::SatakeSpec;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Meissel–Mertens constant: Σ_{p≤x} 1/p − log log x → M.
pub const MERTENS: f64 = 0.261_497_212_847_642_8;

const E1_SWITCH: f64 = 5.0;

/// E₁(x) = ∫_x^∞ e^{−t}/t dt.
///
/// Below the switch point the convergent series
/// `−γ − log x − Σ_{k≥1} (−x)^k/(k·k!)` is summed with compensation; above it
/// the continued fraction `e^{−x}/(x+1− 1/(x+3− 4/(x+5−…)))` is evaluated by
/// the modified Lentz method.
pub fn exp_integral_e1<S: Real>(x: S) -> Result<S> {
    if !(x > S::zero()) {
        return domain(format!("E1 needs x > 0, got {x}"));
    }
    let eps = S::epsilon();
    if x <= S::lit(E1_SWITCH) {
        let mut sum = S::zero();
        let mut comp = S::zero();
        let mut term = S::one(); // (−x)^k / k!
        let mut k = 1usize;
        loop {
            let kk = S::from_usize_lossy(k);
            term = term * (-x) / kk;
            let add = term / kk;
            let y = add - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            if add.abs() <= eps * sum.abs() * S::lit(1e-3) || k > 200 {
                break;
            }
            k += 1;
        }
        Ok(-S::lit(EULER_GAMMA) - x.ln() - sum)
    } else {
        let tiny = S::min_positive_value() / eps;
        let mut b = x + S::one();
        let mut c = S::one() / tiny;
        let mut d = S::one() / b;
        let mut h = d;
        for i in 1..10_000usize {
            let ii = S::from_usize_lossy(i);
            let a = -ii * ii;
            b += S::lit(2.0);
            d = S::one() / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - S::one()).abs() <= eps {
                return Ok(h * (-x).exp());
            }
        }
        Err(Error::Accuracy { target: eps.as_f64(), achieved: f64::NAN })
    }
}

/// Σ_{p≤x} a_π(p)·conj(a_π′(p))/p together with its offset from log log x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelbergSum {
    pub x: f64,
    pub sum: Complex<f64>,
    pub log_log_x: f64,
    /// `sum − log log x`; meaningful when both specs are the same.
    pub residual: Complex<f64>,
    pub same_spec: bool,
}

pub fn selberg_sum<S: Real>(spec1: &SatakeSpec<S>, spec2: &SatakeSpec<S>, x: f64) -> Result<SelbergSum> {
    if !(x >= 3.0) {
        return domain(format!("selberg_sum needs x >= 3, got {x}"));
    }
    let table = sieve_primes(x.floor() as u64 + 1)?;
    spec1.covers(table.iter())?;
    spec2.covers(table.iter())?;
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let mut sum = Complex::new(0.0f64, 0.0);
    let mut comp = Complex::new(0.0f64, 0.0);
    for p in table.iter() {
        spec1.alphas_into(p, &mut a1)?;
        spec2.alphas_into(p, &mut a2)?;
        let s1: Complex<S> = a1.iter().copied().fold(Complex::new(S::zero(), S::zero()), |a, b| a + b);
        let s2: Complex<S> = a2.iter().copied().fold(Complex::new(S::zero(), S::zero()), |a, b| a + b);
        let v = s1 * s2.conj();
        let term = Complex::new(v.re.as_f64(), v.im.as_f64()) / p as f64;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let ll = x.ln().ln();
    Ok(SelbergSum {
        x,
        sum,
        log_log_x: ll,
        residual: sum - ll,
        same_spec: spec1.label() == spec2.label(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::characters::DirichletCharacter;
    use crate::arith::satake::satake_from_character;

    /// ∫_x^∞ e^{−t}/t dt by Gauss–Legendre panels on t = x + u/(1−u).
    fn e1_quadrature(x: f64) -> f64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let f = |u: f64| {
            let t = x + u / (1.0 - u);
            (-t).exp() / t / (1.0 - u).powi(2)
        };
        let panels = 20_000;
        let h = 1.0 / panels as f64;
        let mut s = 0.0;
        for i in 0..panels {
            let a = i as f64 * h;
            for &(z, w) in &nodes {
                s += w * f(a + 0.5 * h * (z + 1.0)) * 0.5 * h;
            }
        }
        s
    }

    #[test]
    fn e1_against_quadrature() {
        for x in [0.1, 1.0, 2.5, 4.9, 5.0, 5.1, 7.0, 10.0, 30.0] {
            let q = e1_quadrature(x);
            let v = exp_integral_e1(x).unwrap();
            assert!(((v - q) / q).abs() < 1e-12, "x={x}: {v} vs {q}");
        }
        assert!((exp_integral_e1(1.0f64).unwrap() - 0.219_383_9).abs() < 1e-7);
        assert!((exp_integral_e1(10.0f64).unwrap() - 4.1570e-6).abs() < 1e-9);
    }

    #[test]
    fn e1_branches_overlap_at_switch() {
        // Evaluate both branches at the same points near x = 5.
        for x in [4.5f64, 5.0, 5.5] {
            let series = {
                let mut s = 0.0;
                let mut term = 1.0;
                for k in 1..120 {
                    term *= -x / k as f64;
                    s += term / k as f64;
                }
                -EULER_GAMMA - x.ln() - s
            };
            let cf = exp_integral_e1(x + 1e-300).unwrap();
            let cf_branch = if x > E1_SWITCH { cf } else { exp_integral_e1(x).unwrap() };
            assert!(((series - cf_branch) / cf_branch).abs() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn e1_small_argument_and_domain() {
        let x = 1e-6f64;
        assert!((exp_integral_e1(x).unwrap() + x.ln() + EULER_GAMMA).abs() < 2e-6);
        assert!(exp_integral_e1(0.0f64).is_err());
        assert!((exp_integral_e1(1.0f32).unwrap() - 0.219_383_9).abs() < 1e-5);
    }

    #[test]
    fn selberg_small() {
        let z = SatakeSpec::<f64>::zeta();
        let s = selberg_sum(&z, &z, 3.0).unwrap();
        assert!((s.sum.re - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
        assert!(s.same_spec);
        let chi = satake_from_character(&DirichletCharacter::<f64>::new(4, 1).unwrap());
        let c = selberg_sum(&z, &chi, 1e5).unwrap();
        assert!(c.sum.norm() <= 1.0);
        assert!(!c.same_spec);
        assert!(selberg_sum(&z, &z, 2.0).is_err());
    }
}
