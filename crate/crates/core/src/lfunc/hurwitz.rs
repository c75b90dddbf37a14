//! Euler–Maclaurin evaluation of ζ(s, α) and the character combinations
//! built on it.
//!
//! With N = M + α,
//!
//! ```text
//! ζ(s,α) = Σ_{n<M} (n+α)^{−s} + N^{1−s}/(s−1) + N^{−s}/2
//!          + Σ_{j=1}^{p} B_{2j}/(2j)! · s(s+1)…(s+2j−2) · N^{−s−2j+1} + R_p
//! ```
//!
//! and |R_p| is bounded by the first omitted correction times
//! |s+2p+1|/(σ+2p+1). The "regularised" variant replaces the integral term
//! by (N^{1−s} − 1)/(s−1), i.e. returns ζ(s,α) − 1/(s−1), which is what a
//! non-principal character combination needs near s = 1.

use num_complex::Complex;

use crate::arith::characters::{character_group, DirichletCharacter};
use crate::arith::primes::{euler_phi, gcd};
use crate::error::{Error, Result};
use crate::lfunc::bernoulli::{b2j_over_factorial, MAX_J};
use crate::lfunc::riemann_siegel;
use crate::Complex64;

/// Default absolute precision for single evaluations.
pub const DEFAULT_PRECISION: f64 = 1e-13;

/// Largest direct-sum cutoff a single evaluation may use.
const MAX_CUTOFF: u64 = 200_000_000;

/// Above this height on Re s = ½ the zeta path uses Riemann–Siegel.
pub const RS_THRESHOLD: f64 = 1e4;

#[inline]
pub(crate) fn cpow_neg(ln_base: f64, s: Complex64) -> Complex64 {
    // base^{−s} = e^{−σ ln b} · e^{−i t ln b}
    let mag = (-s.re * ln_base).exp();
    let (sn, cs) = (s.im * ln_base).sin_cos();
    Complex::new(mag * cs, -mag * sn)
}

/// (e^z − 1)/z without cancellation near zero.
pub(crate) fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        let mut term = Complex::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..14 {
            term = term * z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Tail of the Euler–Maclaurin formula at N = M + α.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EmTail {
    pub value: Complex64,
    pub bound: f64,
}

/// Integral, half and Bernoulli terms at N with `n_pow = N^{−s}` given.
/// `order` is the number of Bernoulli corrections.
#[inline]
pub(crate) fn em_tail(s: Complex64, n: f64, ln_n: f64, n_pow: Complex64, order: usize, regularised: bool) -> EmTail {
    let b = b2j_over_factorial();
    let one = Complex::new(1.0, 0.0);
    let integral = if regularised {
        -exprel((one - s) * ln_n) * ln_n
    } else {
        n_pow * n / (s - 1.0)
    };
    let mut value = integral + n_pow * 0.5;
    let inv_n2 = 1.0 / (n * n);
    // T_1 = b_1 · s · N^{−s−1}
    let mut term = n_pow * s * (b[1] / n);
    for j in 1..=order {
        value += term;
        let jj = j as f64;
        term = term * (s + (2.0 * jj - 1.0)) * (s + 2.0 * jj) * (inv_n2 * b[j + 1] / b[j]);
    }
    let p = order as f64;
    let bound = term.norm() * (s + (2.0 * p + 1.0)).norm() / (s.re + 2.0 * p + 1.0);
    EmTail { value, bound }
}

/// Smallest Bernoulli order meeting `eps` at N, if one exists.
pub(crate) fn em_order(s: Complex64, n: f64, eps: f64) -> Option<usize> {
    // Work with |N^{−s}| = N^{−σ}; the phase is irrelevant for the bound.
    let b = b2j_over_factorial();
    let mut mag = n.powf(-s.re) * s.norm() * (b[1].abs() / n);
    for j in 1..MAX_J - 1 {
        let p = j - 1;
        let bound = mag * (s + (2.0 * p as f64 + 1.0)).norm() / (s.re + 2.0 * p as f64 + 1.0);
        if bound < eps {
            return Some(p);
        }
        let jj = j as f64;
        let next = mag * (s + (2.0 * jj - 1.0)).norm() * (s + 2.0 * jj).norm() * (b[j + 1] / b[j]).abs() / (n * n);
        if j > 4 && next > mag {
            return None;
        }
        mag = next;
    }
    None
}

/// Cutoff M and order p such that the Euler–Maclaurin bound at every
/// α ∈ (0,1] is below `eps` for all s in a box up to |s| = `s_abs`.
pub(crate) fn em_plan(s: Complex64, eps: f64, min_cutoff: u64) -> Result<(u64, usize)> {
    let mut m = (((s.norm() + 30.0) / std::f64::consts::PI).ceil() as u64).max(min_cutoff).max(8);
    loop {
        // α small is the worst case for N = M + α.
        if let Some(p) = em_order(s, m as f64, eps) {
            return Ok((m, p));
        }
        if m > MAX_CUTOFF {
            let p = MAX_J - 2;
            let tail = em_tail(s, m as f64, (m as f64).ln(), cpow_neg((m as f64).ln(), s), p, false);
            return Err(Error::Accuracy { target: eps, achieved: tail.bound });
        }
        m *= 2;
    }
}

/// ζ(s, α) (or ζ(s,α) − 1/(s−1) when `regularised`) with explicit cutoff.
pub(crate) fn hurwitz_em(s: Complex64, alpha: f64, m: u64, order: usize, regularised: bool) -> EmTail {
    let mut sum = Complex::new(0.0, 0.0);
    for k in 0..m {
        sum += cpow_neg((k as f64 + alpha).ln(), s);
    }
    let n = m as f64 + alpha;
    let ln_n = n.ln();
    let tail = em_tail(s, n, ln_n, cpow_neg(ln_n, s), order, regularised);
    EmTail { value: sum + tail.value, bound: tail.bound }
}

fn check_hurwitz_args(a: u64, q: u64) -> Result<()> {
    if q == 0 || a == 0 || a > q {
        return Err(Error::Domain(format!("hurwitz needs 1 <= a <= q, got a={a}, q={q}")));
    }
    if gcd(a, q) != 1 {
        return Err(Error::Domain(format!("hurwitz needs gcd(a, q) = 1, got a={a}, q={q}")));
    }
    Ok(())
}

/// ζ(s, a/q) to absolute accuracy `precision`.
///
/// For a = q = 1 on Re s = ½ above height 10⁴ the Riemann–Siegel formula is
/// used when its error estimate meets the target.
pub fn hurwitz_zeta(s: Complex64, a: u64, q: u64, precision: f64) -> Result<Complex64> {
    check_hurwitz_args(a, q)?;
    if s == Complex::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if a == q && s.re == 0.5 && s.im.abs() > RS_THRESHOLD {
        let t = s.im.abs();
        if riemann_siegel::error_estimate(t) <= precision {
            let v = riemann_siegel::zeta_half(t);
            return Ok(if s.im < 0.0 { v.conj() } else { v });
        }
    }
    hurwitz_zeta_em(s, a as f64 / q as f64, precision, 0)
}

/// Euler–Maclaurin only; `extra` raises the cutoff (for independent cross-checks).
pub fn hurwitz_zeta_em(s: Complex64, alpha: f64, precision: f64, extra: u64) -> Result<Complex64> {
    let (m, p) = em_plan(s, precision, 0)?;
    Ok(hurwitz_em(s, alpha, m + extra, p, false).value)
}

/// L(s, χ) = q^{−s} Σ_a χ(a) ζ(s, a/q).
pub fn dirichlet_l(s: Complex64, chi: &DirichletCharacter<f64>, precision: f64) -> Result<Complex64> {
    dirichlet_l_with_cutoff(s, chi, precision, 0)
}

/// As [`dirichlet_l`] with the Euler–Maclaurin cutoff raised by `extra`.
pub fn dirichlet_l_with_cutoff(
    s: Complex64,
    chi: &DirichletCharacter<f64>,
    precision: f64,
    extra: u64,
) -> Result<Complex64> {
    let q = chi.modulus();
    if chi.is_principal() && s == Complex::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    if q == 1 {
        return hurwitz_zeta_em(s, 1.0, precision, extra);
    }
    let ln_q = (q as f64).ln();
    // q^{−s} multiplies every tail, so tighten the per-residue target.
    let scale = (-s.re * ln_q).exp();
    let phi = euler_phi(q) as f64;
    let (m, p) = em_plan(s, precision / (scale * phi).max(1e-300), 0)?;
    let m = m + extra;
    let regularised = !chi.is_principal();
    // Main sum over n ≤ qM directly (shared by all residues).
    let mut main = Complex::new(0.0, 0.0);
    for n in 1..=q * m {
        let c = chi.value(n);
        if c.re != 0.0 || c.im != 0.0 {
            main += c * cpow_neg((n as f64).ln(), s);
        }
    }
    let mut tails = Complex::new(0.0, 0.0);
    for a in 1..=q {
        let c = chi.value(a);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let n = m as f64 + a as f64 / q as f64;
        let ln_n = n.ln();
        tails += c * em_tail(s, n, ln_n, cpow_neg(ln_n, s), p, regularised).value;
    }
    Ok(main + cpow_neg(ln_q, s) * tails)
}

/// (q^s/φ(q)) Σ_χ conj(χ(a)) L(s, χ), every L evaluated with its own cutoff.
pub fn hurwitz_from_characters(s: Complex64, a: u64, q: u64, precision: f64) -> Result<Complex64> {
    check_hurwitz_args(a, q)?;
    let chars = character_group::<f64>(q)?;
    let mut acc = Complex::new(0.0, 0.0);
    for (i, chi) in chars.iter().enumerate() {
        let l = dirichlet_l_with_cutoff(s, chi, precision, 3 + 2 * i as u64)?;
        acc += chi.value(a).conj() * l;
    }
    let qs = cpow_neg((q as f64).ln(), -s);
    Ok(qs * acc / chars.len() as f64)
}

/// ζ_K(s) = ∏_χ L(s, χ) for an abelian field given by its characters.
pub fn dedekind_abelian(s: Complex64, chars: &[DirichletCharacter<f64>], precision: f64) -> Result<Complex64> {
    if chars.is_empty() {
        return Err(Error::Domain("dedekind_abelian needs at least one character".into()));
    }
    let principal = chars.iter().filter(|c| c.is_principal()).count();
    if principal != 1 {
        return Err(Error::Domain(format!(
            "dedekind_abelian needs exactly one principal character, found {principal}"
        )));
    }
    let mut acc = Complex::new(1.0, 0.0);
    for chi in chars {
        acc *= dirichlet_l(s, chi, precision / chars.len() as f64)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex::new(re, im)
    }

    #[test]
    fn zeta_two_and_half_shift() {
        let z2 = hurwitz_zeta(c(2.0, 0.0), 1, 1, 1e-14).unwrap();
        assert!((z2 - PI * PI / 6.0).norm() < 1e-13);
        let h = hurwitz_zeta(c(2.0, 0.0), 1, 2, 1e-14).unwrap();
        assert!((h - PI * PI / 2.0).norm() < 1e-12);
    }

    #[test]
    fn first_zero() {
        let v = hurwitz_zeta(c(0.5, 14.134_725_141_734_693), 1, 1, 1e-14).unwrap();
        assert!(v.norm() < 1e-12, "{v}");
        let v = hurwitz_zeta(c(0.5, 14.134725), 1, 1, 1e-14).unwrap();
        assert!(v.norm() < 1e-5);
    }

    #[test]
    fn pole_and_domain() {
        assert!(matches!(hurwitz_zeta(c(1.0, 0.0), 1, 1, 1e-10), Err(Error::Pole)));
        assert!(hurwitz_zeta(c(2.0, 0.0), 2, 4, 1e-10).is_err());
        assert!(hurwitz_zeta(c(2.0, 0.0), 5, 4, 1e-10).is_err());
        let chi0 = DirichletCharacter::<f64>::new(4, 0).unwrap();
        assert!(matches!(dirichlet_l(c(1.0, 0.0), &chi0, 1e-10), Err(Error::Pole)));
    }

    #[test]
    fn catalan_and_leibniz() {
        let chi = DirichletCharacter::<f64>::new(4, 1).unwrap();
        let g = dirichlet_l(c(2.0, 0.0), &chi, 1e-14).unwrap();
        assert!((g.re - 0.915_965_594_177_219).abs() < 1e-13 && g.im.abs() < 1e-15);
        let l1 = dirichlet_l(c(1.0, 0.0), &chi, 1e-14).unwrap();
        assert!((l1.re - PI / 4.0).abs() < 1e-13, "{l1}");
        // Continuity through s = 1.
        let near = dirichlet_l(c(1.0 + 1e-9, 0.0), &chi, 1e-14).unwrap();
        assert!((near - l1).norm() < 1e-9);
    }

    #[test]
    fn dedekind_gaussian_field() {
        let chars = vec![DirichletCharacter::trivial(), DirichletCharacter::new(4, 1).unwrap()];
        let v = dedekind_abelian(c(2.0, 0.0), &chars, 1e-14).unwrap();
        assert!((v.re - PI * PI / 6.0 * 0.915_965_594_177_219).abs() < 1e-12);
        assert!(dedekind_abelian(c(2.0, 0.0), &chars[1..], 1e-14).is_err());
    }

    #[test]
    fn mod_one_is_zeta() {
        let chi = DirichletCharacter::<f64>::trivial();
        for s in [c(0.5, 3.0), c(1.5, -20.0), c(2.0, 7.0), c(0.7, 40.0)] {
            let a = dirichlet_l(s, &chi, 1e-13).unwrap();
            let b = hurwitz_zeta(s, 1, 1, 1e-13).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn from_characters_examples() {
        for (s, a, q) in [(c(2.0, 0.0), 1, 4), (c(0.5, 10.0), 5, 12), (c(0.75, -33.0), 7, 8)] {
            let h = hurwitz_zeta(s, a, q, 1e-14).unwrap();
            let f = hurwitz_from_characters(s, a, q, 1e-14).unwrap();
            assert!((h - f).norm() < 1e-11, "{s} {a}/{q}: {h} vs {f}");
        }
        let s = c(0.6, 5.0);
        let z = hurwitz_from_characters(s, 1, 1, 1e-14).unwrap();
        assert!((z - hurwitz_zeta(s, 1, 1, 1e-14).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn conjugation_symmetry() {
        let chi = DirichletCharacter::<f64>::new(4, 1).unwrap();
        for s in [c(0.5, 21.0), c(1.3, 4.5)] {
            let a = dirichlet_l(s, &chi, 1e-13).unwrap();
            let b = dirichlet_l(s.conj(), &chi, 1e-13).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }
}
