//! The Dirichlet polynomial S_N, the remainder g_N = ∏ L_j^{k_j} − S_N, the
//! Gaussian window w(t, T), the three windowed integrals H, K, J and the
//! line-integral convexity check.
//!
//! Powers L^k with non-integer k need a branch of log L. At a single point
//! it is continued horizontally from σ = 4, where |L − 1| < 0.1 and the
//! principal logarithm is the right one; along a vertical grid the argument
//! is unwrapped from one sample to the next starting from such a point. To
//! the right of Re s = 1 this is exact. On or near the critical line the
//! unwrapping picks the nearest branch at each zero crossing.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::arith::characters::DirichletCharacter;
use crate::arith::coeffs::{big_h, MultiplicativeSeries};
use crate::arith::satake::SatakeSpec;
use crate::error::{Error, Result};
use crate::lfunc::grid::{value_grid_at, GridOptions};
use crate::lfunc::hurwitz::{cpow_neg, dirichlet_l};
use crate::lfunc::id::LFunctionId;
use crate::lfunc::powersum::{eval_grid, Kernel, PowerSum};
use crate::moments::quadrature::{simpson_fn, simpson_stream, Quad};
use crate::Complex64;

/// The window is treated as zero more than this far outside [T, 2T].
pub const WINDOW_REACH: f64 = 8.0;

/// w(t, T) = ∫_T^{2T} e^{−(t−τ)²} dτ = (√π/2)[erfc(T − t) − erfc(2T − t)],
/// truncated to zero outside [T − 8, 2T + 8].
pub fn window_weight(t: f64, big_t: f64) -> f64 {
    if t < big_t - WINDOW_REACH || t > 2.0 * big_t + WINDOW_REACH {
        return 0.0;
    }
    // Evaluate in whichever form avoids cancellation.
    let half_sqrt_pi = 0.5 * PI.sqrt();
    if t <= 1.5 * big_t {
        half_sqrt_pi * (erfc(big_t - t) - erfc(2.0 * big_t - t))
    } else {
        half_sqrt_pi * (erfc(t - 2.0 * big_t) - erfc(t - big_t))
    }
}

/// S_N(s) = Σ_{n≤N} h(n) n^{−s} by direct summation.
pub fn dirichlet_poly_sn(h: &MultiplicativeSeries<f64>, n: usize, s: Complex64) -> Result<Complex64> {
    if n > h.n_max() {
        return Err(Error::Domain(format!("series cached to {}, need {n}", h.n_max())));
    }
    let mut acc = Complex::new(0.0, 0.0);
    for (m, c) in h.coeffs().iter().enumerate().take(n + 1).skip(1) {
        acc += c * cpow_neg((m as f64).ln(), s);
    }
    Ok(acc)
}

/// Component L-functions and exponents with the coefficient series 𝐡 up to N.
pub struct Product {
    pub components: Vec<(LFunctionId, f64)>,
    pub specs: Vec<SatakeSpec<f64>>,
    pub k: Vec<f64>,
    pub h: MultiplicativeSeries<f64>,
}

impl Product {
    pub fn new(id: &LFunctionId, n: usize) -> Result<Self> {
        let components = id.components();
        let sk = id.satake()?;
        let specs: Vec<SatakeSpec<f64>> = sk.iter().map(|p| p.0.clone()).collect();
        let k: Vec<f64> = sk.iter().map(|p| p.1).collect();
        let h = big_h(&k, &specs, n.max(1))?;
        Ok(Self { components, specs, k, h })
    }
}

fn single_l(id: &LFunctionId, s: Complex64, precision: f64) -> Result<Complex64> {
    match id {
        LFunctionId::Zeta => dirichlet_l(s, &DirichletCharacter::trivial(), precision),
        LFunctionId::Dirichlet(c) => dirichlet_l(s, &DirichletCharacter::from_id(*c)?, precision),
        other => Err(Error::Domain(format!("{other} is not a single L-function with an Euler product"))),
    }
}

/// Principal-difference of arguments, in (−π, π].
#[inline]
fn arg_step(new: Complex64, old: Complex64) -> f64 {
    (new * old.conj()).arg()
}

/// log L(s) continued horizontally from Re s = 4.
pub fn log_l(id: &LFunctionId, s: Complex64, precision: f64) -> Result<Complex64> {
    let start = s.re.max(4.0);
    let mut sigma = start;
    let mut prev = single_l(id, Complex::new(sigma, s.im), precision)?;
    let mut arg = prev.arg();
    let mut h = 0.1;
    while sigma > s.re {
        let next_sigma = (sigma - h).max(s.re);
        let v = single_l(id, Complex::new(next_sigma, s.im), precision)?;
        let d = arg_step(v, prev);
        if d.abs() > 0.5 && h > 1e-6 {
            h *= 0.5;
            continue;
        }
        arg += d;
        prev = v;
        sigma = next_sigma;
        if d.abs() < 0.1 {
            h = (h * 2.0).min(0.1);
        }
    }
    if prev.norm() == 0.0 {
        return Err(Error::Domain(format!("L vanishes at {s}")));
    }
    Ok(Complex::new(prev.norm().ln(), arg))
}

/// ∏_j L_j(s)^{k_j} at one point.
pub fn l_power_product(components: &[(LFunctionId, f64)], s: Complex64, precision: f64) -> Result<Complex64> {
    let mut acc = Complex::new(1.0, 0.0);
    let mut log_acc = Complex::new(0.0, 0.0);
    let mut any_log = false;
    for (id, k) in components {
        if k.fract() == 0.0 && *k <= 64.0 {
            acc *= single_l(id, s, precision)?.powi(*k as i32);
        } else {
            log_acc += log_l(id, s, precision)? * *k;
            any_log = true;
        }
    }
    Ok(if any_log { acc * log_acc.exp() } else { acc })
}

/// g_N(s) = ∏ L_j(s)^{k_j} − S_N(s).
pub fn g_n(product: &Product, n: usize, s: Complex64, precision: f64) -> Result<Complex64> {
    Ok(l_power_product(&product.components, s, precision)? - dirichlet_poly_sn(&product.h, n, s)?)
}

/// ∏ L_j(σ+it)^{k_j} on a vertical grid.
pub fn power_product_grid(
    components: &[(LFunctionId, f64)],
    sigma: f64,
    t0: f64,
    step: f64,
    count: usize,
) -> Result<Vec<Complex64>> {
    let opts = GridOptions { precision: 1e-10, ..Default::default() };
    let mut acc = vec![Complex::new(1.0, 0.0); count];
    for (id, k) in components {
        let vals = value_grid_at(id, sigma, t0, step, count, opts)?;
        if k.fract() == 0.0 && *k <= 64.0 {
            let e = *k as i32;
            acc.iter_mut().zip(&vals).for_each(|(a, v)| *a *= v.powi(e));
            continue;
        }
        let seed = log_l(id, Complex::new(sigma, t0), 1e-12)?;
        let mut arg = seed.im;
        let mut prev = vals[0];
        for (a, v) in acc.iter_mut().zip(&vals) {
            arg += arg_step(*v, prev);
            prev = *v;
            *a *= Complex::from_polar(v.norm().powf(*k), k * arg);
        }
    }
    Ok(acc)
}

/// H, K and J at one σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedIntegrals {
    pub sigma: f64,
    pub t: f64,
    pub n: usize,
    pub h: Quad,
    pub k: Quad,
    pub j: Quad,
}

impl WindowedIntegrals {
    /// H ≤ 2(J + K) and K ≤ 2(J + H), the pointwise |a+b|² ≤ 2|a|² + 2|b|².
    pub fn triangle_holds(&self) -> bool {
        let slack = 1e-9 * (self.h.value + self.k.value + self.j.value);
        self.h.value <= 2.0 * (self.j.value + self.k.value) + slack
            && self.k.value <= 2.0 * (self.j.value + self.h.value) + slack
    }
}

/// H(σ,T) = ∫|S_N|²w, K(σ,T) = ∫|g_N|²w, J(σ,T) = ∫∏|L_j|^{2k_j}w, all at
/// Re s = σ. The window is cut at [T − 8, 2T + 8]; step 0.02.
pub fn windowed_integrals(id: &LFunctionId, sigma: f64, big_t: f64, n: usize) -> Result<WindowedIntegrals> {
    windowed_integrals_with_step(id, sigma, big_t, n, 0.02)
}

pub fn windowed_integrals_with_step(
    id: &LFunctionId,
    sigma: f64,
    big_t: f64,
    n: usize,
    step: f64,
) -> Result<WindowedIntegrals> {
    if !(0.5..=1.5).contains(&sigma) {
        return Err(Error::Domain(format!("windowed integrals need 1/2 <= sigma <= 3/2, got {sigma}")));
    }
    if !(big_t >= WINDOW_REACH + 1.0) {
        return Err(Error::Domain(format!("windowed integrals need T >= {}, got {big_t}", WINDOW_REACH + 1.0)));
    }
    let product = Product::new(id, n)?;
    let t0 = big_t - WINDOW_REACH;
    let intervals = ((big_t + 2.0 * WINDOW_REACH) / step).ceil() as usize;
    let count = intervals + 1;
    let coeffs: Vec<Complex64> = product.h.coeffs()[1..=n].to_vec();
    let sn_poly = PowerSum::dirichlet(&coeffs, sigma);
    let sn = eval_grid(&sn_poly, t0, step, count, Kernel::Auto);
    let lk = power_product_grid(&product.components, sigma, t0, step, count)?;
    let w: Vec<f64> = (0..count).map(|j| window_weight(t0 + j as f64 * step, big_t)).collect();
    let h = simpson_fn(intervals, step, |j| sn[j].norm_sqr() * w[j]);
    let k = simpson_fn(intervals, step, |j| (lk[j] - sn[j]).norm_sqr() * w[j]);
    let j = simpson_fn(intervals, step, |i| lk[i].norm_sqr() * w[i]);
    Ok(WindowedIntegrals { sigma, t: big_t, n, h, k, j })
}

/// Outcome of the convexity check on three vertical lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GabrielReport {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    pub tau: f64,
    pub n: usize,
    pub i_alpha: f64,
    pub i_gamma: f64,
    pub i_beta: f64,
    /// I_α^{(β−γ)/(β−α)} · I_β^{(γ−α)/(β−α)}.
    pub rhs: f64,
    pub ratio: f64,
}

/// Left edge of the strip where g_N comes from convergent series.
pub const GABRIEL_MIN_RE: f64 = 1.0 + 1e-3;

/// Half-width of the t-range around τ; e^{−(t−τ)²} < e^{−100} beyond it.
const GABRIEL_REACH: f64 = 10.0;

/// ∫|f(σ+it)|² dt for f(z) = g_N(z) e^{(z−iτ)²/2} on the lines σ = α, γ, β,
/// and the ratio of the middle integral to the interpolated bound.
pub fn gabriel_check(id: &LFunctionId, n: usize, alpha: f64, gamma: f64, beta: f64, tau: f64) -> Result<GabrielReport> {
    if !(alpha <= gamma && gamma <= beta) {
        return Err(Error::Domain(format!("need alpha <= gamma <= beta, got {alpha}, {gamma}, {beta}")));
    }
    if !(beta - alpha >= 1e-3) {
        return Err(Error::Domain(format!("need beta - alpha >= 1e-3, got {}", beta - alpha)));
    }
    if !(alpha >= GABRIEL_MIN_RE && beta <= 1.5) {
        return Err(Error::Domain(format!("lines must lie in [{GABRIEL_MIN_RE}, 3/2], got [{alpha}, {beta}]")));
    }
    if !(tau >= GABRIEL_REACH + 1.0) {
        return Err(Error::Domain(format!("need tau >= {}, got {tau}", GABRIEL_REACH + 1.0)));
    }
    let product = Product::new(id, n)?;
    let step = 0.005;
    let intervals = (2.0 * GABRIEL_REACH / step).round() as usize;
    let t0 = tau - GABRIEL_REACH;
    let coeffs: Vec<Complex64> = product.h.coeffs()[1..=n].to_vec();
    let line = |sigma: f64| -> Result<f64> {
        let sn = eval_grid(&PowerSum::dirichlet(&coeffs, sigma), t0, step, intervals + 1, Kernel::Direct);
        let lk = power_product_grid(&product.components, sigma, t0, step, intervals + 1)?;
        // |e^{(σ + i(t−τ))²/2}|² = e^{σ² − (t−τ)²}
        let q = simpson_stream(intervals, step, |s, len| {
            (s..s + len)
                .map(|j| {
                    let u = t0 + j as f64 * step - tau;
                    (lk[j] - sn[j]).norm_sqr() * (sigma * sigma - u * u).exp()
                })
                .collect()
        });
        Ok(q.value)
    };
    let i_alpha = line(alpha)?;
    let i_beta = line(beta)?;
    let i_gamma = if gamma == alpha {
        i_alpha
    } else if gamma == beta {
        i_beta
    } else {
        line(gamma)?
    };
    let wa = (beta - gamma) / (beta - alpha);
    let wb = (gamma - alpha) / (beta - alpha);
    let rhs = i_alpha.powf(wa) * i_beta.powf(wb);
    Ok(GabrielReport { alpha, gamma, beta, tau, n, i_alpha, i_gamma, i_beta, rhs, ratio: i_gamma / rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::coeffs::divisor_series;

    #[test]
    fn window_values() {
        let t = 1000.0;
        assert!((window_weight(1.5 * t, t) - PI.sqrt()).abs() < 1e-10);
        assert_eq!(window_weight(t - 20.0, t), 0.0);
        assert!((window_weight(t, t) - 0.5 * PI.sqrt()).abs() < 1e-12);
        assert!((window_weight(2.0 * t, t) - 0.5 * PI.sqrt()).abs() < 1e-12);
        // Symmetric about 3T/2.
        assert!((window_weight(t + 1.3, t) - window_weight(2.0 * t - 1.3, t)).abs() < 1e-15);
    }

    #[test]
    fn sn_values() {
        let h = divisor_series(1.0, 100).unwrap();
        assert_eq!(dirichlet_poly_sn(&h, 1, Complex::new(0.5, 3.0)).unwrap(), Complex::new(1.0, 0.0));
        let v = dirichlet_poly_sn(&h, 100, Complex::new(0.5, 0.0)).unwrap();
        // Σ_{n≤100} n^{−½} = 2√100 + ζ(½) + ½·100^{−½} + O(N^{−3/2})
        let want = 20.0 - 1.460_354_508_809_586_8 + 0.05 - 1.0 / 24.0 * 1e-3;
        assert!((v.re - want).abs() < 1e-6, "{v}");
        assert!((v.re - 18.589_603_824).abs() < 1e-8);
    }

    #[test]
    fn g_n_tail_at_re_two() {
        let p = Product::new(&LFunctionId::Zeta, 1000).unwrap();
        let g = g_n(&p, 1000, Complex::new(2.0, 5.0), 1e-14).unwrap();
        // |g_N| ≤ Σ_{n>N} n^{−2} < 1/N
        assert!(g.norm() < 1e-3, "{g}");
    }

    #[test]
    fn log_l_branch_matches_power() {
        let id = LFunctionId::Zeta;
        for s in [Complex::new(1.2, 30.0), Complex::new(1.01, 100.0), Complex::new(0.7, 50.0)] {
            let l = log_l(&id, s, 1e-13).unwrap();
            let v = single_l(&id, s, 1e-13).unwrap();
            assert!((l.exp() - v).norm() < 1e-10 * v.norm());
        }
        // Right of 1, log ζ = Σ_p Σ_ℓ p^{−ℓs}/ℓ; check at s = 3 + i.
        let s = Complex::new(3.0, 1.0);
        let primes = crate::arith::primes::sieve_primes(10_000).unwrap();
        let mut want = Complex::new(0.0, 0.0);
        for p in primes.iter() {
            for l in 1..40 {
                want += cpow_neg((p as f64).ln(), s * l as f64) / l as f64;
            }
        }
        assert!((log_l(&id, s, 1e-14).unwrap() - want).norm() < 1e-9);
    }

    #[test]
    fn vertical_unwrap_matches_horizontal() {
        let comps = vec![(LFunctionId::Zeta, 0.5)];
        let g = power_product_grid(&comps, 1.1, 20.0, 0.05, 400).unwrap();
        for j in (0..400).step_by(57) {
            let s = Complex::new(1.1, 20.0 + j as f64 * 0.05);
            let want = l_power_product(&comps, s, 1e-13).unwrap();
            assert!((g[j] - want).norm() < 1e-8, "{} vs {want}", g[j]);
        }
    }

    #[test]
    fn windowed_h_matches_mean_value() {
        let w = windowed_integrals(&LFunctionId::Zeta, 1.25, 500.0, 50).unwrap();
        let want: f64 = (1..=50).map(|n| (n as f64).powf(-2.5)).sum();
        let got = w.h.value / (PI.sqrt() * 500.0);
        assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");
        assert!(w.triangle_holds());
        assert!(windowed_integrals(&LFunctionId::Zeta, 0.4, 500.0, 50).is_err());
    }

    #[test]
    fn gabriel_degenerate_and_midpoint() {
        let id = LFunctionId::Zeta;
        let r = gabriel_check(&id, 50, 1.1, 1.1, 1.4, 100.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        let r = gabriel_check(&id, 50, 1.1, 1.4, 1.4, 100.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        let r = gabriel_check(&id, 50, 1.001, 1.2505, 1.5, 100.0).unwrap();
        assert!(r.ratio <= 1.0 + 1e-6, "{}", r.ratio);
        assert!(gabriel_check(&id, 50, 1.3, 1.2, 1.4, 100.0).is_err());
        assert!(gabriel_check(&id, 50, 0.9, 1.2, 1.4, 100.0).is_err());
    }
}
