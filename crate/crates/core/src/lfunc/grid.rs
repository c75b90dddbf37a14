//! Values of L(½+it) on uniform t-grids.
//!
//! Zeta uses Euler–Maclaurin below [`RS_THRESHOLD`] and Riemann–Siegel
//! above; Dirichlet L and Hurwitz ζ use Euler–Maclaurin everywhere. In every
//! case the long direct sum goes through [`powersum::eval_grid`] and only the
//! short Euler–Maclaurin tail (or the Riemann–Siegel correction) is done
//! point by point.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::characters::DirichletCharacter;
use crate::arith::primes::euler_phi;
use crate::error::{Error, Result};
use crate::lfunc::hurwitz::{cpow_neg, em_plan, em_tail, RS_THRESHOLD};
use crate::lfunc::id::LFunctionId;
use crate::lfunc::powersum::{self, Kernel, PowerSum};
use crate::lfunc::riemann_siegel;
use crate::Complex64;

/// Default floor for stored log|L|.
pub const DEFAULT_CLAMP_FLOOR: f64 = -40.0;

/// Default absolute precision target on log|L|.
pub const DEFAULT_LOG_PRECISION: f64 = 1e-8;

/// Points per independently planned block.
const BLOCK: usize = 1 << 17;

/// Uniform grid description: t_j = t0 + j·step for j < len.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(t0: f64, t1: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Domain(format!("grid step must be positive, got {step}")));
        }
        if !(t0 >= 1.0 && t1 >= t0 && t1.is_finite()) {
            return Err(Error::Domain(format!("grid needs 1 <= t0 <= t1, got [{t0}, {t1}]")));
        }
        if (t1 - t0) / step > 1e9 {
            return Err(Error::Domain(format!("grid of {} points exceeds 1e9", (t1 - t0) / step)));
        }
        Ok(Self { t0, t1, step })
    }

    /// floor((t1 − t0)/step) + 1, robust to the last point landing a few
    /// ulps short of t1.
    pub fn len(&self) -> usize {
        let r = (self.t1 - self.t0) / self.step;
        (r * (1.0 + 4.0 * f64::EPSILON) + 1e-12).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.step
    }
}

/// log|L(½+it)| on a grid, clamped from below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalLineGrid {
    pub id: LFunctionId,
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub clamp_floor: f64,
    pub precision: f64,
    /// Indices whose value was raised to `clamp_floor`.
    pub clamped: Vec<usize>,
}

impl CriticalLineGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn t(&self, j: usize) -> f64 {
        self.spec.t(j)
    }

    pub fn clamped_fraction(&self) -> f64 {
        self.clamped.len() as f64 / self.values.len().max(1) as f64
    }

    /// Build from raw (unclamped) values.
    pub fn from_raw(id: LFunctionId, spec: GridSpec, mut values: Vec<f64>, clamp_floor: f64, precision: f64) -> Self {
        let mut clamped = Vec::new();
        for (j, v) in values.iter_mut().enumerate() {
            if v.is_nan() || *v < clamp_floor {
                *v = clamp_floor;
                clamped.push(j);
            }
        }
        Self { id, spec, values, clamp_floor, precision, clamped }
    }

    /// Restriction to the indices whose t lies in [lo, hi].
    pub fn window(&self, lo: f64, hi: f64) -> &[f64] {
        let a = ((lo - self.spec.t0) / self.spec.step).ceil().max(0.0) as usize;
        let b = (((hi - self.spec.t0) / self.spec.step).floor() as isize + 1).clamp(0, self.len() as isize) as usize;
        &self.values[a.min(b)..b]
    }
}

/// Tuning knobs for grid evaluation.
#[derive(Debug, Clone, Copy)]
pub struct GridOptions {
    pub clamp_floor: f64,
    pub precision: f64,
    pub kernel: Kernel,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { clamp_floor: DEFAULT_CLAMP_FLOOR, precision: DEFAULT_LOG_PRECISION, kernel: Kernel::Auto }
    }
}

/// log|L(½+it)| for any (composite) id over [t0, t1].
pub fn log_abs_grid(id: &LFunctionId, t0: f64, t1: f64, step: f64) -> Result<CriticalLineGrid> {
    log_abs_grid_with(id, GridSpec::new(t0, t1, step)?, GridOptions::default())
}

pub fn log_abs_grid_with(id: &LFunctionId, spec: GridSpec, opts: GridOptions) -> Result<CriticalLineGrid> {
    let n = spec.len();
    let mut acc = vec![0.0; n];
    for (base, k) in id.components() {
        let vals = value_grid_with(&base, spec.t0, spec.step, n, opts)?;
        acc.par_iter_mut().zip(vals.par_iter()).for_each(|(a, v)| *a += k * v.norm().ln());
    }
    Ok(CriticalLineGrid::from_raw(id.clone(), spec, acc, opts.clamp_floor, opts.precision))
}

/// L(½ + i(t0 + j·step)) for j < count; `base` must be zeta, Hurwitz or Dirichlet.
pub fn value_grid(base: &LFunctionId, t0: f64, step: f64, count: usize) -> Result<Vec<Complex64>> {
    value_grid_with(base, t0, step, count, GridOptions::default())
}

pub fn value_grid_with(base: &LFunctionId, t0: f64, step: f64, count: usize, opts: GridOptions) -> Result<Vec<Complex64>> {
    value_grid_at(base, 0.5, t0, step, count, opts)
}

/// L(σ + i(t0 + j·step)) for j < count, 0 < σ ≤ 3. Riemann–Siegel is only
/// used on σ = ½.
pub fn value_grid_at(
    base: &LFunctionId,
    sigma: f64,
    t0: f64,
    step: f64,
    count: usize,
    opts: GridOptions,
) -> Result<Vec<Complex64>> {
    if !(t0 >= 1.0 && step > 0.0) {
        return Err(Error::Domain(format!("value grid needs t0 >= 1 and step > 0, got t0={t0}, step={step}")));
    }
    if !(sigma > 0.0 && sigma <= 3.0) {
        return Err(Error::Domain(format!("value grid needs 0 < sigma <= 3, got {sigma}")));
    }
    // Absolute target on L; 1e-3 headroom for the conversion to log|L|.
    let eps = (opts.precision * 1e-3).max(1e-15);
    let blocks = plan_blocks(base, sigma, t0, step, count);
    let parts: Vec<Result<Vec<Complex64>>> = blocks
        .par_iter()
        .map(|b| match (base, b.method) {
            (LFunctionId::Zeta, Method::RiemannSiegel) => Ok(rs_block(t0 + b.start as f64 * step, step, b.len, opts.kernel)),
            (LFunctionId::Zeta, Method::EulerMaclaurin) => {
                em_dirichlet_block(&DirichletCharacter::trivial(), sigma, t0 + b.start as f64 * step, step, b.len, eps, opts.kernel)
            }
            (LFunctionId::Dirichlet(c), _) => {
                let chi = DirichletCharacter::from_id(*c)?;
                em_dirichlet_block(&chi, sigma, t0 + b.start as f64 * step, step, b.len, eps, opts.kernel)
            }
            (LFunctionId::Hurwitz { a, q }, _) => {
                em_hurwitz_block(*a as f64 / *q as f64, sigma, t0 + b.start as f64 * step, step, b.len, eps, opts.kernel)
            }
            (other, _) => Err(Error::Domain(format!("value_grid needs a single L-function, got {other}"))),
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Method {
    EulerMaclaurin,
    RiemannSiegel,
}

#[derive(Debug, Clone, Copy)]
struct Block {
    start: usize,
    len: usize,
    method: Method,
}

/// Cut the index range into blocks. Riemann–Siegel blocks never straddle a
/// change of the main-sum length ⌊√(t/2π)⌋.
fn plan_blocks(base: &LFunctionId, sigma: f64, t0: f64, step: f64, count: usize) -> Vec<Block> {
    let mut blocks = Vec::new();
    let rs_start = if matches!(base, LFunctionId::Zeta) && sigma == 0.5 {
        let j = ((RS_THRESHOLD - t0) / step).ceil();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(count)
        }
    } else {
        count
    };
    let mut s = 0;
    while s < rs_start {
        let len = BLOCK.min(rs_start - s);
        blocks.push(Block { start: s, len, method: Method::EulerMaclaurin });
        s += len;
    }
    while s < count {
        let t = t0 + s as f64 * step;
        let n = riemann_siegel::main_length(t) as f64;
        // First index where the main length grows.
        let t_next = 2.0 * std::f64::consts::PI * (n + 1.0) * (n + 1.0);
        let mut end = ((t_next - t0) / step).ceil() as usize;
        while end > s && riemann_siegel::main_length(t0 + (end - 1) as f64 * step) as f64 > n {
            end -= 1;
        }
        while end < count && riemann_siegel::main_length(t0 + end as f64 * step) as f64 == n {
            end += 1;
        }
        let end = end.clamp(s + 1, count).min(s + BLOCK);
        blocks.push(Block { start: s, len: end - s, method: Method::RiemannSiegel });
        s = end;
    }
    blocks
}

fn rs_block(t0: f64, step: f64, count: usize, kernel: Kernel) -> Vec<Complex64> {
    let n = riemann_siegel::main_length(t0);
    let mut ps = PowerSum::with_capacity(n);
    for k in 1..=n {
        let l = (k as f64).ln();
        ps.push(l, Complex::new((-0.5 * l).exp(), 0.0));
    }
    let f = powersum::eval_grid(&ps, t0, step, count, kernel);
    f.iter()
        .enumerate()
        .map(|(j, &fj)| {
            let t = t0 + j as f64 * step;
            let th = riemann_siegel::theta(t);
            let rot = Complex::from_polar(1.0, th);
            let z = 2.0 * (rot * fj).re + riemann_siegel::remainder(t);
            Complex::from_polar(z, -th)
        })
        .collect()
}

fn em_dirichlet_block(
    chi: &DirichletCharacter<f64>,
    sigma: f64,
    t0: f64,
    step: f64,
    count: usize,
    eps: f64,
    kernel: Kernel,
) -> Result<Vec<Complex64>> {
    let q = chi.modulus();
    let t_max = t0 + (count.saturating_sub(1)) as f64 * step;
    let s_max = Complex::new(sigma, t_max);
    let phi = euler_phi(q) as f64;
    let (m, p) = em_plan(s_max, eps * (q as f64).powf(sigma) / phi, 0)?;
    let regularised = !chi.is_principal();
    let top = q * m;
    let mut ps = PowerSum::with_capacity(top as usize);
    for n in 1..=top {
        let c = chi.value(n);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let l = (n as f64).ln();
        ps.push(l, c * (-sigma * l).exp());
    }
    let main = powersum::eval_grid(&ps, t0, step, count, kernel);
    let residues: Vec<(f64, f64, Complex64)> = (1..=q)
        .filter_map(|a| {
            let c = chi.value(a);
            (c.re != 0.0 || c.im != 0.0).then(|| {
                let nn = m as f64 + a as f64 / q as f64;
                (nn, nn.ln(), c)
            })
        })
        .collect();
    let ln_q = (q as f64).ln();
    Ok(main
        .iter()
        .enumerate()
        .map(|(j, &f)| {
            let s = Complex::new(sigma, t0 + j as f64 * step);
            let mut tails = Complex::new(0.0, 0.0);
            for &(nn, ln_n, c) in &residues {
                tails += c * em_tail(s, nn, ln_n, cpow_neg(ln_n, s), p, regularised).value;
            }
            if q == 1 {
                f + tails
            } else {
                f + cpow_neg(ln_q, s) * tails
            }
        })
        .collect())
}

fn em_hurwitz_block(
    alpha: f64,
    sigma: f64,
    t0: f64,
    step: f64,
    count: usize,
    eps: f64,
    kernel: Kernel,
) -> Result<Vec<Complex64>> {
    let t_max = t0 + (count.saturating_sub(1)) as f64 * step;
    let (m, p) = em_plan(Complex::new(sigma, t_max), eps, 0)?;
    let mut ps = PowerSum::with_capacity(m as usize);
    for k in 0..m {
        let l = (k as f64 + alpha).ln();
        ps.push(l, Complex::new((-sigma * l).exp(), 0.0));
    }
    let main = powersum::eval_grid(&ps, t0, step, count, kernel);
    let nn = m as f64 + alpha;
    let ln_n = nn.ln();
    Ok(main
        .iter()
        .enumerate()
        .map(|(j, &f)| {
            let s = Complex::new(sigma, t0 + j as f64 * step);
            f + em_tail(s, nn, ln_n, cpow_neg(ln_n, s), p, false).value
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunc::hurwitz::{dirichlet_l, hurwitz_zeta_em};

    #[test]
    fn grid_length() {
        assert_eq!(GridSpec::new(1.0, 2.0, 0.5).unwrap().len(), 3);
        assert_eq!(GridSpec::new(1.0, 100.0, 0.01).unwrap().len(), 9901);
        assert_eq!(GridSpec::new(5.0, 5.0, 0.1).unwrap().len(), 1);
        assert!(GridSpec::new(0.5, 2.0, 0.5).is_err());
        assert!(GridSpec::new(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn first_zero_is_clamped() {
        let g = log_abs_grid(&LFunctionId::Zeta, 14.0, 14.3, 1e-3).unwrap();
        assert_eq!(g.len(), 301);
        assert!(g.values.iter().all(|v| v.is_finite() && *v >= g.clamp_floor));
        // The zero 14.1347251… sits 2.7e-4 from grid point 14.135 and
        // |ζ'| ≈ 0.79 there, so log|ζ| ≈ −8.4: only a floor above that catches it.
        let g = log_abs_grid_with(
            &LFunctionId::Zeta,
            GridSpec::new(14.0, 14.3, 1e-3).unwrap(),
            GridOptions { clamp_floor: -8.0, ..Default::default() },
        )
        .unwrap();
        assert_eq!(g.clamped.len(), 1);
        let t = g.t(g.clamped[0]);
        assert!((t - 14.1347).abs() < 2e-3, "{t}");
    }

    #[test]
    fn zeta_grid_matches_pointwise() {
        for &(t0, step, count) in &[(1.0, 0.37, 400usize), (9_990.0, 0.02, 1200), (123_456.0, 0.02, 300)] {
            let g = value_grid(&LFunctionId::Zeta, t0, step, count).unwrap();
            for j in (0..count).step_by(37) {
                let t = t0 + j as f64 * step;
                let want = hurwitz_zeta_em(Complex::new(0.5, t), 1.0, 1e-12, 0).unwrap();
                assert!((g[j] - want).norm() < 1e-8, "t={t}: {} vs {want}", g[j]);
            }
        }
    }

    #[test]
    fn dirichlet_and_hurwitz_grids_match_pointwise() {
        let id = LFunctionId::dirichlet(4, 1).unwrap();
        let chi = DirichletCharacter::new(4, 1).unwrap();
        let g = value_grid(&id, 2000.0, 0.05, 500).unwrap();
        for j in (0..500).step_by(41) {
            let s = Complex::new(0.5, 2000.0 + j as f64 * 0.05);
            assert!((g[j] - dirichlet_l(s, &chi, 1e-13).unwrap()).norm() < 1e-10);
        }
        let off = value_grid_at(&id, 1.25, 300.0, 0.1, 50, GridOptions::default()).unwrap();
        for j in (0..50).step_by(7) {
            let s = Complex::new(1.25, 300.0 + j as f64 * 0.1);
            assert!((off[j] - dirichlet_l(s, &chi, 1e-13).unwrap()).norm() < 1e-10);
        }
        let id = LFunctionId::hurwitz(5, 12).unwrap();
        let g = value_grid(&id, 50.0, 0.3, 200).unwrap();
        for j in (0..200).step_by(23) {
            let s = Complex::new(0.5, 50.0 + j as f64 * 0.3);
            assert!((g[j] - hurwitz_zeta_em(s, 5.0 / 12.0, 1e-13, 0).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn kernels_and_threads_agree_bitwise() {
        let spec = GridSpec::new(9_000.0, 11_000.0, 0.05).unwrap();
        let a = log_abs_grid_with(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
        let b = pool.install(|| log_abs_grid_with(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap());
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        let opts = GridOptions { kernel: Kernel::Direct, ..Default::default() };
        let c = value_grid_with(&LFunctionId::Zeta, spec.t0, spec.step, spec.len(), opts).unwrap();
        let d = value_grid(&LFunctionId::Zeta, spec.t0, spec.step, spec.len()).unwrap();
        let err = c.iter().zip(&d).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn composite_is_weighted_sum() {
        let spec = GridSpec::new(100.0, 110.0, 0.1).unwrap();
        let id: LFunctionId = "zeta^2,dirichlet:4:1".parse().unwrap();
        let g = log_abs_grid_with(&id, spec, GridOptions::default()).unwrap();
        let z = log_abs_grid_with(&LFunctionId::Zeta, spec, GridOptions::default()).unwrap();
        let l = log_abs_grid_with(&LFunctionId::dirichlet(4, 1).unwrap(), spec, GridOptions::default()).unwrap();
        for j in 0..g.len() {
            assert!((g.values[j] - (2.0 * z.values[j] + l.values[j])).abs() < 1e-12);
        }
        let k: LFunctionId = "dedekind:4".parse().unwrap();
        let kg = log_abs_grid_with(&k, spec, GridOptions::default()).unwrap();
        for j in 0..g.len() {
            assert!((kg.values[j] - (z.values[j] + l.values[j])).abs() < 1e-12);
        }
    }
}
