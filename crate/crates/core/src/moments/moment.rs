//! Joint moments ∫ ∏_j |L_j(½+it)|^{2k_j} dt, scaling fits, and the twisted
//! Hurwitz moment.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::characters::character_group;
use crate::arith::primes::{euler_phi, gcd};
use crate::error::{Error, Result};
use crate::lfunc::grid::{log_abs_grid_with, value_grid, CriticalLineGrid, GridOptions, GridSpec};
use crate::lfunc::id::LFunctionId;
use crate::moments::quadrature::{simpson_fn, simpson_stream, Quad};
use crate::moments::windowed::{window_weight, WINDOW_REACH};
use crate::Complex64;

/// Fraction of clamped samples above which a moment carries a warning.
pub const CLAMP_WARNING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    /// Plain integral over [1, T].
    Sharp,
    /// Weight w(t, T) = ∫_T^{2T} e^{−(t−τ)²} dτ over [T − 8, 2T + 8].
    Gaussian,
}

/// What to integrate and how finely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSpec {
    pub ids: Vec<LFunctionId>,
    pub k: Vec<f64>,
    pub t: f64,
    pub step: f64,
    pub window: Window,
}

/// min(0.02, π/(2 log T)): at least ten samples per mean zero spacing.
pub fn default_step(t: f64) -> f64 {
    (PI / (2.0 * t.ln())).min(0.02)
}

impl MomentSpec {
    pub fn new(ids: Vec<LFunctionId>, k: Vec<f64>, t: f64, window: Window) -> Result<Self> {
        Self::with_step(ids, k, t, default_step(t), window)
    }

    pub fn with_step(ids: Vec<LFunctionId>, k: Vec<f64>, t: f64, step: f64, window: Window) -> Result<Self> {
        let spec = Self { ids, k, t, step, window };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ids.len() != self.k.len() || self.ids.is_empty() {
            return Err(Error::Domain(format!(
                "moment needs matching non-empty ids and k, got {} and {}",
                self.ids.len(),
                self.k.len()
            )));
        }
        if self.k.iter().any(|&k| !(k >= 0.0 && k.is_finite())) {
            return Err(Error::Domain("moment exponents must be finite and >= 0".into()));
        }
        if !(self.t >= 10.0) {
            return Err(Error::Domain(format!("moment needs T >= 10, got {}", self.t)));
        }
        if !(self.step > 0.0 && self.step <= PI / self.t.ln()) {
            return Err(Error::Domain(format!(
                "step {} does not resolve oscillation at T = {} (needs <= pi/log T = {})",
                self.step,
                self.t,
                PI / self.t.ln()
            )));
        }
        Ok(())
    }

    /// The t-range the integrand is sampled on.
    pub fn range(&self) -> (f64, f64) {
        match self.window {
            Window::Sharp => (1.0, self.t),
            Window::Gaussian => ((self.t - WINDOW_REACH).max(1.0), 2.0 * self.t + WINDOW_REACH),
        }
    }

    /// Σ k_j² times the degree of each id: the exponent of log T in the
    /// expected order of growth.
    pub fn expected_exponent(&self) -> f64 {
        self.ids.iter().zip(&self.k).map(|(id, k)| k * k * id.degree() as f64).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub value: f64,
    pub error: f64,
    pub clamped_fraction: f64,
    pub warning: Option<String>,
}

/// One JSON-lines record per (spec, T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub ids: Vec<String>,
    pub k: Vec<f64>,
    #[serde(rename = "T")]
    pub t: f64,
    pub value: f64,
    pub error: f64,
    pub clamped_fraction: f64,
    pub wall_ms: Option<u64>,
}

impl MomentRecord {
    pub fn new(spec: &MomentSpec, t: f64, r: &MomentResult, wall_ms: Option<u64>) -> Self {
        Self {
            ids: spec.ids.iter().map(|i| i.to_string()).collect(),
            k: spec.k.clone(),
            t,
            value: r.value,
            error: r.error,
            clamped_fraction: r.clamped_fraction,
            wall_ms,
        }
    }
}

/// Evaluate the grids a spec needs and integrate.
pub fn joint_moment(spec: &MomentSpec) -> Result<MomentResult> {
    spec.validate()?;
    let grids = moment_grids(spec, GridOptions::default())?;
    let refs: Vec<&CriticalLineGrid> = grids.iter().collect();
    joint_moment_from_grids(&refs, &spec.k, spec.t, spec.window)
}

/// Grids for each id over the spec's range.
pub fn moment_grids(spec: &MomentSpec, opts: GridOptions) -> Result<Vec<CriticalLineGrid>> {
    let (lo, hi) = spec.range();
    let g = GridSpec::new(lo, hi, spec.step)?;
    let mut out = Vec::with_capacity(spec.ids.len());
    for (id, &k) in spec.ids.iter().zip(&spec.k) {
        if k == 0.0 {
            // Integrand factor is 1; a zero grid saves the evaluation.
            out.push(CriticalLineGrid::from_raw(id.clone(), g, vec![0.0; g.len()], opts.clamp_floor, opts.precision));
        } else {
            out.push(log_abs_grid_with(id, g, opts)?);
        }
    }
    Ok(out)
}

fn check_aligned(grids: &[&CriticalLineGrid], k: &[f64]) -> Result<GridSpec> {
    if grids.is_empty() || grids.len() != k.len() {
        return Err(Error::Domain("need one grid per exponent".into()));
    }
    let g = grids[0].spec;
    for other in grids {
        if other.spec != g || other.len() != grids[0].len() {
            return Err(Error::Domain("moment grids must share t0, t1 and step".into()));
        }
    }
    Ok(g)
}

/// Index n with t0 + n·step the last sample ≤ t.
fn last_index(g: &GridSpec, len: usize, t: f64) -> Result<usize> {
    if t < g.t0 {
        return Err(Error::Domain(format!("T = {t} below grid start {}", g.t0)));
    }
    let n = ((t - g.t0) / g.step * (1.0 + 4.0 * f64::EPSILON) + 1e-9).floor() as usize;
    if n >= len {
        return Err(Error::Domain(format!("T = {t} beyond grid end {}", g.t(len - 1))));
    }
    Ok(n)
}

fn clamp_info(grids: &[&CriticalLineGrid], k: &[f64], lo: usize, hi: usize) -> (f64, Option<String>) {
    let mut hit = vec![false; hi - lo + 1];
    for (g, &kk) in grids.iter().zip(k) {
        if kk == 0.0 {
            continue;
        }
        for &j in &g.clamped {
            if j >= lo && j <= hi {
                hit[j - lo] = true;
            }
        }
    }
    let frac = hit.iter().filter(|&&h| h).count() as f64 / hit.len() as f64;
    let warning = (frac > CLAMP_WARNING)
        .then(|| format!("{:.3}% of samples clamped; moment may be unreliable", 100.0 * frac));
    (frac, warning)
}

/// Moment from precomputed, aligned log|L| grids.
pub fn joint_moment_from_grids(grids: &[&CriticalLineGrid], k: &[f64], t: f64, window: Window) -> Result<MomentResult> {
    let g = check_aligned(grids, k)?;
    let len = grids[0].len();
    let integrand = |j: usize| -> f64 {
        let mut e = 0.0;
        for (gr, &kk) in grids.iter().zip(k) {
            if kk != 0.0 {
                e += 2.0 * kk * gr.values[j];
            }
        }
        e.exp()
    };
    match window {
        Window::Sharp => {
            let n = last_index(&g, len, t)?;
            let q = simpson_fn(n, g.step, integrand);
            let (frac, warning) = clamp_info(grids, k, 0, n);
            Ok(MomentResult { value: q.value, error: q.error, clamped_fraction: frac, warning })
        }
        Window::Gaussian => {
            let lo = t - WINDOW_REACH;
            let hi = 2.0 * t + WINDOW_REACH;
            let a = if lo <= g.t0 { 0 } else { ((lo - g.t0) / g.step).ceil() as usize };
            let b = last_index(&g, len, hi)?;
            let q = simpson_stream(b - a, g.step, |s, l| {
                (s..s + l)
                    .map(|i| {
                        let j = a + i;
                        integrand(j) * window_weight(g.t(j), t)
                    })
                    .collect()
            });
            let (frac, warning) = clamp_info(grids, k, a, b);
            Ok(MomentResult { value: q.value, error: q.error, clamped_fraction: frac, warning })
        }
    }
}

/// Sharp moments over [t0, T] for each T in `ts`, from a single set of grids.
pub fn moment_curve(grids: &[&CriticalLineGrid], k: &[f64], ts: &[f64]) -> Result<Vec<MomentResult>> {
    ts.iter().map(|&t| joint_moment_from_grids(grids, k, t, Window::Sharp)).collect()
}

/// Least-squares fit of log(I/T) = c + e·log log T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub t_min: f64,
    pub t_max: f64,
}

pub fn scaling_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    let t_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !(t_min > std::f64::consts::E) || t_max / t_min < 100.0 - 1e-9 {
        return Err(Error::Fit(format!("T values must exceed e and span two decades, got [{t_min}, {t_max}]")));
    }
    if points.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite())) {
        return Err(Error::Fit("moment values must be positive and finite".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln().ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| (p.1 / p.0).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-14 {
        return Err(Error::Fit("degenerate abscissas".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - exponent * x).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(FitResult { exponent, intercept, residual, t_min, t_max })
}

/// The twisted moment and its character decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistedMoment {
    pub a: u64,
    pub q: u64,
    pub k: f64,
    pub t: f64,
    pub value: Complex64,
    /// |value| / (T (log T)^{k²}).
    pub comparison: f64,
    /// Contribution of each character χ mod q, as (index, integral).
    pub components: Vec<(u64, Complex64)>,
}

fn complex_simpson<F: Fn(usize) -> Complex64 + Sync>(n: usize, h: f64, f: F) -> (Quad, Quad) {
    (simpson_fn(n, h, |j| f(j).re), simpson_fn(n, h, |j| f(j).im))
}

/// ∫_1^T q^{−it} ζ(½+it, a/q) conj ζ(½+it) |ζ(½+it)|^{2(k−1)} dt for each T in `ts`.
pub fn twisted_hurwitz_curve(a: u64, q: u64, k: f64, ts: &[f64], step: f64) -> Result<Vec<TwistedMoment>> {
    if q == 0 || a == 0 || a > q || gcd(a, q) != 1 {
        return Err(Error::Domain(format!("twisted moment needs 1 <= a <= q, gcd(a, q) = 1, got {a}/{q}")));
    }
    if !(k >= 0.5) {
        return Err(Error::Domain(format!("twisted moment needs k >= 1/2, got {k}")));
    }
    let t_max = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let g = GridSpec::new(1.0, t_max, step)?;
    let count = g.len();
    let zeta = value_grid(&LFunctionId::Zeta, 1.0, step, count)?;
    let weight: Vec<Complex64> = zeta.iter().map(|z| z.conj() * z.norm().powf(2.0 * (k - 1.0))).collect();
    drop(zeta);
    let ln_q = (q as f64).ln();
    let chars = character_group::<f64>(q)?;
    let phi = euler_phi(q) as f64;
    // q^{−it} ζ(½+it, a/q) = (√q/φ(q)) Σ_χ conj χ(a) L(½+it, χ).
    let mut lvals = Vec::with_capacity(chars.len());
    for chi in &chars {
        let id = if q == 1 { LFunctionId::Zeta } else { LFunctionId::Dirichlet(chi.id()) };
        lvals.push(value_grid(&id, 1.0, step, count)?);
    }
    let hurwitz = if q == 1 { None } else { Some(value_grid(&LFunctionId::hurwitz(a, q)?, 1.0, step, count)?) };
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let n = last_index(&g, count, t)?;
        let (re, im) = complex_simpson(n, step, |j| {
            let tj = g.t(j);
            match &hurwitz {
                Some(h) => Complex::from_polar(1.0, -tj * ln_q) * h[j] * weight[j],
                None => lvals[0][j] * weight[j],
            }
        });
        let value = Complex::new(re.value, im.value);
        let mut components = Vec::with_capacity(chars.len());
        for (chi, l) in chars.iter().zip(&lvals) {
            let c = chi.value(a).conj() * (q as f64).sqrt() / phi;
            let (re, im) = complex_simpson(n, step, |j| c * l[j] * weight[j]);
            components.push((chi.index(), Complex::new(re.value, im.value)));
        }
        let comparison = value.norm() / (t * t.ln().powf(k * k));
        out.push(TwistedMoment { a, q, k, t, value, comparison, components });
    }
    Ok(out)
}

pub fn twisted_hurwitz_moment(a: u64, q: u64, k: f64, t: f64) -> Result<TwistedMoment> {
    let mut v = twisted_hurwitz_curve(a, q, k, &[t], default_step(t))?;
    Ok(v.pop().unwrap())
}

/// Fit of each non-principal component against T(log T)^e, next to the
/// bound k² − k + ½.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTermFit {
    pub index: u64,
    pub fit: FitResult,
    pub bound: f64,
}

pub fn twisted_cross_fits(curve: &[TwistedMoment]) -> Result<Vec<CrossTermFit>> {
    let first = curve.first().ok_or_else(|| Error::Fit("empty twisted curve".into()))?;
    let k = first.k;
    let mut out = Vec::new();
    for (ci, &(index, _)) in first.components.iter().enumerate() {
        if index == 0 {
            continue;
        }
        let pts: Vec<(f64, f64)> = curve.iter().map(|m| (m.t, m.components[ci].1.norm())).collect();
        out.push(CrossTermFit { index, fit: scaling_fit(&pts)?, bound: k * k - k + 0.5 });
    }
    Ok(out)
}
