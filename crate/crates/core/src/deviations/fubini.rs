//! The layer-cake identity between moments and tails,
//!
//!   ∫ ∏|L_j|^{2k_j} dt = 2^r s^r k_1⋯k_r ∫_{ℝ^r} e^{2s Σ k_j W_j} Φ_T(W) dW,
//!   s = √(½ log log T),
//!
//! and the split of its right side into the 3^r boxes around V.
//!
//! The V-lattice Riemann sums use the exact cell weights
//! ∫_cell ∏ 2sk_j e^{2sk_jW_j} dW, with Φ taken at the lower corner (an
//! upper sum) and at the upper corner (a lower sum). Since Φ is a sample
//! count, each lattice sum collapses to a sum over samples of ∏ E_j(e),
//! E_j(W) = e^{2sk_jW}, with e the lattice point just above (upper sum) or
//! at/below (lower sum) the sample. That is how they are computed here.

use serde::{Deserialize, Serialize};

use crate::deviations::tail::TailGrid;
use crate::error::{Error, Result};
use crate::moments::quadrature::ordered_sum;

/// Largest tolerated (upper − lower)/(upper + lower) of the lattice sums.
pub const RESOLUTION_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FubiniReport {
    pub t: f64,
    pub k: Vec<f64>,
    pub v_step: f64,
    /// Sample moment δ Σ_t ∏ |L_j|^{2k_j}.
    pub lhs: f64,
    /// Midpoint of the two lattice sums.
    pub rhs: f64,
    pub rhs_lower: f64,
    pub rhs_upper: f64,
    /// |rhs − lhs| / lhs.
    pub gap: f64,
    /// (upper − lower)/(upper + lower).
    pub resolution: f64,
}

fn check_k(tg: &TailGrid, k: &[f64]) -> Result<()> {
    if k.len() != tg.r() || k.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
        return Err(Error::Domain(format!("need {} positive exponents", tg.r())));
    }
    Ok(())
}

pub fn fubini_check(tg: &TailGrid, k: &[f64]) -> Result<FubiniReport> {
    check_k(tg, k)?;
    let h = tg.v_step;
    let s = tg.norm;
    let c: Vec<f64> = k.iter().map(|k| 2.0 * s * k).collect();
    let lo: Vec<f64> = (0..tg.r()).map(|j| tg.lattice_floor(j)).collect();
    let n = tg.len();
    let mut exact = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    for i in 0..n {
        let (mut e, mut u, mut l) = (0.0, 0.0, 0.0);
        for j in 0..tg.r() {
            let w = tg.columns[j][i];
            let b = ((w - lo[j]) / h).floor();
            e += c[j] * w;
            l += c[j] * (lo[j] + b * h);
            u += c[j] * (lo[j] + (b + 1.0) * h);
        }
        exact.push(e.exp());
        upper.push(u.exp());
        lower.push(l.exp());
    }
    let lhs = tg.step * ordered_sum(exact);
    let rhs_upper = tg.step * ordered_sum(upper);
    let rhs_lower = tg.step * ordered_sum(lower);
    let rhs = 0.5 * (rhs_upper + rhs_lower);
    let resolution = (rhs_upper - rhs_lower) / (rhs_upper + rhs_lower);
    if resolution > RESOLUTION_LIMIT {
        return Err(Error::Resolution { estimate: resolution, limit: RESOLUTION_LIMIT });
    }
    Ok(FubiniReport {
        t: tg.t,
        k: k.to_vec(),
        v_step: h,
        lhs,
        rhs,
        rhs_lower,
        rhs_upper,
        gap: (rhs - lhs).abs() / lhs,
        resolution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub t: f64,
    pub c: Vec<f64>,
    pub v: Vec<f64>,
    /// k_j = c_j/√2.
    pub k: Vec<f64>,
    pub epsilon: f64,
    /// Box index per coordinate: −1 below, 0 central, +1 above; with its mass.
    pub boxes: Vec<(Vec<i8>, f64)>,
    pub total: f64,
    pub central_fraction: f64,
}

/// Share of ∫ e^{2sΣk_jW_j} Φ_T(W) dW lying in ∏ [V_j(1−ε), V_j(1+ε)], with
/// V_j = c_j √(log log T) and k_j = c_j/√2. Each sample's contribution to a
/// box is integrated exactly, so no lattice is involved.
pub fn mass_concentration_check(tg: &TailGrid, c: &[f64], epsilon: f64) -> Result<MassReport> {
    if c.len() != tg.r() || c.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::Domain(format!("need {} positive c values", tg.r())));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    let r = tg.r();
    if r > 6 {
        return Err(Error::Domain("at most 6 L-functions (3^r boxes)".into()));
    }
    let ll = tg.t.ln().ln().sqrt();
    let v: Vec<f64> = c.iter().map(|x| x * ll).collect();
    let k: Vec<f64> = c.iter().map(|x| x / std::f64::consts::SQRT_2).collect();
    let rate: Vec<f64> = k.iter().map(|k| 2.0 * tg.norm * k).collect();
    // Edges (−∞, a, b, ∞) per coordinate.
    let edges: Vec<[f64; 4]> = v
        .iter()
        .map(|v| [f64::NEG_INFINITY, v * (1.0 - epsilon), v * (1.0 + epsilon), f64::INFINITY])
        .collect();
    let nbox = 3usize.pow(r as u32);
    let mut per_box = vec![Vec::with_capacity(tg.len()); nbox];
    let mut piece = vec![[0.0f64; 3]; r];
    for i in 0..tg.len() {
        for j in 0..r {
            let w = tg.columns[j][i];
            let e = |x: f64| if x == f64::NEG_INFINITY { 0.0 } else { (rate[j] * x).exp() };
            for b in 0..3 {
                let (a, z) = (edges[j][b], edges[j][b + 1]);
                piece[j][b] = if w <= a { 0.0 } else { e(w.min(z)) - e(a) };
            }
        }
        for (bi, acc) in per_box.iter_mut().enumerate() {
            let mut m = 1.0;
            let mut rest = bi;
            for p in piece.iter() {
                m *= p[rest % 3];
                rest /= 3;
            }
            acc.push(m);
        }
    }
    let mut boxes = Vec::with_capacity(nbox);
    for (bi, vals) in per_box.into_iter().enumerate() {
        let mut idx = Vec::with_capacity(r);
        let mut rest = bi;
        for _ in 0..r {
            idx.push((rest % 3) as i8 - 1);
            rest /= 3;
        }
        boxes.push((idx, tg.step * ordered_sum(vals)));
    }
    let total = ordered_sum(boxes.iter().map(|b| b.1));
    let central = boxes.iter().find(|b| b.0.iter().all(|x| *x == 0)).map_or(0.0, |b| b.1);
    Ok(MassReport { t: tg.t, c: c.to_vec(), v, k, epsilon, boxes, total, central_fraction: central / total })
}
