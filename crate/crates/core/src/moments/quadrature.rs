//! Composite Simpson quadrature on uniform samples, with a step-halving
//! error estimate and a fixed reduction order.
//!
//! n intervals of width h. Even n is plain Simpson; odd n ≥ 3 closes with
//! the 3/8 rule on the last three intervals; n = 1 is a trapezoid. The
//! coarse estimate runs the same rule on the even-indexed samples (plus a
//! trapezoid for a leftover interval), and |fine − coarse|/15 is reported.
//!
//! Samples are produced block by block, so a 10⁸-point integral never needs
//! its integrand in memory. Blocks have a fixed size and their partial sums
//! are combined in index order, which keeps results bit-identical across
//! thread counts.

use rayon::prelude::*;

/// Samples per block handed to the producer.
pub const BLOCK: usize = 1 << 16;

/// Simpson-type weight of sample j (in units of h) for n intervals.
#[inline]
pub fn weight(j: usize, n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 0.5,
        _ if n % 2 == 0 => {
            if j == 0 || j == n {
                1.0 / 3.0
            } else if j % 2 == 1 {
                4.0 / 3.0
            } else {
                2.0 / 3.0
            }
        }
        _ => {
            let head = n - 3;
            let mut w = if j <= head { weight(j, head) } else { 0.0 };
            if j >= head {
                w += match j - head {
                    0 | 3 => 3.0 / 8.0,
                    _ => 9.0 / 8.0,
                };
            }
            w
        }
    }
}

/// Weight of sample j in the doubled-step rule (in units of h).
#[inline]
fn coarse_weight(j: usize, n: usize) -> f64 {
    let m = n / 2;
    let mut w = if j % 2 == 0 && j / 2 <= m { 2.0 * weight(j / 2, m) } else { 0.0 };
    if n % 2 == 1 && j + 1 >= n {
        w += 0.5;
    }
    w
}

/// Integral with its step-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

/// Neumaier summation of an ordered sequence.
pub fn ordered_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// ∫ over samples 0..=n of step h, with the integrand produced per block
/// by `produce(start, len)`, which must return `len` values.
pub fn simpson_stream<P>(n: usize, h: f64, produce: P) -> Quad
where
    P: Fn(usize, usize) -> Vec<f64> + Sync,
{
    let total = n + 1;
    let starts: Vec<usize> = (0..total).step_by(BLOCK).collect();
    let parts: Vec<(f64, f64)> = starts
        .par_iter()
        .map(|&s| {
            let len = BLOCK.min(total - s);
            let vals = produce(s, len);
            debug_assert_eq!(vals.len(), len);
            let mut fine = 0.0;
            let mut coarse = 0.0;
            for (i, v) in vals.iter().enumerate() {
                let j = s + i;
                fine += weight(j, n) * v;
                coarse += coarse_weight(j, n) * v;
            }
            (fine, coarse)
        })
        .collect();
    let fine = ordered_sum(parts.iter().map(|p| p.0)) * h;
    let coarse = ordered_sum(parts.iter().map(|p| p.1)) * h;
    Quad { value: fine, error: (fine - coarse).abs() / 15.0 }
}

/// ∫ over samples 0..=n given a per-index integrand.
pub fn simpson_fn<F>(n: usize, h: f64, f: F) -> Quad
where
    F: Fn(usize) -> f64 + Sync,
{
    simpson_stream(n, h, |s, len| (s..s + len).map(&f).collect())
}

/// ∫ of a sampled slice.
pub fn simpson(values: &[f64], h: f64) -> Quad {
    if values.is_empty() {
        return Quad::default();
    }
    simpson_fn(values.len() - 1, h, |j| values[j])
}
