//! Batched evaluation of F(t) = Σ_n c_n e^{−i t ln b_n} on a uniform t-grid.
//!
//! Every grid quantity in the crate (Riemann–Siegel main sums, the direct
//! part of Euler–Maclaurin, the prime-block polynomials) is a sum of this
//! shape. Two kernels are provided:
//!
//! * a rotation recurrence, z_n ← z_n·e^{−iδ ln b_n}, reseeded every
//!   [`RESEED`] steps so phase drift stays at rounding level;
//! * a type-1 non-uniform FFT with Gaussian gridding, which evaluates a
//!   whole block of K points in O(L + K log K) instead of O(LK).
//!
//! [`eval_grid`] picks between them by a simple cost model. The grid is cut
//! into blocks whose boundaries depend only on the inputs, and blocks are
//! reduced in index order, so output is bit-identical for any worker count.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::Complex64;

/// Steps between exact phase recomputations in the recurrence.
pub const RESEED: usize = 256;

/// Half-width (in fine-grid cells) of the Gaussian spreading kernel.
const SPREAD: usize = 15;

/// Oversampling factor of the fine grid.
const OVERSAMPLE: usize = 2;

/// Largest block handled by one FFT.
const MAX_BLOCK: usize = 1 << 17;

/// Blocks of the direct kernel, small enough to keep the cache warm.
const DIRECT_BLOCK: usize = 2048;

/// Terms c_n and log-bases ln b_n of a Dirichlet-type polynomial.
#[derive(Debug, Clone, Default)]
pub struct PowerSum {
    pub ln_b: Vec<f64>,
    pub coeff: Vec<Complex64>,
}

impl PowerSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self { ln_b: Vec::with_capacity(n), coeff: Vec::with_capacity(n) }
    }

    /// Σ_{n ≤ len} a_n n^{−σ−it} with `a[n−1] = a_n`; zero coefficients dropped.
    pub fn dirichlet(a: &[Complex64], sigma: f64) -> Self {
        let mut ps = Self::with_capacity(a.len());
        for (i, &c) in a.iter().enumerate() {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let ln = ((i + 1) as f64).ln();
            ps.push(ln, c * (-sigma * ln).exp());
        }
        ps
    }

    #[inline]
    pub fn push(&mut self, ln_b: f64, c: Complex64) {
        self.ln_b.push(ln_b);
        self.coeff.push(c);
    }

    pub fn len(&self) -> usize {
        self.ln_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_b.is_empty()
    }

    /// Single evaluation by direct summation.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex::new(0.0, 0.0);
        for (&l, &c) in self.ln_b.iter().zip(&self.coeff) {
            let (s, co) = (t * l).sin_cos();
            acc += c * Complex::new(co, -s);
        }
        acc
    }
}

/// Which kernel [`eval_grid`] should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Auto,
    Direct,
    Nufft,
}

/// F(t0 + jδ) for j in 0..count.
pub fn eval_grid(ps: &PowerSum, t0: f64, delta: f64, count: usize, kernel: Kernel) -> Vec<Complex64> {
    if count == 0 {
        return Vec::new();
    }
    if ps.is_empty() {
        return vec![Complex::new(0.0, 0.0); count];
    }
    let kernel = match kernel {
        Kernel::Auto => choose(ps.len(), count),
        k => k,
    };
    match kernel {
        Kernel::Direct => {
            let blocks = split(count, DIRECT_BLOCK);
            let parts: Vec<Vec<Complex64>> = blocks
                .par_iter()
                .map(|&(start, len)| direct(ps, t0 + start as f64 * delta, delta, len))
                .collect();
            parts.concat()
        }
        _ => {
            let block = MAX_BLOCK.min(count.next_power_of_two()).max(16);
            let plan = NufftPlan::new(block);
            let blocks = split(count, block);
            let parts: Vec<Vec<Complex64>> = blocks
                .par_iter()
                .map(|&(start, len)| {
                    let mut v = plan.run(ps, t0 + start as f64 * delta, delta);
                    v.truncate(len);
                    v
                })
                .collect();
            parts.concat()
        }
    }
}

fn split(count: usize, block: usize) -> Vec<(usize, usize)> {
    (0..count).step_by(block).map(|s| (s, block.min(count - s))).collect()
}

fn choose(terms: usize, count: usize) -> Kernel {
    let k = MAX_BLOCK.min(count.next_power_of_two()).max(16) as f64;
    let blocks = (count as f64 / k).ceil();
    let direct = terms as f64 * count as f64;
    let nufft = blocks * (terms as f64 * (4 * SPREAD + 40) as f64 + 2.0 * k * (2.0 * k).log2() * 3.0 + 20.0 * k);
    if nufft < direct {
        Kernel::Nufft
    } else {
        Kernel::Direct
    }
}

/// Rotation recurrence over one block.
pub fn direct(ps: &PowerSum, t0: f64, delta: f64, count: usize) -> Vec<Complex64> {
    const LANES: usize = 8;
    let l = ps.len();
    let padded = l.div_ceil(LANES) * LANES;
    let mut zr = vec![0.0; padded];
    let mut zi = vec![0.0; padded];
    let mut rr = vec![1.0; padded];
    let mut ri = vec![0.0; padded];
    for n in 0..l {
        let (s, c) = (delta * ps.ln_b[n]).sin_cos();
        rr[n] = c;
        ri[n] = -s;
    }
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        if j % RESEED == 0 {
            let t = t0 + j as f64 * delta;
            for n in 0..l {
                let (s, c) = (t * ps.ln_b[n]).sin_cos();
                let a = ps.coeff[n];
                zr[n] = a.re * c + a.im * s;
                zi[n] = a.im * c - a.re * s;
            }
        }
        let mut acc_r = [0.0; LANES];
        let mut acc_i = [0.0; LANES];
        for (((zr, zi), rr), ri) in zr
            .chunks_exact_mut(LANES)
            .zip(zi.chunks_exact_mut(LANES))
            .zip(rr.chunks_exact(LANES))
            .zip(ri.chunks_exact(LANES))
        {
            for q in 0..LANES {
                acc_r[q] += zr[q];
                acc_i[q] += zi[q];
                let a = zr[q] * rr[q] - zi[q] * ri[q];
                let b = zr[q] * ri[q] + zi[q] * rr[q];
                zr[q] = a;
                zi[q] = b;
            }
        }
        out.push(Complex::new(acc_r.iter().sum(), acc_i.iter().sum()));
    }
    out
}

/// Reusable state for Gaussian-gridding NUFFT blocks of a fixed size.
pub struct NufftPlan {
    block: usize,
    fine: usize,
    tau: f64,
    fft: Arc<dyn Fft<f64>>,
    e3: Vec<f64>,
    deconv: Vec<f64>,
}

impl NufftPlan {
    pub fn new(block: usize) -> Self {
        let k = block as f64;
        let r = OVERSAMPLE as f64;
        let fine = OVERSAMPLE * block;
        let tau = std::f64::consts::PI * SPREAD as f64 / (k * k * r * (r - 0.5));
        let h = 2.0 * std::f64::consts::PI / fine as f64;
        let e3 = (0..=SPREAD).map(|l| (-(l as f64 * h).powi(2) / (4.0 * tau)).exp()).collect();
        let scale = (std::f64::consts::PI / tau).sqrt() / fine as f64;
        let half = (block / 2) as i64;
        let deconv = (0..block as i64)
            .map(|j| {
                let kk = (j - half) as f64;
                scale * (kk * kk * tau).exp()
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(fine);
        Self { block, fine, tau, fft, e3, deconv }
    }

    pub fn block(&self) -> usize {
        self.block
    }

    /// F(t0 + jδ) for j in 0..block.
    pub fn run(&self, ps: &PowerSum, t0: f64, delta: f64) -> Vec<Complex64> {
        use std::f64::consts::TAU;
        let half = self.block / 2;
        let tc = t0 + half as f64 * delta;
        let fine = self.fine;
        let h = TAU / fine as f64;
        let inv_h = 1.0 / h;
        let mut grid = vec![Complex::new(0.0, 0.0); fine];
        let w = SPREAD as i64;
        for (&l, &c) in ps.ln_b.iter().zip(&ps.coeff) {
            let (s, co) = (tc * l).sin_cos();
            let cc = c * Complex::new(co, -s);
            let x = (delta * l).rem_euclid(TAU);
            let m0 = (x * inv_h).floor();
            let d = x - m0 * h;
            let m0 = m0 as i64;
            let e1 = (-d * d / (4.0 * self.tau)).exp();
            let e2 = (h * d / (2.0 * self.tau)).exp();
            let e2_inv = 1.0 / e2;
            // l ≥ 0 runs forward, l < 0 backward; both start from e1.
            let mut pw = e1;
            for lo in 0..=w {
                let idx = (m0 + lo).rem_euclid(fine as i64) as usize;
                let wt = pw * self.e3[lo as usize];
                grid[idx] += cc * wt;
                pw *= e2;
            }
            let mut pw = e1 * e2_inv;
            for lo in 1..w {
                let idx = (m0 - lo).rem_euclid(fine as i64) as usize;
                let wt = pw * self.e3[lo as usize];
                grid[idx] += cc * wt;
                pw *= e2_inv;
            }
        }
        self.fft.process(&mut grid);
        (0..self.block)
            .map(|j| {
                let k = j as i64 - half as i64;
                let idx = k.rem_euclid(fine as i64) as usize;
                grid[idx] * self.deconv[j]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(len: usize, sigma: f64) -> PowerSum {
        let a: Vec<Complex64> = (1..=len)
            .map(|n| Complex::new(((n * 7919) % 13) as f64 - 6.0, ((n * 104729) % 5) as f64 - 2.0))
            .collect();
        PowerSum::dirichlet(&a, sigma)
    }

    #[test]
    fn direct_matches_naive() {
        let ps = sample(300, 0.5);
        let got = direct(&ps, 1234.5, 0.013, 700);
        for (j, g) in got.iter().enumerate() {
            let want = ps.eval(1234.5 + j as f64 * 0.013);
            assert!((g - want).norm() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn nufft_matches_direct() {
        let ps = sample(5000, 0.5);
        let scale: f64 = ps.coeff.iter().map(|c| c.norm()).sum();
        let max_ln = ps.ln_b.iter().cloned().fold(0.0, f64::max);
        for &(t0, delta, block) in &[(1e5, 0.02, 1024usize), (37.0, 0.5, 64), (2e6 + 0.3, 0.011, 4096)] {
            // Both kernels round t·ln b independently; allow for that phase noise.
            let phase_noise = 4.0 * f64::EPSILON * (t0 + delta * block as f64) * max_ln;
            let plan = NufftPlan::new(block);
            let fast = plan.run(&ps, t0, delta);
            let slow = direct(&ps, t0, delta, block);
            let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err < (1e-13 + phase_noise) * scale, "t0={t0}: err {err} scale {scale}");
        }
    }

    #[test]
    fn grid_kernels_agree_and_are_deterministic() {
        let ps = sample(2000, 0.5);
        let a = eval_grid(&ps, 500.0, 0.02, 20_000, Kernel::Nufft);
        let b = eval_grid(&ps, 500.0, 0.02, 20_000, Kernel::Direct);
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| eval_grid(&ps, 500.0, 0.02, 20_000, Kernel::Nufft));
        assert!(a.iter().zip(&c).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }

    #[test]
    fn empty_and_zero_count() {
        let ps = PowerSum::new();
        assert_eq!(eval_grid(&ps, 1.0, 0.1, 3, Kernel::Auto), vec![Complex::new(0.0, 0.0); 3]);
        assert!(eval_grid(&sample(3, 0.0), 1.0, 0.1, 0, Kernel::Auto).is_empty());
    }
}
