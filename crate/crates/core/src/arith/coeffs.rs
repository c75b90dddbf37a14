//! Multiplicative coefficient machinery: d_k, h_k, the r-fold convolution 𝐡,
//! and the cached [`MultiplicativeSeries`] that houses them.

use std::sync::Arc;

use num_complex::Complex;

use crate::arith::primes::{factorize, smallest_prime_factors};
use crate::arith::satake::SatakeSpec;
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// d_k(p^ℓ) = Γ(k+ℓ)/(Γ(k)ℓ!) via the rising product ∏_{i<ℓ}(k+i)/(i+1).
pub fn divisor_coeff<S: Real>(k: S, l: u32) -> Result<S> {
    if !(k > S::zero()) {
        return domain(format!("divisor_coeff needs k > 0, got {k}"));
    }
    Ok(divisor_coeffs(k, l as usize).pop().expect("nonempty"))
}

/// `[d_k(1), d_k(p), …, d_k(p^max_l)]`; requires k > 0 (not checked).
pub(crate) fn divisor_coeffs<S: Real>(k: S, max_l: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(max_l + 1);
    let mut d = S::one();
    out.push(d);
    for i in 0..max_l {
        d = d * (k + S::from_usize_lossy(i)) / S::from_usize_lossy(i + 1);
        out.push(d);
    }
    out
}

fn zero<S: Real>() -> Complex<S> {
    Complex::new(S::zero(), S::zero())
}

/// Truncated product of power series (coefficients up to `len − 1`).
fn mul_series<S: Real>(a: &[Complex<S>], b: &[Complex<S>], len: usize) -> Vec<Complex<S>> {
    let mut out = vec![zero(); len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// h_k(p^ℓ) for ℓ = 0..=max_l, as the coefficients of ∏_j (1 − α_j z)^{−k}.
/// Expanding the product is the same as summing over compositions
/// ℓ_1+…+ℓ_m = ℓ of ∏ d_k(p^{ℓ_j}) α_j^{ℓ_j}.
pub fn h_series<S: Real>(k: S, spec: &SatakeSpec<S>, p: u64, max_l: usize) -> Result<Vec<Complex<S>>> {
    let d = divisor_coeffs(k, max_l);
    let alphas = spec.alphas(p)?;
    Ok(h_series_from(&d, &alphas, max_l))
}

fn h_series_from<S: Real>(d: &[S], alphas: &[Complex<S>], max_l: usize) -> Vec<Complex<S>> {
    let len = max_l + 1;
    let mut acc = vec![zero(); len];
    acc[0] = Complex::new(S::one(), S::zero());
    for &a in alphas {
        let mut pw = Complex::new(S::one(), S::zero());
        let factor: Vec<Complex<S>> = d
            .iter()
            .take(len)
            .map(|&dl| {
                let v = pw * dl;
                pw *= a;
                v
            })
            .collect();
        acc = mul_series(&acc, &factor, len);
    }
    acc
}

/// h_k(p^ℓ) for a single ℓ.
pub fn h_coeff<S: Real>(k: S, spec: &SatakeSpec<S>, p: u64, l: u32) -> Result<Complex<S>> {
    if !(k > S::zero()) {
        return domain(format!("h_coeff needs k > 0, got {k}"));
    }
    Ok(h_series(k, spec, p, l as usize)?[l as usize])
}

/// Prime-power rule `(p, max_l) ↦ [c(1), c(p), …, c(p^max_l)]`.
pub type PrimePowerRule<S> = Arc<dyn Fn(u64, usize) -> Result<Vec<Complex<S>>> + Send + Sync>;

/// A multiplicative arithmetic function with cached values on `1..=n_max`.
#[derive(Clone)]
pub struct MultiplicativeSeries<S: Real> {
    n_max: usize,
    coeffs: Vec<Complex<S>>,
    rule: PrimePowerRule<S>,
}

impl<S: Real> std::fmt::Debug for MultiplicativeSeries<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiplicativeSeries").field("n_max", &self.n_max).finish_non_exhaustive()
    }
}

impl<S: Real> MultiplicativeSeries<S> {
    /// Fill the cache on `1..=n_max` from the prime-power rule.
    pub fn from_rule(n_max: usize, rule: PrimePowerRule<S>) -> Result<Self> {
        let n_max = n_max.max(1);
        let spf = smallest_prime_factors(n_max);
        let mut coeffs = vec![zero(); n_max + 1];
        coeffs[1] = Complex::new(S::one(), S::zero());
        let mut filled = vec![false; n_max + 1];
        filled[1] = true;
        for n in 2..=n_max {
            if filled[n] {
                continue;
            }
            let p = spf[n] as usize;
            if p == n {
                // n is prime: fill every power at once.
                let mut max_l = 0;
                let mut pw = 1usize;
                while pw <= n_max / p {
                    pw *= p;
                    max_l += 1;
                }
                let vals = rule(p as u64, max_l)?;
                let mut pw = 1usize;
                for v in vals.iter().take(max_l + 1).skip(1) {
                    pw *= p;
                    coeffs[pw] = *v;
                    filled[pw] = true;
                }
                continue;
            }
            let mut m = n;
            let mut pe = 1;
            while m % p == 0 {
                m /= p;
                pe *= p;
            }
            coeffs[n] = if m == 1 { coeffs[pe] } else { coeffs[m] * coeffs[pe] };
            filled[n] = true;
        }
        Ok(Self { n_max, coeffs, rule })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Cached values, indexed by n (index 0 holds zero).
    pub fn coeffs(&self) -> &[Complex<S>] {
        &self.coeffs
    }

    /// Value at any n ≥ 1; beyond the cache it is rebuilt from the rule.
    pub fn coefficient(&self, n: u64) -> Result<Complex<S>> {
        if n == 0 {
            return Err(Error::Domain("coefficients start at n = 1".into()));
        }
        if (n as usize) <= self.n_max {
            return Ok(self.coeffs[n as usize]);
        }
        let mut c = Complex::new(S::one(), S::zero());
        for (p, e) in factorize(n) {
            c *= (self.rule)(p, e as usize)?[e as usize];
        }
        Ok(c)
    }

    /// Value at p^ℓ straight from the rule.
    pub fn prime_power(&self, p: u64, l: usize) -> Result<Complex<S>> {
        Ok((self.rule)(p, l)?[l])
    }
}

/// d_k as a multiplicative series (zeta with exponent k).
pub fn divisor_series<S: Real>(k: S, n_max: usize) -> Result<MultiplicativeSeries<S>> {
    if !(k > S::zero()) {
        return domain(format!("divisor_series needs k > 0, got {k}"));
    }
    let rule: PrimePowerRule<S> = Arc::new(move |_p, max_l| {
        Ok(divisor_coeffs(k, max_l).into_iter().map(|d| Complex::new(d, S::zero())).collect())
    });
    MultiplicativeSeries::from_rule(n_max, rule)
}

/// 𝐡_{k_1,…,k_r} up to N: r-fold Dirichlet convolution of the h_{k_i} at
/// prime-power level, then multiplicative extension.
pub fn big_h<S: Real>(k: &[S], specs: &[SatakeSpec<S>], n: usize) -> Result<MultiplicativeSeries<S>> {
    if k.len() != specs.len() {
        return domain(format!("{} exponents for {} specs", k.len(), specs.len()));
    }
    if k.is_empty() {
        return domain("at least one factor is required");
    }
    if let Some(bad) = k.iter().find(|&&x| !(x > S::zero())) {
        return domain(format!("exponents must be positive, got {bad}"));
    }
    let k: Vec<S> = k.to_vec();
    let specs: Vec<SatakeSpec<S>> = specs.to_vec();
    // Enough d_k values for p = 2 at any N we can hold.
    let d_tables: Vec<Vec<S>> = k.iter().map(|&ki| divisor_coeffs(ki, 64)).collect();
    let rule: PrimePowerRule<S> = Arc::new(move |p, max_l| {
        let len = max_l + 1;
        let mut acc = vec![zero(); len];
        acc[0] = Complex::new(S::one(), S::zero());
        let mut alphas = Vec::new();
        for (spec, d) in specs.iter().zip(&d_tables) {
            spec.alphas_into(p, &mut alphas)?;
            let h = if max_l < d.len() {
                h_series_from(d, &alphas, max_l)
            } else {
                h_series_from(&divisor_coeffs(d[1], max_l), &alphas, max_l)
            };
            acc = mul_series(&acc, &h, len);
        }
        Ok(acc)
    });
    MultiplicativeSeries::from_rule(n, rule)
}

/// Result of [`partial_sum_sq`] with the two Lemma-2.2 comparisons.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PartialSumReport {
    pub n: usize,
    pub sigma: f64,
    pub value: f64,
    /// Σ k_i² of the exponent vector.
    pub k_sq: f64,
    /// value · (σ − ½)^{Σk²}; only for σ > ½.
    pub ratio_sigma: Option<f64>,
    /// value / (log N)^{Σk²}; only for N ≥ 2.
    pub ratio_log: Option<f64>,
}

/// Σ_{n≤N} |𝐡(n)|² n^{−2σ} for the product described by `k`, `specs`.
pub fn partial_sum_sq<S: Real>(k: &[S], specs: &[SatakeSpec<S>], n: usize, sigma: S) -> Result<PartialSumReport> {
    if sigma < S::lit(0.5) {
        return domain(format!("partial_sum_sq needs sigma >= 1/2, got {sigma}"));
    }
    let h = big_h(k, specs, n)?;
    Ok(partial_sum_sq_of(&h, k, n, sigma))
}

/// As [`partial_sum_sq`] on an already built series.
pub fn partial_sum_sq_of<S: Real>(h: &MultiplicativeSeries<S>, k: &[S], n: usize, sigma: S) -> PartialSumReport {
    let n = n.min(h.n_max());
    let two_sigma = 2.0 * sigma.as_f64();
    // Accumulate in f64 regardless of S; the sum has up to 10⁷ terms.
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for (i, c) in h.coeffs().iter().enumerate().take(n + 1).skip(1) {
        let term = c.norm_sqr().as_f64() * (i as f64).powf(-two_sigma);
        let y = term - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    let k_sq: f64 = k.iter().map(|x| x.as_f64().powi(2)).sum();
    let s = sigma.as_f64();
    PartialSumReport {
        n,
        sigma: s,
        value: acc,
        k_sq,
        ratio_sigma: (s > 0.5).then(|| acc * (s - 0.5).powf(k_sq)),
        ratio_log: (n >= 2).then(|| acc / (n as f64).ln().powf(k_sq)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::characters::DirichletCharacter;
    use crate::arith::satake::satake_from_character;

    fn compositions(l: usize, m: usize) -> Vec<Vec<usize>> {
        if m == 1 {
            return vec![vec![l]];
        }
        (0..=l)
            .flat_map(|a| {
                compositions(l - a, m - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, a);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisor_coeff(2.0f64, 3).unwrap(), 4.0);
        assert_eq!(divisor_coeff(1.0f64, 17).unwrap(), 1.0);
        assert!((divisor_coeff(0.37f64, 1).unwrap() - 0.37).abs() < 1e-16);
        assert!(divisor_coeff(0.0f64, 1).is_err());
        // Large ℓ stays finite.
        assert!(divisor_coeff(3.5f64, 400).unwrap().is_finite());
        assert!((divisor_coeff(2.0f32, 3).unwrap() - 4.0).abs() < 1e-6);
    }

    #[test]
    fn h_matches_composition_sum() {
        let mut t = std::collections::BTreeMap::new();
        t.insert(5u64, vec![Complex::new(0.6, 0.8), Complex::new(1.0, 0.0), Complex::new(0.0, -1.0)]);
        let spec = SatakeSpec::from_table("deg3", 3, t, true, []).unwrap();
        let k = 1.7;
        let alphas = spec.alphas(5).unwrap();
        for l in 0..7usize {
            let brute: Complex<f64> = compositions(l, 3)
                .iter()
                .map(|c| {
                    c.iter()
                        .zip(&alphas)
                        .map(|(&li, a)| a.powu(li as u32) * divisor_coeff(k, li as u32).unwrap())
                        .product::<Complex<f64>>()
                })
                .sum();
            let h = h_coeff(k, &spec, 5, l as u32).unwrap();
            assert!((h - brute).norm() < 1e-12, "l={l}");
        }
        // ℓ = 1 gives k·a(p).
        let a1: Complex<f64> = alphas.iter().sum();
        assert!((h_coeff(k, &spec, 5, 1).unwrap() - a1 * k).norm() < 1e-14);
    }

    #[test]
    fn h_examples() {
        let chi = satake_from_character(&DirichletCharacter::<f64>::new(4, 1).unwrap());
        assert_eq!(h_coeff(1.0, &chi, 3, 2).unwrap(), Complex::new(1.0, 0.0));
        let z = SatakeSpec::<f64>::zeta();
        assert!((h_coeff(2.5, &z, 7, 4).unwrap().re - divisor_coeff(2.5, 4).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn big_h_examples() {
        let z = SatakeSpec::<f64>::zeta();
        let one = big_h(&[1.0], std::slice::from_ref(&z), 1000).unwrap();
        assert!(one.coeffs()[1..].iter().all(|c| *c == Complex::new(1.0, 0.0)));
        let two = big_h(&[2.0], std::slice::from_ref(&z), 100).unwrap();
        assert_eq!(two.coeffs()[12], Complex::new(6.0, 0.0));
        assert!(big_h(&[1.0, 2.0], std::slice::from_ref(&z), 10).is_err());
        let chi = satake_from_character(&DirichletCharacter::<f64>::new(4, 1).unwrap());
        let h = big_h(&[0.5, 1.5], &[z, chi.clone()], 200).unwrap();
        for p in [3u64, 5, 7, 11, 13] {
            let expect = 0.5 + 1.5 * chi.alphas(p).unwrap()[0].re;
            assert!((h.coeffs()[p as usize].re - expect).abs() < 1e-14);
        }
        // Beyond the cache the rule is used.
        assert!((h.coefficient(3 * 3 * 101).unwrap() - h.coeffs()[9] * h.coeffs()[101]).norm() < 1e-14);
    }

    #[test]
    fn partial_sums() {
        let z = SatakeSpec::<f64>::zeta();
        let r = partial_sum_sq(&[1.0], std::slice::from_ref(&z), 1, 0.5).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(partial_sum_sq(&[1.0], &[z], 10, 0.4).is_err());
    }
}
