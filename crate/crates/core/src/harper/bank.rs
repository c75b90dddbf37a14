//! The polynomial bank: prime-block sums 𝒫_{j,x}, their truncated
//! exponentials 𝒩_{j,x}, and the prime-square polynomial ℳ_x.
//!
//! Every sum runs over n ≤ x, the range of the smoothed weight; a prime of
//! block j beyond x contributes nothing.

use std::collections::HashMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::primes::sieve_primes;
use crate::arith::satake::SatakeSpec;
use crate::error::{Error, Result};
use crate::harper::schedule::HarperSchedule;
use crate::harper::weights::{smoothed_lambda, weight_bound};
use crate::lfunc::powersum::{eval_grid, Kernel, PowerSum};
use crate::moments::quadrature::simpson_stream;
use crate::Complex64;

/// Largest support enumerated for one 𝒩 or ℳ polynomial.
pub const SUPPORT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Kind {
    P(usize),
    N(usize),
    M,
}

pub struct PolyBank {
    pub schedule: HarperSchedule,
    k: Vec<f64>,
    specs: Vec<SatakeSpec<f64>>,
    primes: Vec<u64>,
    cache: HashMap<(Kind, u64), PowerSum>,
}

/// Number of exponent vectors over r primes with total degree ≤ cap.
fn support_count(r: usize, cap: usize) -> f64 {
    (1..=r).fold(1.0, |acc, i| acc * (cap + i) as f64 / i as f64)
}

/// Multiplicative expansion Σ_{Ω(n) ≤ cap} ∏ a_p^{e_p}/e_p! over `terms`
/// = (ln p, a_p); returns (ln n, coefficient) pairs.
fn expand(terms: &[(f64, Complex64)], cap: usize, what: &str) -> Result<Vec<(f64, Complex64)>> {
    let need = support_count(terms.len(), cap);
    if need > SUPPORT_BUDGET as f64 {
        return Err(Error::Resource { what: what.into(), required: need.min(u64::MAX as f64) as u64, budget: SUPPORT_BUDGET });
    }
    let mut out = Vec::with_capacity(need as usize);
    fn go(terms: &[(f64, Complex64)], left: usize, ln: f64, c: Complex64, out: &mut Vec<(f64, Complex64)>) {
        let Some((&(lp, a), rest)) = terms.split_first() else {
            out.push((ln, c));
            return;
        };
        let mut coeff = c;
        let mut l = ln;
        for e in 0..=left {
            if e > 0 {
                coeff = coeff * a / e as f64;
                l += lp;
            }
            go(rest, left - e, l, coeff, out);
        }
    }
    go(terms, cap, 0.0, Complex::new(1.0, 0.0), &mut out);
    Ok(out)
}

impl PolyBank {
    /// 𝒫 tables for x ∈ {T_1, …, T_J}. Everything else, including every 𝒩
    /// and ℳ, is built on demand, since those supports can exceed the budget.
    pub fn new(schedule: HarperSchedule, k: &[f64], specs: &[SatakeSpec<f64>]) -> Result<Self> {
        if k.len() != specs.len() || k.is_empty() {
            return Err(Error::Domain("exponents and Satake data must match".into()));
        }
        let t = schedule.t;
        let limit = schedule.tj.last().copied().unwrap_or(1.0).max(t.ln()).max(2.0);
        let primes: Vec<u64> = sieve_primes(limit.floor() as u64)?.iter().collect();
        let mut bank = Self { schedule, k: k.to_vec(), specs: specs.to_vec(), primes, cache: HashMap::new() };
        let xs: Vec<f64> = bank.schedule.tj[1..].to_vec();
        for &x in &xs {
            for j in 1..=bank.schedule.j {
                let p = bank.build(Kind::P(j), x)?;
                bank.cache.insert((Kind::P(j), x.to_bits()), p);
            }
        }
        Ok(bank)
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn specs(&self) -> &[SatakeSpec<f64>] {
        &self.specs
    }

    /// 𝚲_x(n), zero for n > x.
    fn weight(&self, x: f64, n: u64) -> Result<Complex64> {
        if n as f64 > x {
            return Ok(Complex::new(0.0, 0.0));
        }
        let w = smoothed_lambda(x, n, &self.k, &self.specs)?;
        if self.specs.iter().all(|s| s.grc_asserted()) {
            let bound = weight_bound(&self.k, &self.specs);
            if w.norm() > bound * (1.0 + 1e-12) {
                return Err(Error::Data(format!("|weight({n})| = {} exceeds the GRC bound {bound}", w.norm())));
            }
        }
        Ok(w)
    }

    /// (ln p, 𝚲_x(p)) for primes of block j with nonzero weight.
    fn block_terms(&self, j: usize, x: f64) -> Result<Vec<(u64, Complex64)>> {
        let (lo, hi) = self.schedule.block(j)?;
        let mut out = Vec::new();
        for &p in &self.primes {
            let pf = p as f64;
            if pf <= lo {
                continue;
            }
            if pf > hi {
                break;
            }
            let w = self.weight(x, p)?;
            if w.norm() > 0.0 {
                out.push((p, w));
            }
        }
        Ok(out)
    }

    fn build(&self, kind: Kind, x: f64) -> Result<PowerSum> {
        if !(x > 1.0) {
            return Err(Error::Domain(format!("x must exceed 1, got {x}")));
        }
        let mut ps = PowerSum::new();
        match kind {
            Kind::P(j) => {
                for (p, w) in self.block_terms(j, x)? {
                    let pf = p as f64;
                    ps.push(pf.ln(), w / pf.sqrt());
                }
            }
            Kind::N(j) => {
                let terms: Vec<(f64, Complex64)> =
                    self.block_terms(j, x)?.into_iter().map(|(p, w)| ((p as f64).ln(), w)).collect();
                let cap = (10.0 * self.schedule.kj[j - 1]).floor() as usize;
                for (ln, c) in expand(&terms, cap, &format!("N_{j} support"))? {
                    let c = c * (-0.5 * ln).exp();
                    if c.norm() > 0.0 {
                        ps.push(ln, c);
                    }
                }
            }
            Kind::M => {
                let log_t = self.schedule.t.ln();
                let mut terms = Vec::new();
                for &p in self.primes.iter().take_while(|&&p| p as f64 <= log_t) {
                    let w = self.weight(x, p * p)?;
                    if w.norm() > 0.0 {
                        terms.push(((p as f64).ln(), w));
                    }
                }
                let cap = (10.0 * log_t.ln().powi(2)).floor() as usize;
                // n^{−(1+2it)} = (n²)^{−1/2 − it}
                for (ln, c) in expand(&terms, cap, "M support")? {
                    let c = c * (-ln).exp();
                    if c.norm() > 0.0 {
                        ps.push(2.0 * ln, c);
                    }
                }
            }
        }
        Ok(ps)
    }

    fn poly(&self, kind: Kind, x: f64) -> Result<std::borrow::Cow<'_, PowerSum>> {
        if let Kind::P(j) | Kind::N(j) = kind {
            self.schedule.block(j)?;
        }
        match self.cache.get(&(kind, x.to_bits())) {
            Some(p) => Ok(std::borrow::Cow::Borrowed(p)),
            None => Ok(std::borrow::Cow::Owned(self.build(kind, x)?)),
        }
    }

    /// 𝒫_{j,x} as a power sum in t (value at ½ + it).
    pub fn p_poly(&self, j: usize, x: f64) -> Result<std::borrow::Cow<'_, PowerSum>> {
        self.poly(Kind::P(j), x)
    }

    /// 𝒩_{j,x} as a power sum in t (value at ½ + it).
    pub fn n_poly(&self, j: usize, x: f64) -> Result<std::borrow::Cow<'_, PowerSum>> {
        self.poly(Kind::N(j), x)
    }

    /// ℳ_x as a power sum in t (value at 1 + 2it).
    pub fn m_poly(&self, x: f64) -> Result<std::borrow::Cow<'_, PowerSum>> {
        self.poly(Kind::M, x)
    }

    pub fn eval_p(&self, j: usize, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.p_poly(j, x)?.eval(t))
    }

    pub fn eval_n(&self, j: usize, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.n_poly(j, x)?.eval(t))
    }

    pub fn eval_m(&self, x: f64, t: f64) -> Result<Complex64> {
        Ok(self.m_poly(x)?.eval(t))
    }

    /// Number of terms of 𝒩_{j,x}.
    pub fn n_support(&self, j: usize, x: f64) -> Result<usize> {
        Ok(self.n_poly(j, x)?.len())
    }

    /// x = T_J, the point every good-set polynomial is built at.
    pub fn x_top(&self) -> f64 {
        *self.schedule.tj.last().expect("T_0 present")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodSetMoment {
    pub t: f64,
    /// (1/T)∫_T^{2T} |ℳ(1+2it)|² ∏_j |𝒩_j(½+it)|² dt.
    pub mean: f64,
    pub error: f64,
    /// mean / (log T)^{Σk²}.
    pub normalized: f64,
    /// log of the length of ℳ(s)² ∏ 𝒩_j(s)², against 0.6 log T.
    pub log_length: f64,
    pub length_within_lemma: bool,
}

/// Mean of |ℳ_{T_J}(1+2it)|² ∏_j |𝒩_{j,T_J}(½+it)|² over [T, 2T].
pub fn good_set_moment(bank: &PolyBank, step: f64) -> Result<GoodSetMoment> {
    let t = bank.schedule.t;
    let x = bank.x_top();
    let mut polys = vec![bank.m_poly(x)?.into_owned()];
    let mut log_length = 0.0;
    for j in 1..=bank.schedule.j {
        polys.push(bank.n_poly(j, x)?.into_owned());
    }
    for p in &polys {
        log_length += 2.0 * p.ln_b.iter().copied().fold(0.0, f64::max);
    }
    let intervals = (t / step).ceil() as usize;
    let h = t / intervals as f64;
    let q = simpson_stream(intervals, h, |start, len| {
        let t0 = t + start as f64 * h;
        let mut acc = vec![1.0; len];
        for p in &polys {
            if p.is_empty() {
                acc.iter_mut().for_each(|a| *a = 0.0);
                continue;
            }
            for (a, v) in acc.iter_mut().zip(eval_grid(p, t0, h, len, Kernel::Auto)) {
                *a *= v.norm_sqr();
            }
        }
        acc
    });
    let ksq: f64 = bank.k.iter().map(|k| k * k).sum();
    let mean = q.value / t;
    Ok(GoodSetMoment {
        t,
        mean,
        error: q.error / t,
        normalized: mean / t.ln().powf(ksq),
        log_length,
        length_within_lemma: log_length <= 0.6 * t.ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harper::schedule::build_schedule;

    fn zeta_bank(t: f64, beta: f64, eps: f64) -> PolyBank {
        let z = [SatakeSpec::zeta()];
        PolyBank::new(build_schedule(t, &[1.0], &z, beta, eps).unwrap(), &[1.0], &z).unwrap()
    }

    #[test]
    fn p_symmetry_and_positivity() {
        let b = zeta_bank(1e6, 0.1, 0.5);
        let x = b.x_top();
        let v0 = b.eval_p(1, x, 0.0).unwrap();
        assert!(v0.re > 0.0 && v0.im == 0.0);
        let a = b.eval_p(2, x, 3.7).unwrap();
        let c = b.eval_p(2, x, -3.7).unwrap();
        assert!((a - c.conj()).norm() < 1e-15);
        assert!(b.eval_p(3, x, 0.0).is_err());
        // Block 1 at the desk default is empty.
        let d = zeta_bank(1e5, 0.01, 0.2);
        assert_eq!(d.eval_p(1, d.x_top(), 5.0).unwrap(), Complex::new(0.0, 0.0));
    }

    #[test]
    fn n_is_truncated_exponential_of_p() {
        // Blocks {2} and {3, 5, 7, 11}.
        let b = zeta_bank(1e4, 0.1, 0.3);
        let x = b.x_top();
        for j in 1..=b.schedule.j {
            let cap = (10.0 * b.schedule.kj[j - 1]).floor() as i32;
            for t in [0.0, 1.3, 77.0] {
                let p = b.eval_p(j, x, t).unwrap();
                let mut term = Complex::new(1.0, 0.0);
                let mut want = term;
                for m in 1..=cap {
                    term = term * p / m as f64;
                    want += term;
                }
                let got = b.eval_n(j, x, t).unwrap();
                assert!((got - want).norm() < 1e-10 * want.norm().max(1.0), "j={j} t={t}: {got} vs {want}");
            }
        }
        assert!(b.eval_n(1, x, 0.0).unwrap().im == 0.0);
    }

    #[test]
    fn m_brute_force_two_primes() {
        // log T < 5 keeps primes {2, 3}; x = 100 makes both squares count.
        let z = [SatakeSpec::zeta()];
        let sched = build_schedule(140.0, &[1.0], &z, 0.01, 0.2).unwrap();
        let b = PolyBank::new(sched, &[1.0], &z).unwrap();
        let x = 100.0;
        let w2 = smoothed_lambda(x, 4, &[1.0], &z).unwrap().re;
        let w3 = smoothed_lambda(x, 9, &[1.0], &z).unwrap().re;
        let cap = (10.0 * 140f64.ln().ln().powi(2)).floor() as i32;
        let t = 2.5;
        let mut want = Complex::new(0.0, 0.0);
        let mut f = vec![1.0f64];
        for i in 1..=cap {
            f.push(f[i as usize - 1] * i as f64);
        }
        for a in 0..=cap {
            for c in 0..=(cap - a) {
                let n = 2f64.powi(a) * 3f64.powi(c);
                let coeff = w2.powi(a) / f[a as usize] * w3.powi(c) / f[c as usize];
                want += Complex::new(0.0, -2.0 * t * n.ln()).exp() * coeff / n;
            }
        }
        let got = b.eval_m(x, t).unwrap();
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
        // Tiny x: empty support, ℳ = 1.
        assert_eq!(b.eval_m(3.0, t).unwrap(), Complex::new(1.0, 0.0));
    }

    #[test]
    fn budget_is_enforced() {
        let terms = vec![(1.0, Complex::new(0.1, 0.0)); 20];
        match expand(&terms, 50, "test") {
            Err(Error::Resource { budget, .. }) => assert_eq!(budget, SUPPORT_BUDGET),
            other => panic!("{:?}", other.map(|v| v.len())),
        }
        assert_eq!(expand(&terms[..2], 3, "t").unwrap().len(), 10);
    }

    #[test]
    fn good_set_moment_band() {
        let b = zeta_bank(1e4, 0.01, 0.2);
        let g = good_set_moment(&b, 0.02).unwrap();
        assert!((1e-2..=1e2).contains(&g.normalized), "{g:?}");
    }
}
