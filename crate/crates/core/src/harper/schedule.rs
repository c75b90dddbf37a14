//! The prime-block schedule θ_j, T_j, K_j.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::satake::SatakeSpec;
use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_EPSILON: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarperSchedule {
    pub t: f64,
    pub k_hat: f64,
    pub beta: f64,
    pub epsilon: f64,
    /// θ_1..θ_J.
    pub theta: Vec<f64>,
    /// T_0 = 1, T_1..T_J.
    pub tj: Vec<f64>,
    /// K_1..K_J.
    pub kj: Vec<f64>,
    pub j: usize,
}

/// k̂ = max(Σ m_i k_i, Σ k_i²).
pub fn k_hat(k: &[f64], specs: &[SatakeSpec<f64>]) -> f64 {
    let mk: f64 = k.iter().zip(specs).map(|(k, s)| k * s.degree() as f64).sum();
    let kk: f64 = k.iter().map(|k| k * k).sum();
    mk.max(kk)
}

fn check_shape(k: &[f64], specs: &[SatakeSpec<f64>]) -> Result<()> {
    if k.is_empty() || k.len() != specs.len() {
        return Err(Error::Domain(format!("{} exponents for {} L-functions", k.len(), specs.len())));
    }
    if k.iter().any(|k| !(*k > 0.0 && k.is_finite())) {
        return Err(Error::Domain("exponents must be positive".into()));
    }
    Ok(())
}

fn assemble(t: f64, k_hat: f64, beta: f64, epsilon: f64) -> HarperSchedule {
    let mut theta = Vec::new();
    let mut j = 1;
    loop {
        let th = beta * ((j - 1) as f64).exp();
        if th > epsilon {
            break;
        }
        theta.push(th);
        j += 1;
    }
    let mut tj = vec![1.0];
    tj.extend(theta.iter().map(|th| t.powf(*th)));
    let kj = theta.iter().map(|th| k_hat.sqrt() * th.powf(-0.75)).collect();
    HarperSchedule { t, k_hat, beta, epsilon, j: theta.len(), theta, tj, kj }
}

/// Desk schedule θ_j = β e^{j−1}, J = max{j : θ_j ≤ ε}.
pub fn build_schedule(t: f64, k: &[f64], specs: &[SatakeSpec<f64>], beta: f64, epsilon: f64) -> Result<HarperSchedule> {
    check_shape(k, specs)?;
    if !(t >= 100.0) {
        return Err(Error::Domain(format!("schedule needs T >= 100, got {t}")));
    }
    if !(0.0 < beta && beta < epsilon && epsilon < 1.0) {
        return Err(Error::Domain(format!("need 0 < beta < epsilon < 1, got beta = {beta}, epsilon = {epsilon}")));
    }
    Ok(assemble(t, k_hat(k, specs), beta, epsilon))
}

/// The asymptotic schedule: β = (log log T)^{−2}, ε = e^{−1000 k̂}. Empty for
/// every T that fits in a float; the error carries the threshold on log log T.
pub fn asymptotic_schedule(t: f64, k: &[f64], specs: &[SatakeSpec<f64>]) -> Result<HarperSchedule> {
    check_shape(k, specs)?;
    if !(t > std::f64::consts::E.exp()) {
        return Err(Error::Domain(format!("asymptotic schedule needs log log T > 1, got T = {t}")));
    }
    let kh = k_hat(k, specs);
    let beta = t.ln().ln().powi(-2);
    let epsilon = (-1000.0 * kh).exp();
    let s = assemble(t, kh, beta, epsilon);
    if s.j == 0 {
        // θ_1 ≤ e^{−1000k̂} ⟺ log log T ≥ e^{500k̂}
        return Err(Error::EmptySchedule { min_log_log_t: (500.0 * kh).exp() });
    }
    Ok(s)
}

impl HarperSchedule {
    /// Same schedule with every threshold K_j multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        s.kj.iter_mut().for_each(|k| *k *= factor);
        s
    }

    /// Block j covers primes in (T_{j−1}, T_j].
    pub fn block(&self, j: usize) -> Result<(f64, f64)> {
        if j == 0 || j > self.j {
            return Err(Error::Domain(format!("block index {j} outside 1..={}", self.j)));
        }
        Ok((self.tj[j - 1], self.tj[j]))
    }

    pub fn to_key_value(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        let _ = writeln!(s, "T={:.17e}", self.t);
        let _ = writeln!(s, "k_hat={:.17e}", self.k_hat);
        let _ = writeln!(s, "beta={:.17e}", self.beta);
        let _ = writeln!(s, "epsilon={:.17e}", self.epsilon);
        let _ = writeln!(s, "J={}", self.j);
        let _ = writeln!(s, "theta={}", join(&self.theta));
        let _ = writeln!(s, "T_j={}", join(&self.tj));
        let _ = writeln!(s, "K_j={}", join(&self.kj));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_schedule() {
        let z = [SatakeSpec::zeta()];
        let s = build_schedule(1e6, &[1.0], &z, 0.01, 0.2).unwrap();
        assert_eq!(s.j, 3);
        assert!((s.theta[1] - 0.027_182_818_284_590_45).abs() < 1e-15);
        assert!((s.kj[0] - 31.622_776_601_683_793).abs() < 1e-9);
        assert_eq!(s.tj.len(), 4);
        assert!(build_schedule(1e6, &[1.0], &z, 0.3, 0.2).is_err());
        assert!(build_schedule(50.0, &[1.0], &z, 0.01, 0.2).is_err());
    }

    #[test]
    fn asymptotic_schedule_is_empty() {
        let z = [SatakeSpec::zeta()];
        match asymptotic_schedule(1e6, &[1.0], &z) {
            Err(Error::EmptySchedule { min_log_log_t }) => assert!(min_log_log_t > 1e200),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn k_hat_takes_max() {
        let z = [SatakeSpec::zeta(), SatakeSpec::zeta()];
        assert_eq!(k_hat(&[2.0, 1.0], &z), 5.0);
        assert_eq!(k_hat(&[0.5, 0.5], &z), 1.0);
    }
}
