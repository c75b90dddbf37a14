//! Labelling sample points of [T, 2T] as good (𝒢) or bad (ℬ_{j,ℓ}).
//!
//! t is good when |𝒫_{j,T_J}(½+it)| ≤ K_j for every j. Otherwise its label
//! is ℬ_{j,ℓ} for the smallest block j that fails at some level s ∈ [j, J],
//! with ℓ the first such s. Every sample gets exactly one label.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harper::bank::PolyBank;
use crate::harper::schedule::HarperSchedule;
use crate::lfunc::grid::GridSpec;
use crate::lfunc::powersum::{eval_grid, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SetLabel {
    Good,
    Bad { j: usize, l: usize },
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Good => write!(f, "G"),
            Self::Bad { j, l } => write!(f, "B_{j}_{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub label: String,
    pub count: usize,
    pub fraction: f64,
    /// 95% Wilson interval for the fraction.
    pub lo: f64,
    pub hi: f64,
    /// fraction · T.
    pub measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetClassification {
    pub spec: GridSpec,
    pub labels: Vec<SetLabel>,
    pub measures: Vec<MeasureEstimate>,
}

impl SetClassification {
    pub fn good_fraction(&self) -> f64 {
        self.measures.iter().find(|m| m.label == "G").map_or(0.0, |m| m.fraction)
    }
}

/// 95% Wilson score interval.
pub fn wilson(count: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = count as f64 / nf;
    let den = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / den;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / den;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

const CHUNK: usize = 1 << 15;

/// Label every sample of `grid` (which should lie in [T, 2T]) using the
/// thresholds of `schedule` and the polynomials of `bank`.
pub fn classify_sets(schedule: &HarperSchedule, bank: &PolyBank, grid: &GridSpec) -> Result<SetClassification> {
    if schedule.j == 0 {
        return Err(Error::EmptySchedule { min_log_log_t: f64::NAN });
    }
    if schedule.tj != bank.schedule.tj {
        return Err(Error::Domain("schedule and bank disagree on the blocks".into()));
    }
    let jmax = schedule.j;
    let mut polys = Vec::new();
    for j in 1..=jmax {
        for s in j..=jmax {
            polys.push((j, s, bank.p_poly(j, schedule.tj[s])?.into_owned()));
        }
    }
    let n = grid.len();
    let starts: Vec<usize> = (0..n).step_by(CHUNK).collect();
    let labels: Vec<SetLabel> = starts
        .par_iter()
        .flat_map_iter(|&start| {
            let len = CHUNK.min(n - start);
            let t0 = grid.t(start);
            // |𝒫_{j,T_s}| > K_j, indexed like `polys`.
            let fails: Vec<Vec<bool>> = polys
                .iter()
                .map(|(j, _, p)| {
                    let k = schedule.kj[j - 1];
                    if p.is_empty() {
                        return vec![0.0 > k; len];
                    }
                    eval_grid(p, t0, grid.step, len, Kernel::Auto).iter().map(|v| v.norm() > k).collect()
                })
                .collect();
            (0..len)
                .map(|i| {
                    let good = polys.iter().zip(&fails).all(|((_, s, _), f)| *s != jmax || !f[i]);
                    if good {
                        return SetLabel::Good;
                    }
                    polys
                        .iter()
                        .zip(&fails)
                        .find(|(_, f)| f[i])
                        .map(|((j, s, _), _)| SetLabel::Bad { j: *j, l: *s })
                        .expect("a non-good point fails somewhere")
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut counts = std::collections::BTreeMap::new();
    for l in &labels {
        *counts.entry(*l).or_insert(0usize) += 1;
    }
    let t = schedule.t;
    let measures = counts
        .into_iter()
        .map(|(label, count)| {
            let fraction = count as f64 / n as f64;
            let (lo, hi) = wilson(count, n);
            MeasureEstimate { label: label.to_string(), count, fraction, lo, hi, measure: fraction * t }
        })
        .collect();
    Ok(SetClassification { spec: *grid, labels, measures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::satake::SatakeSpec;
    use crate::harper::schedule::build_schedule;

    fn setup(t: f64, beta: f64, eps: f64) -> (HarperSchedule, PolyBank) {
        let z = [SatakeSpec::zeta()];
        let s = build_schedule(t, &[1.0], &z, beta, eps).unwrap();
        let b = PolyBank::new(s.clone(), &[1.0], &z).unwrap();
        (s, b)
    }

    #[test]
    fn extreme_thresholds() {
        let (s, b) = setup(1e6, 0.1, 0.5);
        let g = GridSpec::new(1e6, 1e6 + 50.0, 0.01).unwrap();
        let all_good = classify_sets(&s.scaled(1e6), &b, &g).unwrap();
        assert!(all_good.labels.iter().all(|l| *l == SetLabel::Good));
        let all_bad = classify_sets(&s.scaled(0.0), &b, &g).unwrap();
        assert!(all_bad.labels.iter().all(|l| matches!(l, SetLabel::Bad { j: 1, .. })));
        assert_eq!(all_bad.labels.len(), g.len());
    }

    #[test]
    fn desk_default_is_mostly_good() {
        let (s, b) = setup(1e5, 0.01, 0.2);
        let g = GridSpec::new(1e5, 2e5, 0.5).unwrap();
        let c = classify_sets(&s, &b, &g).unwrap();
        assert!(c.good_fraction() >= 0.99);
        let total: usize = c.measures.iter().map(|m| m.count).sum();
        assert_eq!(total, g.len());
    }

    #[test]
    fn wilson_interval() {
        let (lo, hi) = wilson(50, 100);
        assert!((lo - 0.403_831_7).abs() < 1e-6 && (hi - 0.596_168_3).abs() < 1e-6);
        assert_eq!(wilson(0, 10).0, 0.0);
    }
}
