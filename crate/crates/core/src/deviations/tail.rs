//! Empirical joint tails Φ_T(V) of normalised log|L_j(½+it)|.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lfunc::grid::{log_abs_grid_with, CriticalLineGrid, GridOptions, GridSpec};
use crate::lfunc::id::LFunctionId;

/// Which stretch of t is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// [1, T], the range of the large-deviation statement.
    Full,
    /// [T, 2T].
    Dyadic,
}

impl Region {
    pub fn range(self, t: f64) -> (f64, f64) {
        match self {
            Self::Full => (1.0, t),
            Self::Dyadic => (t, 2.0 * t),
        }
    }
}

/// √(½ log log T).
pub fn normaliser(t: f64) -> f64 {
    (0.5 * t.ln().ln()).sqrt()
}

/// Normalised samples u_j(t) = log|L_j(½+it)| / √(½ log log T) on a common
/// uniform t-grid, one column per L-function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailGrid {
    pub labels: Vec<String>,
    pub t: f64,
    pub norm: f64,
    /// Measure carried by each sample.
    pub step: f64,
    pub columns: Vec<Vec<f64>>,
    /// Spacing of the threshold lattice.
    pub v_step: f64,
}

impl TailGrid {
    /// From raw log|L| columns sampled with spacing `step`.
    pub fn from_log_values(labels: Vec<String>, columns: Vec<Vec<f64>>, t: f64, step: f64, v_step: f64) -> Result<Self> {
        if columns.is_empty() || columns.len() != labels.len() {
            return Err(Error::Domain("need one label per column and at least one column".into()));
        }
        let n = columns[0].len();
        if n == 0 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::Domain("columns must be nonempty and of equal length".into()));
        }
        if !(t > std::f64::consts::E.exp() && step > 0.0 && v_step > 0.0) {
            return Err(Error::Domain(format!("need log log T > 1 and positive steps, got T = {t}")));
        }
        let norm = normaliser(t);
        let columns = columns.into_iter().map(|c| c.into_iter().map(|v| v / norm).collect()).collect();
        Ok(Self { labels, t, norm, step, columns, v_step })
    }

    /// From aligned grids of log|L|.
    pub fn from_grids(grids: &[&CriticalLineGrid], t: f64, v_step: f64) -> Result<Self> {
        let first = grids.first().ok_or_else(|| Error::Domain("no grids".into()))?;
        if grids.iter().any(|g| g.spec != first.spec) {
            return Err(Error::Domain("grids must share t0, t1 and step".into()));
        }
        Self::from_log_values(
            grids.iter().map(|g| g.id.to_string()).collect(),
            grids.iter().map(|g| g.values.clone()).collect(),
            t,
            first.spec.step,
            v_step,
        )
    }

    /// Evaluate every grid over the region and build the sample.
    pub fn build(ids: &[LFunctionId], t: f64, region: Region, step: f64, v_step: f64) -> Result<Self> {
        let (a, b) = region.range(t);
        let spec = GridSpec::new(a, b, step)?;
        let grids = ids
            .iter()
            .map(|id| log_abs_grid_with(id, spec, GridOptions::default()))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<&CriticalLineGrid> = grids.iter().collect();
        Self::from_grids(&refs, t, v_step)
    }

    pub fn r(&self) -> usize {
        self.columns.len()
    }

    pub fn len(&self) -> usize {
        self.columns[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Samples with u_j ≥ V_j for all j; −∞ drops a coordinate.
    pub fn count(&self, v: &[f64]) -> Result<usize> {
        if v.len() != self.r() {
            return Err(Error::Domain(format!("threshold has {} entries for {} L-functions", v.len(), self.r())));
        }
        let active: Vec<(usize, f64)> = v.iter().copied().enumerate().filter(|(_, x)| *x > f64::NEG_INFINITY).collect();
        Ok((0..self.len()).filter(|&i| active.iter().all(|&(j, x)| self.columns[j][i] >= x)).count())
    }

    /// Φ_T(V)/(sampled length): the fraction of samples in the joint tail.
    pub fn phi(&self, v: &[f64]) -> Result<f64> {
        Ok(self.count(v)? as f64 / self.len() as f64)
    }

    /// Lowest lattice point of column j, a multiple of v_step at or below every sample.
    pub fn lattice_floor(&self, j: usize) -> f64 {
        let m = self.columns[j].iter().copied().fold(f64::INFINITY, f64::min);
        (m / self.v_step).floor() * self.v_step
    }

    /// Write (V_1..V_r, phi, count) rows for the given thresholds.
    pub fn write_csv<W: Write>(&self, out: W, thresholds: &[Vec<f64>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut head: Vec<String> = (1..=self.r()).map(|j| format!("V_{j}")).collect();
        head.push("phi".into());
        head.push("count".into());
        w.write_record(&head)?;
        for v in thresholds {
            let c = self.count(v)?;
            let mut row: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
            row.push(format!("{:.17e}", c as f64 / self.len() as f64));
            row.push(c.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn empirical_phi(tg: &TailGrid, v: &[f64]) -> Result<f64> {
    tg.phi(v)
}

/// log[Φ(V) / ∏_j Φ_j(V_j)] with Φ_j the marginal tail of coordinate j.
pub fn joint_tail_ratio(tg: &TailGrid, v: &[f64]) -> Result<f64> {
    let joint = tg.count(v)?;
    if joint == 0 {
        return Err(Error::Statistics(format!("empty joint tail at V = {v:?}")));
    }
    let n = tg.len() as f64;
    let mut log_ratio = (joint as f64 / n).ln();
    for (j, &x) in v.iter().enumerate() {
        let mut m = vec![f64::NEG_INFINITY; v.len()];
        m[j] = x;
        let c = tg.count(&m)?;
        if c == 0 {
            return Err(Error::Statistics(format!("empty marginal tail for coordinate {} at V = {x}", j + 1)));
        }
        log_ratio -= (c as f64 / n).ln();
    }
    if v.len() == 1 {
        return Ok(0.0);
    }
    Ok(log_ratio)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeDeviationReport {
    pub t: f64,
    pub c: Vec<f64>,
    /// V_j = c_j √(log log T).
    pub v: Vec<f64>,
    pub log_phi: f64,
    /// −Σ V_j²/2.
    pub reference: f64,
    /// log_phi / reference, omitted when the reference is too close to 0.
    pub ratio: Option<f64>,
}

/// Compare log Φ_T(V) with −ΣV²/2 at V_j = c_j √(log log T).
pub fn large_deviation_profile(tg: &TailGrid, c: &[f64]) -> Result<LargeDeviationReport> {
    if c.len() != tg.r() || c.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::Domain("need one nonnegative c per L-function".into()));
    }
    let ll = tg.t.ln().ln().sqrt();
    let v: Vec<f64> = c.iter().map(|x| x * ll).collect();
    let count = tg.count(&v)?;
    if count == 0 {
        return Err(Error::Statistics(format!("empty tail cell at V = {v:?}")));
    }
    let log_phi = (count as f64 / tg.len() as f64).ln();
    let reference = -v.iter().map(|x| x * x).sum::<f64>() / 2.0;
    let ratio = if reference.abs() < 1e-3 { None } else { Some(log_phi / reference) };
    Ok(LargeDeviationReport { t: tg.t, c: c.to_vec(), v, log_phi, reference, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(cols: Vec<Vec<f64>>) -> TailGrid {
        let labels = (0..cols.len()).map(|j| format!("c{j}")).collect();
        TailGrid::from_log_values(labels, cols, 1e6, 1.0, 0.01).unwrap()
    }

    #[test]
    fn phi_edges() {
        let tg = synthetic(vec![vec![-1.0, 0.0, 1.0, 2.0], vec![2.0, 1.0, 0.0, -40.0]]);
        assert_eq!(tg.phi(&[-1e3, -1e3]).unwrap(), 1.0);
        let m = tg.phi(&[0.0, f64::NEG_INFINITY]).unwrap();
        assert_eq!(m, 0.75);
        assert_eq!(tg.count(&[0.0, 0.0]).unwrap(), 2);
        assert!(tg.phi(&[0.0]).is_err());
    }

    #[test]
    fn joint_ratio_cases() {
        let col: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let one = synthetic(vec![col.clone()]);
        assert_eq!(joint_tail_ratio(&one, &[0.5]).unwrap(), 0.0);
        let two = synthetic(vec![col.clone(), col]);
        let v = [0.5, 0.5];
        let marginal = two.phi(&[0.5, f64::NEG_INFINITY]).unwrap();
        let r = joint_tail_ratio(&two, &v).unwrap();
        assert!(r > 0.0 && (r + marginal.ln()).abs() < 1e-12);
        assert!(matches!(joint_tail_ratio(&two, &[100.0, 0.0]), Err(Error::Statistics(_))));
    }

    #[test]
    fn ldp_guard_and_monotonicity() {
        let col: Vec<f64> = (0..5000).map(|i| ((i as f64) * 0.37).sin() * 4.0).collect();
        let tg = synthetic(vec![col]);
        let r = large_deviation_profile(&tg, &[1e-4]).unwrap();
        assert!(r.ratio.is_none());
        let mut last = f64::INFINITY;
        for c in [0.1, 0.3, 0.5, 0.8] {
            let r = large_deviation_profile(&tg, &[c]).unwrap();
            assert!(r.log_phi <= last);
            last = r.log_phi;
        }
    }
}
