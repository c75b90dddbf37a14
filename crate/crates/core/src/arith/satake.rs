//! Local Satake data α(j,p) for a degree-m L-function.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use num_complex::Complex;

use crate::arith::characters::DirichletCharacter;
use crate::arith::primes::prime_power;
use crate::error::{Error, Result};
use crate::scalar::Real;

const GRC_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
enum Source<S: Real> {
    Character(DirichletCharacter<S>),
    Table(BTreeMap<u64, Vec<Complex<S>>>),
}

/// Satake parameters of one L-function, either generated by a character or
/// read from a user-supplied table.
#[derive(Debug, Clone)]
pub struct SatakeSpec<S: Real> {
    degree: usize,
    label: String,
    source: Source<S>,
    grc_asserted: bool,
    ramified: BTreeSet<u64>,
}

impl<S: Real> SatakeSpec<S> {
    /// Riemann zeta: α(p) = 1 for every p.
    pub fn zeta() -> Self {
        satake_from_character(&DirichletCharacter::trivial())
    }

    /// A table of parameters. Every row must have `degree` entries and satisfy
    /// GRC (if asserted, with |α| = 1 away from `ramified`) or else the
    /// Rudnick–Sarnak bound.
    pub fn from_table(
        label: impl Into<String>,
        degree: usize,
        alphas: BTreeMap<u64, Vec<Complex<S>>>,
        grc_asserted: bool,
        ramified: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        let ramified: BTreeSet<u64> = ramified.into_iter().collect();
        let m = degree as f64;
        for (&p, row) in &alphas {
            if prime_power(p).is_none_or(|(_, e)| e != 1) {
                return Err(Error::Data(format!("table key {p} is not prime")));
            }
            if row.len() != degree {
                return Err(Error::Data(format!(
                    "prime {p}: expected {degree} parameters, found {}",
                    row.len()
                )));
            }
            for a in row {
                let r = a.norm().as_f64();
                if grc_asserted {
                    let unramified = !ramified.contains(&p);
                    if r > 1.0 + GRC_TOL || (unramified && r < 1.0 - GRC_TOL) {
                        return Err(Error::Data(format!("prime {p}: |alpha| = {r} violates GRC")));
                    }
                } else {
                    let bound = (p as f64).powf(0.5 - 1.0 / (m * m + 1.0));
                    if r > bound * (1.0 + GRC_TOL) {
                        return Err(Error::Data(format!(
                            "prime {p}: |alpha| = {r} exceeds the Rudnick-Sarnak bound {bound}"
                        )));
                    }
                }
            }
        }
        Ok(Self { degree, label: label.into(), source: Source::Table(alphas), grc_asserted, ramified })
    }

    /// Read a table from CSV with header `prime,j,re_alpha,im_alpha`
    /// (`j` counts from 1).
    pub fn from_csv<R: Read>(
        reader: R,
        label: impl Into<String>,
        grc_asserted: bool,
        ramified: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Row {
            prime: u64,
            j: usize,
            re_alpha: f64,
            im_alpha: f64,
        }
        let mut rows: BTreeMap<u64, BTreeMap<usize, Complex<S>>> = BTreeMap::new();
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        for rec in rdr.deserialize() {
            let r: Row = rec?;
            if r.j == 0 {
                return Err(Error::Data(format!("prime {}: j counts from 1", r.prime)));
            }
            let slot = rows.entry(r.prime).or_default();
            if slot.insert(r.j, Complex::new(S::lit(r.re_alpha), S::lit(r.im_alpha))).is_some() {
                return Err(Error::Data(format!("prime {}: duplicate j = {}", r.prime, r.j)));
            }
        }
        let degree = rows.values().map(|r| r.len()).max().unwrap_or(0);
        let mut alphas = BTreeMap::new();
        for (p, row) in rows {
            if row.keys().copied().ne(1..=row.len()) || row.len() != degree {
                return Err(Error::Data(format!("prime {p}: j must run over 1..={degree}")));
            }
            alphas.insert(p, row.into_values().collect());
        }
        Self::from_table(label, degree, alphas, grc_asserted, ramified)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn grc_asserted(&self) -> bool {
        self.grc_asserted
    }

    /// Primes where the local factor may be degenerate (|α| < 1 allowed).
    pub fn ramified(&self) -> &BTreeSet<u64> {
        &self.ramified
    }

    pub fn character(&self) -> Option<&DirichletCharacter<S>> {
        match &self.source {
            Source::Character(c) => Some(c),
            Source::Table(_) => None,
        }
    }

    /// True when every coefficient a(p^ℓ) is real.
    pub fn is_real(&self) -> bool {
        match &self.source {
            Source::Character(c) => c.is_real(),
            Source::Table(t) => t.values().all(|row| {
                // Real coefficients need the multiset of alphas closed under conjugation.
                row.iter().all(|a| row.iter().any(|b| (*b - a.conj()).norm() < S::lit(GRC_TOL)))
            }),
        }
    }

    /// Write α(·,p) into `out`.
    pub fn alphas_into(&self, p: u64, out: &mut Vec<Complex<S>>) -> Result<()> {
        out.clear();
        match &self.source {
            Source::Character(c) => out.push(c.value(p)),
            Source::Table(t) => out.extend_from_slice(
                t.get(&p)
                    .ok_or_else(|| Error::Data(format!("{}: no Satake data at p = {p}", self.label)))?,
            ),
        }
        Ok(())
    }

    pub fn alphas(&self, p: u64) -> Result<Vec<Complex<S>>> {
        let mut v = Vec::with_capacity(self.degree);
        self.alphas_into(p, &mut v)?;
        Ok(v)
    }

    /// a_π(p^ℓ) = Σ_j α(j,p)^ℓ.
    pub fn a_pi(&self, p: u64, l: u32) -> Result<Complex<S>> {
        Ok(self.alphas(p)?.iter().map(|a| a.powu(l)).fold(Complex::new(S::zero(), S::zero()), |s, x| s + x))
    }

    /// Check that data exists for every prime up to `x`.
    pub fn covers(&self, primes: impl IntoIterator<Item = u64>) -> Result<()> {
        if let Source::Table(t) = &self.source {
            for p in primes {
                if !t.contains_key(&p) {
                    return Err(Error::Data(format!("{}: no Satake data at p = {p}", self.label)));
                }
            }
        }
        Ok(())
    }
}

/// Degree-1 data α(p) = χ(p); ramified primes get α = 0.
pub fn satake_from_character<S: Real>(chi: &DirichletCharacter<S>) -> SatakeSpec<S> {
    let label = if chi.modulus() == 1 { "zeta".to_string() } else { format!("dirichlet:{}", chi.id()) };
    let ramified = crate::arith::primes::factorize(chi.modulus()).into_iter().map(|(p, _)| p).collect();
    SatakeSpec { degree: 1, label, source: Source::Character(chi.clone()), grc_asserted: true, ramified }
}

/// Λ_π(n): log p · a_π(p^ℓ) on prime powers n = p^ℓ, zero elsewhere.
pub fn lambda_pi<S: Real>(spec: &SatakeSpec<S>, n: u64) -> Result<Complex<S>> {
    if n < 2 {
        return Err(Error::Domain(format!("lambda_pi needs n >= 2, got {n}")));
    }
    match prime_power(n) {
        None => Ok(Complex::new(S::zero(), S::zero())),
        Some((p, l)) => Ok(spec.a_pi(p, l)? * S::lit((p as f64).ln())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_specs() {
        let z = SatakeSpec::<f64>::zeta();
        assert_eq!(z.alphas(7).unwrap(), vec![Complex::new(1.0, 0.0)]);
        let chi = DirichletCharacter::<f64>::new(4, 1).unwrap();
        let s = satake_from_character(&chi);
        assert_eq!(s.alphas(3).unwrap()[0], Complex::new(-1.0, 0.0));
        assert_eq!(s.alphas(2).unwrap()[0], Complex::new(0.0, 0.0));
        assert!(s.grc_asserted());
        assert!(s.is_real());
    }

    #[test]
    fn lambda_values() {
        let z = SatakeSpec::<f64>::zeta();
        assert!((lambda_pi(&z, 8).unwrap().re - 2f64.ln()).abs() < 1e-15);
        assert_eq!(lambda_pi(&z, 6).unwrap(), Complex::new(0.0, 0.0));
        let chi = satake_from_character(&DirichletCharacter::<f64>::new(4, 1).unwrap());
        let v = lambda_pi(&chi, 9).unwrap();
        assert!((v.re - 3f64.ln()).abs() < 1e-15 && v.im == 0.0);
        assert!((lambda_pi(&chi, 3).unwrap().re + 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip_and_validation() {
        let csv = "prime,j,re_alpha,im_alpha\n2,1,1,0\n2,2,0,1\n3,1,-1,0\n3,2,0,-1\n";
        let s = SatakeSpec::<f64>::from_csv(csv.as_bytes(), "toy", true, []).unwrap();
        assert_eq!(s.degree(), 2);
        assert_eq!(s.alphas(2).unwrap()[1], Complex::new(0.0, 1.0));
        assert!(matches!(s.alphas(5), Err(Error::Data(_))));
        let bad = "prime,j,re_alpha,im_alpha\n2,1,1.5,0\n";
        assert!(SatakeSpec::<f64>::from_csv(bad.as_bytes(), "bad", true, []).is_err());
        // Same row is acceptable without GRC: 1.5 ≤ 2^{1/2−1/2}? no, m=1 gives exponent 0.
        assert!(SatakeSpec::<f64>::from_csv(bad.as_bytes(), "bad", false, []).is_err());
        let ram = "prime,j,re_alpha,im_alpha\n2,1,0,0\n3,1,1,0\n";
        assert!(SatakeSpec::<f64>::from_csv(ram.as_bytes(), "r", true, []).is_err());
        assert!(SatakeSpec::<f64>::from_csv(ram.as_bytes(), "r", true, [2]).is_ok());
    }
}
