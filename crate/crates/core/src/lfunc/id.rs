//! Names for the L-functions the crate can evaluate, and the selector
//! grammar used on the command line.
//!
//! ```text
//! selector := factor ("," factor)*
//! factor   := base ("^" real)?
//! base     := "zeta" | "hurwitz:" a "/" q | "dirichlet:" q ":" index
//!           | "dedekind:" q | "dedekind:" id ("+" id)*
//! ```
//!
//! `dedekind:q` is the field cut out by all characters mod q: the trivial
//! character mod 1 followed by the non-principal characters mod q, so
//! `dedekind:4` is ℚ(i). The explicit form lists character ids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::characters::{CharacterGroupStructure, CharacterId, DirichletCharacter};
use crate::arith::primes::gcd;
use crate::arith::satake::{satake_from_character, SatakeSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LFunctionId {
    Zeta,
    Hurwitz { a: u64, q: u64 },
    Dirichlet(CharacterId),
    Dedekind(Vec<CharacterId>),
    /// L^k with k > 0; on the critical line only |L|^k is ever used.
    Power(Box<LFunctionId>, f64),
    Product(Vec<LFunctionId>),
}

impl LFunctionId {
    pub fn hurwitz(a: u64, q: u64) -> Result<Self> {
        if q == 0 || a == 0 || a > q || gcd(a, q) != 1 {
            return Err(Error::Domain(format!("hurwitz:{a}/{q} needs 1 <= a <= q and gcd(a, q) = 1")));
        }
        Ok(Self::Hurwitz { a, q })
    }

    pub fn dirichlet(q: u64, index: u64) -> Result<Self> {
        let g = CharacterGroupStructure::new(q)?;
        if index >= g.group_order() {
            return Err(Error::Domain(format!("character index {index} out of range for q = {q}")));
        }
        if q == 1 {
            return Ok(Self::Zeta);
        }
        Ok(Self::Dirichlet(CharacterId::new(q, index)))
    }

    /// The abelian field attached to all characters mod q.
    pub fn dedekind(q: u64) -> Result<Self> {
        let g = CharacterGroupStructure::new(q)?;
        let mut ids = vec![CharacterId::TRIVIAL];
        if q > 1 {
            ids.extend((1..g.group_order()).map(|i| CharacterId::new(q, i)));
        }
        Self::dedekind_from(ids)
    }

    pub fn dedekind_from(ids: Vec<CharacterId>) -> Result<Self> {
        if ids.is_empty() {
            return Err(Error::Domain("dedekind needs at least one character".into()));
        }
        let mut principal = 0;
        for id in &ids {
            let chi = DirichletCharacter::<f64>::from_id(*id)?;
            principal += chi.is_principal() as usize;
        }
        if principal != 1 {
            return Err(Error::Domain(format!("dedekind needs exactly one principal character, got {principal}")));
        }
        Ok(Self::Dedekind(ids))
    }

    pub fn power(base: LFunctionId, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("exponent must be positive, got {k}")));
        }
        Ok(Self::Power(Box::new(base), k))
    }

    /// Flatten into (single L-function, exponent) pairs. Dedekind products
    /// stay whole; they are split only by [`Self::components`].
    pub fn factors(&self) -> Vec<(LFunctionId, f64)> {
        match self {
            Self::Power(b, k) => b.factors().into_iter().map(|(id, e)| (id, e * k)).collect(),
            Self::Product(v) => v.iter().flat_map(|f| f.factors()).collect(),
            other => vec![(other.clone(), 1.0)],
        }
    }

    /// Fully split into evaluable pieces: zeta, Hurwitz or Dirichlet L.
    pub fn components(&self) -> Vec<(LFunctionId, f64)> {
        let mut out = Vec::new();
        for (id, k) in self.factors() {
            match id {
                Self::Dedekind(ids) => {
                    for c in ids {
                        out.push((if c.q == 1 { Self::Zeta } else { Self::Dirichlet(c) }, k));
                    }
                }
                other => out.push((other, k)),
            }
        }
        out
    }

    /// Degree m of the underlying L-function (1 for Hurwitz ζ by convention).
    pub fn degree(&self) -> usize {
        match self {
            Self::Zeta | Self::Hurwitz { .. } | Self::Dirichlet(_) => 1,
            Self::Dedekind(ids) => ids.len(),
            Self::Power(b, _) => b.degree(),
            Self::Product(v) => v.iter().map(|f| f.degree()).sum(),
        }
    }

    /// Degree-1 Satake data of every component, with exponents.
    pub fn satake(&self) -> Result<Vec<(SatakeSpec<f64>, f64)>> {
        self.components()
            .into_iter()
            .map(|(id, k)| match id {
                Self::Zeta => Ok((SatakeSpec::zeta(), k)),
                Self::Dirichlet(c) => Ok((satake_from_character(&DirichletCharacter::from_id(c)?), k)),
                Self::Hurwitz { a, q } => {
                    Err(Error::Domain(format!("hurwitz:{a}/{q} has no Euler product and no Satake data")))
                }
                _ => unreachable!("components are flat"),
            })
            .collect()
    }

    pub fn is_real(&self) -> bool {
        self.components().iter().all(|(id, _)| match id {
            Self::Zeta => true,
            Self::Dirichlet(c) => DirichletCharacter::<f64>::from_id(*c).map(|x| x.is_real()).unwrap_or(false),
            _ => false,
        })
    }
}

/// Parse a comma-separated selector into (L-function, exponent) pairs.
pub fn parse_selector(s: &str) -> Result<Vec<(LFunctionId, f64)>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Domain("empty L-function selector".into()));
    }
    s.split(',').map(parse_factor).collect()
}

fn parse_factor(s: &str) -> Result<(LFunctionId, f64)> {
    let s = s.trim();
    let (base, k) = match s.split_once('^') {
        Some((b, e)) => {
            let k: f64 = e
                .trim()
                .parse()
                .map_err(|_| Error::Domain(format!("bad exponent `{e}` in `{s}`")))?;
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::Domain(format!("exponent must be positive in `{s}`")));
            }
            (b.trim(), k)
        }
        None => (s, 1.0),
    };
    Ok((parse_base(base)?, k))
}

fn parse_base(s: &str) -> Result<LFunctionId> {
    let bad = || Error::Domain(format!("unrecognised L-function `{s}`"));
    let int = |x: &str| x.trim().parse::<u64>().map_err(|_| bad());
    if s == "zeta" {
        return Ok(LFunctionId::Zeta);
    }
    let (head, rest) = s.split_once(':').ok_or_else(bad)?;
    match head {
        "hurwitz" => {
            let (a, q) = rest.split_once('/').ok_or_else(bad)?;
            LFunctionId::hurwitz(int(a)?, int(q)?)
        }
        "dirichlet" => {
            let id: CharacterId = rest.parse()?;
            LFunctionId::dirichlet(id.q, id.index)
        }
        "dedekind" => {
            if rest.contains(':') {
                let ids = rest.split('+').map(|x| x.parse()).collect::<Result<Vec<CharacterId>>>()?;
                LFunctionId::dedekind_from(ids)
            } else {
                LFunctionId::dedekind(int(rest)?)
            }
        }
        _ => Err(bad()),
    }
}

impl FromStr for LFunctionId {
    type Err = Error;

    /// A selector; several factors or exponents give a product.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = parse_selector(s)?;
        if parts.len() == 1 && parts[0].1 == 1.0 {
            return Ok(parts.pop().unwrap().0);
        }
        Ok(LFunctionId::Product(
            parts
                .into_iter()
                .map(|(id, k)| if k == 1.0 { id } else { LFunctionId::Power(Box::new(id), k) })
                .collect(),
        ))
    }
}

impl fmt::Display for LFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zeta => write!(f, "zeta"),
            Self::Hurwitz { a, q } => write!(f, "hurwitz:{a}/{q}"),
            Self::Dirichlet(c) => write!(f, "dirichlet:{c}"),
            Self::Dedekind(ids) => {
                let q = ids.iter().map(|c| c.q).max().unwrap_or(1);
                if LFunctionId::dedekind(q).ok().as_ref() == Some(self) {
                    return write!(f, "dedekind:{q}");
                }
                let parts: Vec<String> = ids.iter().map(|c| c.to_string()).collect();
                write!(f, "dedekind:{}", parts.join("+"))
            }
            Self::Power(b, k) => write!(f, "{b}^{k}"),
            Self::Product(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}
