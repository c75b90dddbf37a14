//! Dirichlet characters mod q.
//!
//! (ℤ/qℤ)× is split into cyclic components, one per odd prime power (with a
//! primitive root as generator) and zero, one or two for the power of two
//! (generators −1 and 5). A character is an exponent vector `(e_1,…,e_c)`
//! with `χ(g_i) = e^{2πi e_i/ord_i}`; characters are numbered in
//! lexicographic order of that vector, components ordered by increasing prime
//! and, for 2^e with e ≥ 3, the −1 component before the 5 component.
//! Index 0 is therefore always the principal character.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arith::primes::{euler_phi, factorize, gcd};
use crate::error::{domain, Error, Result};
use crate::scalar::{root_of_unity, Real};

/// Address of a character: modulus and canonical index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacterId {
    pub q: u64,
    pub index: u64,
}

impl CharacterId {
    pub const TRIVIAL: CharacterId = CharacterId { q: 1, index: 0 };

    pub fn new(q: u64, index: u64) -> Self {
        Self { q, index }
    }
}

impl fmt::Display for CharacterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.q, self.index)
    }
}

impl FromStr for CharacterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (q, i) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("character id `{s}` is not of the form q:index")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::Domain(format!("bad integer `{x}` in character id `{s}`")))
        };
        Ok(Self { q: parse(q)?, index: parse(i)? })
    }
}

#[derive(Debug, Clone)]
struct Component {
    /// Prime-power modulus the component lives on.
    modulus: u64,
    order: u64,
    /// Position of this component inside the local exponent tuple.
    slot: usize,
}

/// The decomposition of (ℤ/qℤ)× used to enumerate and evaluate characters.
#[derive(Debug, Clone)]
pub struct CharacterGroupStructure {
    q: u64,
    components: Vec<Component>,
    /// Per prime power: modulus and table residue ↦ local exponents.
    local_logs: Vec<(u64, Vec<Option<[u64; 2]>>)>,
    /// Which local table each component reads.
    local_of: Vec<usize>,
}

impl CharacterGroupStructure {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return domain("modulus must be at least 1");
        }
        let mut components = Vec::new();
        let mut local_logs = Vec::new();
        let mut local_of = Vec::new();
        for (p, e) in factorize(q) {
            let m = p.pow(e);
            let gens: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(m - 1, 2)],
                    _ => vec![(m - 1, 2), (5, m / 4)],
                }
            } else {
                vec![(primitive_root_prime_power(p, e), m / p * (p - 1))]
            };
            if gens.is_empty() {
                continue;
            }
            let mut table = vec![None; m as usize];
            // Enumerate all exponent tuples; the map to residues is a bijection.
            let o0 = gens[0].1;
            let o1 = gens.get(1).map_or(1, |g| g.1);
            let mut a_pow = 1u64;
            for a in 0..o0 {
                let mut v = a_pow;
                for b in 0..o1 {
                    table[v as usize] = Some([a, b]);
                    if let Some(&(g1, _)) = gens.get(1) {
                        v = v * g1 % m;
                    }
                }
                a_pow = a_pow * gens[0].0 % m;
            }
            let local = local_logs.len();
            for (slot, &(_, order)) in gens.iter().enumerate() {
                components.push(Component { modulus: m, order, slot });
                local_of.push(local);
            }
            local_logs.push((m, table));
        }
        Ok(Self { q, components, local_logs, local_of })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Orders of the cyclic components in canonical order.
    pub fn orders(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.order).collect()
    }

    pub fn group_order(&self) -> u64 {
        self.components.iter().map(|c| c.order).product()
    }

    /// Mixed-radix decoding of a canonical index into generator exponents.
    pub fn exponents(&self, index: u64) -> Result<Vec<u64>> {
        if index >= self.group_order() {
            return domain(format!(
                "character index {index} out of range for modulus {} (group order {})",
                self.q,
                self.group_order()
            ));
        }
        let mut rest = index;
        let mut out = vec![0; self.components.len()];
        for (i, c) in self.components.iter().enumerate().rev() {
            out[i] = rest % c.order;
            rest /= c.order;
        }
        Ok(out)
    }

    /// Discrete logarithms of a unit `n` with respect to every component.
    fn logs(&self, n: u64) -> Option<Vec<u64>> {
        if gcd(n % self.q, self.q) != 1 {
            return None;
        }
        Some(
            self.components
                .iter()
                .zip(&self.local_of)
                .map(|(c, &l)| {
                    let (m, table) = &self.local_logs[l];
                    debug_assert_eq!(*m, c.modulus);
                    table[(n % m) as usize].expect("unit has a logarithm")[c.slot]
                })
                .collect(),
        )
    }

    pub fn character<S: Real>(&self, index: u64) -> Result<DirichletCharacter<S>> {
        let exps = self.exponents(index)?;
        let orders = self.orders();
        let l = orders.iter().fold(1u64, |acc, &o| lcm(acc, o));
        let mut values = Vec::with_capacity(self.q as usize);
        for n in 0..self.q {
            match self.logs(n) {
                None => values.push(Complex::new(S::zero(), S::zero())),
                Some(logs) => {
                    let num = exps
                        .iter()
                        .zip(&logs)
                        .zip(&orders)
                        .fold(0u64, |acc, ((&e, &g), &o)| (acc + (e * g % o) * (l / o)) % l);
                    values.push(root_of_unity(num, l));
                }
            }
        }
        Ok(DirichletCharacter {
            q: self.q,
            index,
            exponents: exps.clone(),
            values,
            is_principal: exps.iter().all(|&e| e == 0),
        })
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let factors: Vec<u64> = factorize(p - 1).into_iter().map(|(f, _)| f).collect();
    let g = (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
        .unwrap_or(1);
    // A primitive root mod p lifts to every p^e unless g^{p−1} ≡ 1 mod p².
    if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
        g + p
    } else {
        g
    }
}

/// A Dirichlet character with its full value table on residues mod q.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter<S: Real> {
    q: u64,
    index: u64,
    exponents: Vec<u64>,
    values: Vec<Complex<S>>,
    is_principal: bool,
}

impl<S: Real> DirichletCharacter<S> {
    pub fn new(q: u64, index: u64) -> Result<Self> {
        CharacterGroupStructure::new(q)?.character(index)
    }

    pub fn from_id(id: CharacterId) -> Result<Self> {
        Self::new(id.q, id.index)
    }

    pub fn trivial() -> Self {
        Self::new(1, 0).expect("trivial character")
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn id(&self) -> CharacterId {
        CharacterId { q: self.q, index: self.index }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_principal(&self) -> bool {
        self.is_principal
    }

    /// Real-valued characters have a real coefficient system.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == S::zero())
    }

    #[inline]
    pub fn value(&self, n: u64) -> Complex<S> {
        self.values[(n % self.q) as usize]
    }

    pub fn values(&self) -> &[Complex<S>] {
        &self.values
    }

    pub fn conj(&self) -> Vec<Complex<S>> {
        self.values.iter().map(|v| v.conj()).collect()
    }
}

/// All φ(q) characters mod q in canonical order.
pub fn character_group<S: Real>(q: u64) -> Result<Vec<DirichletCharacter<S>>> {
    let g = CharacterGroupStructure::new(q)?;
    debug_assert_eq!(g.group_order(), euler_phi(q));
    (0..g.group_order()).map(|i| g.character(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_one() {
        let g = character_group::<f64>(1).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g[0].is_principal());
        for n in 0..10 {
            assert_eq!(g[0].value(n), Complex::new(1.0, 0.0));
        }
    }

    #[test]
    fn modulus_four() {
        let g = character_group::<f64>(4).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g[0].is_principal());
        assert_eq!(g[1].value(3), Complex::new(-1.0, 0.0));
        assert_eq!(g[1].value(1), Complex::new(1.0, 0.0));
        assert_eq!(g[1].value(2), Complex::new(0.0, 0.0));
    }

    #[test]
    fn modulus_five_generator_two() {
        let g = character_group::<f64>(5).unwrap();
        let mut vals: Vec<(i64, i64)> = g
            .iter()
            .map(|c| (c.value(2).re.round() as i64, c.value(2).im.round() as i64))
            .collect();
        vals.sort();
        assert_eq!(vals, vec![(-1, 0), (0, -1), (0, 1), (1, 0)]);
    }

    #[test]
    fn group_sizes_and_principal() {
        for q in 1..=60u64 {
            let g = character_group::<f64>(q).unwrap();
            assert_eq!(g.len() as u64, euler_phi(q), "q={q}");
            assert_eq!(g.iter().filter(|c| c.is_principal()).count(), 1);
            assert!(g[0].is_principal());
        }
    }

    #[test]
    fn id_round_trip() {
        let id: CharacterId = "12:3".parse().unwrap();
        assert_eq!(id, CharacterId::new(12, 3));
        assert_eq!(id.to_string(), "12:3");
        assert!("12".parse::<CharacterId>().is_err());
        assert!(DirichletCharacter::<f64>::new(4, 2).is_err());
    }

    #[test]
    fn single_precision_table() {
        let c = DirichletCharacter::<f32>::new(5, 1).unwrap();
        assert!((c.value(2).norm() - 1.0).abs() < 1e-6);
    }
}
