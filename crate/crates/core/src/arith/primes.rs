//! Prime tables.
//!
//! The sieve is segmented over odd numbers: base primes up to √limit are found
//! with a plain sieve, then each window of `SEGMENT` odd candidates is crossed
//! off independently. Peak memory is the output list plus one window, which
//! keeps `limit = 10⁹` (about 5·10⁷ primes, stored as `u32`) comfortable.

use crate::error::{domain, Result};

const SEGMENT: usize = 1 << 18;

/// All primes strictly below `limit`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    /// Primes `p` with `lo < p <= hi`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u32] {
        let a = self.primes.partition_point(|&p| (p as u64) <= lo);
        let b = self.primes.partition_point(|&p| (p as u64) <= hi);
        &self.primes[a..b.max(a)]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n < self.limit && self.primes.binary_search(&(n as u32)).is_ok()
    }

    /// `Some((p, e))` when `n = p^e` with `e ≥ 1` and `n < limit`.
    pub fn prime_power(&self, n: u64) -> Option<(u64, u32)> {
        if n < 2 || n >= self.limit {
            return None;
        }
        prime_power(n)
    }

    /// Λ(n): `log p` on prime powers below the limit, zero elsewhere.
    pub fn von_mangoldt(&self, n: u64) -> f64 {
        self.prime_power(n).map_or(0.0, |(p, _)| (p as f64).ln())
    }
}

/// Sieve the primes below `limit`.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return domain(format!("sieve limit must be at least 2, got {limit}"));
    }
    if limit > u32::MAX as u64 + 1 {
        return domain(format!("sieve limit {limit} exceeds the u32 prime store"));
    }
    let mut primes: Vec<u32> = Vec::with_capacity(estimate_count(limit));
    if limit > 2 {
        primes.push(2);
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = small_odd_primes(root);

    // Odd candidates n = 2i + 1 for i in [lo, hi).
    let total = limit.div_ceil(2);
    let mut mark = vec![false; SEGMENT];
    let mut lo = 1u64; // skip n = 1
    while lo < total {
        let hi = (lo + SEGMENT as u64).min(total);
        let len = (hi - lo) as usize;
        mark[..len].fill(false);
        let n_lo = 2 * lo + 1;
        for &p in &base {
            let p = p as u64;
            let p2 = p * p;
            if p2 > 2 * hi {
                break;
            }
            // First odd multiple of p that is ≥ max(p², n_lo).
            let mut start = if p2 >= n_lo { p2 } else { n_lo.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - 1) / 2 - lo) as usize;
            while i < len {
                mark[i] = true;
                i += p as usize;
            }
        }
        for (i, &m) in mark[..len].iter().enumerate() {
            if !m {
                let n = 2 * (lo + i as u64) + 1;
                if n < limit {
                    primes.push(n as u32);
                }
            }
        }
        lo = hi;
    }
    Ok(PrimeTable { limit, primes })
}

fn small_odd_primes(limit: u64) -> Vec<u32> {
    let n = limit as usize + 1;
    let mut composite = vec![false; n];
    let mut out = Vec::new();
    let mut i = 3;
    while i < n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    if x < 17.0 {
        8
    } else {
        (1.26 * x / x.ln()) as usize
    }
}

/// Trial-division factorisation, adequate for moduli and small arguments.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `Some((p, e))` when `n = p^e`, by trial division.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let f = factorize(n);
    (f.len() == 1).then(|| f[0])
}

pub fn euler_phi(q: u64) -> u64 {
    factorize(q)
        .iter()
        .fold(q, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest-prime-factor table on `0..=n` (entries 0 and 1 are 0).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
        }
    }
    spf
}

/// Ω(n), prime factors counted with multiplicity.
pub fn big_omega(n: u64) -> u32 {
    factorize(n).iter().map(|&(_, e)| e).sum()
}
