use lmoments::arith::coeffs::divisor_coeff;
use lmoments::arith::{big_h, character_group, divisor_series, lambda_pi, satake_from_character, sieve_primes, SatakeSpec};
use lmoments::arith::primes::{euler_phi, gcd};
use lmoments::{Complex64, Series};
use proptest::prelude::*;

fn char_specs() -> Vec<SatakeSpec<f64>> {
    let mut out = vec![SatakeSpec::zeta()];
    for q in [4u64, 5, 7, 12] {
        out.extend(character_group::<f64>(q).unwrap().iter().filter(|c| !c.is_principal()).map(satake_from_character));
    }
    out
}

#[test]
fn grc_bound_on_lambda() {
    let table = sieve_primes(100_000).unwrap();
    for spec in char_specs() {
        assert!(spec.grc_asserted());
        let m = spec.degree() as f64;
        for n in 2..=100_000u64 {
            let v = lambda_pi(&spec, n).unwrap().norm();
            assert!(v <= m * table.von_mangoldt(n) + 1e-12, "{} at n = {n}", spec.label());
        }
    }
}

/// 𝐡(p^ℓ) of a product from the single-factor series at p.
fn product_h(k: &[f64], specs: &[SatakeSpec<f64>], p: u64, l: usize) -> Complex64 {
    let series: Vec<Vec<Complex64>> =
        k.iter().zip(specs).map(|(k, s)| lmoments::arith::coeffs::h_series(*k, s, p, l).unwrap()).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); l + 1];
    acc[0] = Complex64::new(1.0, 0.0);
    for s in &series {
        let mut next = vec![Complex64::new(0.0, 0.0); l + 1];
        for (i, a) in acc.iter().enumerate() {
            for j in 0..=l - i {
                next[i + j] += a * s[j];
            }
        }
        acc = next;
    }
    acc[l]
}

#[test]
fn prime_power_coefficients_are_small() {
    let specs = char_specs();
    let cases: Vec<(Vec<f64>, Vec<SatakeSpec<f64>>)> = vec![
        (vec![1.5], vec![specs[0].clone()]),
        (vec![1.5, 0.7], vec![specs[0].clone(), specs[1].clone()]),
        (vec![0.5, 1.0, 2.0], vec![specs[1].clone(), specs[3].clone(), specs[5].clone()]),
    ];
    let primes: Vec<u64> = sieve_primes(100).unwrap().iter().collect();
    for (k, s) in cases {
        let r = k.len() as f64;
        let big_r = k.iter().zip(&s).map(|(k, s)| r * k * s.degree() as f64).fold(0.0, f64::max);
        for &p in &primes {
            for l in 0..=20usize {
                let h = product_h(&k, &s, p, l).norm();
                let d = divisor_coeff(big_r, l as u32).unwrap();
                assert!(h <= d * (1.0 + 1e-12), "k = {k:?}, p = {p}, l = {l}: {h} > {d}");
            }
        }
    }
}

#[test]
fn euler_product_at_two() {
    let n = 10_000usize;
    let s = Complex64::new(2.0, 0.0);
    let primes: Vec<u64> = sieve_primes(n as u64).unwrap().iter().collect();
    for spec in char_specs() {
        for k in [0.5, 1.0, 1.7] {
            let h = big_h(&[k], std::slice::from_ref(&spec), n).unwrap();
            let series: Complex64 = (1..=n).map(|m| h.coeffs()[m] * (m as f64).powf(-2.0)).sum();
            let mut log_prod = Complex64::new(0.0, 0.0);
            for &p in &primes {
                for a in spec.alphas(p).unwrap() {
                    let z = a * (-(p as f64).ln() * s).exp();
                    log_prod -= k * (Complex64::new(1.0, 0.0) - z).ln();
                }
            }
            let gap = (series - log_prod.exp()).norm();
            assert!(gap < 1e-3, "{} k = {k}: gap {gap}", spec.label());
        }
    }
}

#[test]
fn character_orthogonality() {
    for q in 1..=100u64 {
        let g = character_group::<f64>(q).unwrap();
        let phi = euler_phi(q) as f64;
        assert_eq!(g.len() as f64, phi);
        for (i, a) in g.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                let s: Complex64 = (0..q).map(|r| a.value(r) * b.value(r).conj()).sum();
                let want = if i == j { phi } else { 0.0 };
                assert!((s - want).norm() < 1e-12 * phi.max(1.0), "q = {q}, ({i}, {j}): {s}");
            }
        }
    }
}

fn assert_multiplicative(h: &Series, n: usize) {
    let c = h.coeffs();
    assert!((c[1] - 1.0).norm() < 1e-15);
    for a in 2..=n {
        for b in a + 1..=n / a {
            if gcd(a as u64, b as u64) == 1 {
                let d = (c[a * b] - c[a] * c[b]).norm();
                assert!(d <= 1e-12 * (1.0 + c[a * b].norm()), "h({a}·{b}) != h({a})h({b})");
            }
        }
    }
}

#[test]
fn series_are_multiplicative() {
    let n = 10_000;
    let specs = char_specs();
    assert_multiplicative(&divisor_series(1.5, n).unwrap(), n);
    assert_multiplicative(&big_h(&[1.0], &[specs[2].clone()], n).unwrap(), n);
    assert_multiplicative(&big_h(&[0.5, 2.0], &[specs[0].clone(), specs[4].clone()], n).unwrap(), n);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// d_k(p^ℓ) = C(k+ℓ−1, ℓ) is increasing in k for ℓ ≥ 1.
    #[test]
    fn divisor_coeff_monotone_in_k(k in 0.01f64..5.0, dk in 0.01f64..2.0, l in 1u32..30) {
        prop_assert!(divisor_coeff(k + dk, l).unwrap() > divisor_coeff(k, l).unwrap());
    }

    /// 𝐡 of ζ^{k1}·ζ^{k2} is d_{k1+k2}.
    #[test]
    fn zeta_powers_add(k1 in 0.1f64..2.0, k2 in 0.1f64..2.0) {
        let z = SatakeSpec::zeta();
        let a = big_h(&[k1, k2], &[z.clone(), z], 2000).unwrap();
        let b = divisor_series(k1 + k2, 2000).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()));
        }
    }
}
