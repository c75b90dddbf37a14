use lmoments::arith::{character_group, satake_from_character, sieve_primes, SatakeSpec};
use lmoments::harper::weights::weight_bound;
use lmoments::harper::{build_schedule, classify_sets, good_set_moment, smoothed_lambda, PolyBank, SetLabel};
use lmoments::lfunc::GridSpec;
use proptest::prelude::*;

fn specs() -> Vec<SatakeSpec<f64>> {
    let mut v = vec![SatakeSpec::zeta()];
    v.extend(character_group::<f64>(5).unwrap().iter().skip(1).map(satake_from_character));
    v
}

#[test]
fn good_set_moment_stays_in_band() {
    let z = [SatakeSpec::zeta()];
    for t in [1e4, 1e5, 1e6] {
        let s = build_schedule(t, &[1.0], &z, 0.01, 0.2).unwrap();
        let b = PolyBank::new(s, &[1.0], &z).unwrap();
        let g = good_set_moment(&b, 0.02).unwrap();
        assert!((1e-2..=1e2).contains(&g.normalized), "T = {t}: {g:?}");
    }
}

#[test]
fn every_sample_gets_one_label() {
    let z = [SatakeSpec::zeta()];
    let s = build_schedule(1e5, &[1.0], &z, 0.1, 0.5).unwrap();
    let b = PolyBank::new(s.clone(), &[1.0], &z).unwrap();
    let grid = GridSpec::new(1e5, 1e5 + 2000.0, 0.05).unwrap();
    // Tight thresholds so that several labels occur.
    let tight = s.scaled(0.08);
    let c = classify_sets(&tight, &b, &grid).unwrap();
    assert_eq!(c.labels.len(), grid.len());
    assert!(c.measures.len() >= 2, "{:?}", c.measures);
    let total: usize = c.measures.iter().map(|m| m.count).sum();
    assert_eq!(total, grid.len());
    let frac: f64 = c.measures.iter().map(|m| m.fraction).sum();
    assert!((frac - 1.0).abs() < 1e-12);
    for l in &c.labels {
        if let SetLabel::Bad { j, l } = *l {
            assert!(1 <= j && j <= l && l <= s.j);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prime_weights_obey_grc(x in 3.0f64..1e4, k1 in 0.1f64..3.0, k2 in 0.1f64..3.0, pick in 0usize..5, u in 0.0f64..1.0) {
        let all = specs();
        let sp = vec![all[0].clone(), all[pick % all.len()].clone()];
        let k = [k1, k2];
        let primes: Vec<u64> = sieve_primes(x.floor() as u64).unwrap().iter().collect();
        let p = primes[((primes.len() - 1) as f64 * u) as usize];
        let w = smoothed_lambda(x, p, &k, &sp).unwrap();
        prop_assert!(w.norm() <= weight_bound(&k, &sp) * (1.0 + 1e-12));
    }
}
