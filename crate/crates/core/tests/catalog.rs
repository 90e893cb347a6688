use std::collections::HashMap;

use num_complex::Complex64;
use proptest::prelude::*;

use pretentious::arith::primes_up_to;
use pretentious::harness::random_function;
use pretentious::{catalog_get, twist, Error, FunctionSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Euler's criterion for odd `p`, and the Kronecker rule at 2.
fn residue_oracle(d: i64, p: u64) -> f64 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1.0,
            3 | 5 => -1.0,
            _ => 0.0,
        };
    }
    let a = d.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0.0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1.0
    } else {
        -1.0
    }
}

#[test]
fn leaf_examples() {
    let lam = catalog_get(&FunctionSpec::liouville()).unwrap();
    assert!(primes_up_to(1000).iter().all(|&p| lam.eval_at_prime(p) == Complex64::new(-1.0, 0.0)));
    let ind = catalog_get(&FunctionSpec::interval(100.0)).unwrap();
    assert_eq!(ind.eval_at_prime(101).re, 1.0);
    assert_eq!(ind.eval_at_prime(97).re, 0.0);
    assert_eq!(ind.eval_at_prime(211).re, 0.0);
    assert_eq!(ind.eval_at_prime(199).re, 1.0);
    let chi = catalog_get(&FunctionSpec::kronecker(5)).unwrap();
    assert_eq!([2, 3, 11].map(|p| chi.eval_at_prime(p).re), [-1.0, -1.0, 1.0]);
}

#[test]
fn kronecker_matches_residue_oracle_and_is_periodic() {
    let primes = primes_up_to(100_000);
    for d in [5i64, -3, 13] {
        let f = catalog_get(&FunctionSpec::kronecker(d)).unwrap();
        let m = d.unsigned_abs();
        let mut by_class: HashMap<u64, f64> = HashMap::new();
        for &p in &primes {
            let v = f.eval_at_prime(p);
            assert_eq!(v, Complex64::new(residue_oracle(d, p), 0.0), "d = {d}, p = {p}");
            let prev = *by_class.entry(p % m).or_insert(v.re);
            assert_eq!(prev, v.re, "d = {d} is not periodic at p = {p}");
        }
    }
}

#[test]
fn json_and_shorthand() {
    let spec = FunctionSpec::from_json(r#"{"name":"kronecker","params":{"d":-3}}"#).unwrap();
    assert_eq!(spec, FunctionSpec::kronecker(-3));
    assert_eq!(FunctionSpec::parse("kronecker:d=-3").unwrap(), spec);
    assert_eq!(FunctionSpec::parse(&spec.to_json()).unwrap(), spec);
    let nested = FunctionSpec::twisted(FunctionSpec::product(FunctionSpec::liouville(), FunctionSpec::kronecker(5)), 1.5);
    assert_eq!(FunctionSpec::from_json(&nested.to_json()).unwrap(), nested);
}

#[test]
fn invalid_specs() {
    assert!(matches!(catalog_get(&FunctionSpec::parse("zeta").unwrap()), Err(Error::UnknownFunction(_))));
    assert!(matches!(catalog_get(&FunctionSpec::power_omega(1.5)), Err(Error::OutsideUnitDisc { .. })));
    assert!(catalog_get(&FunctionSpec::kronecker(0)).is_err());
    assert!(catalog_get(&FunctionSpec::parse("kronecker:d=2.5").unwrap()).is_err());
    assert!(catalog_get(&FunctionSpec::parse("liouville:t=1").unwrap()).is_err());
    assert!(FunctionSpec::parse("kronecker:d").is_err());
    assert!(FunctionSpec::from_json(r#"{"name":"liouville","extra":1}"#).is_err());
}

#[test]
fn twist_examples() {
    let lam = catalog_get(&FunctionSpec::liouville()).unwrap();
    let g = twist(&lam, 2.0);
    for p in primes_up_to(500) {
        let want = -Complex64::from_polar(1.0, -2.0 * (p as f64).ln());
        assert!((g.eval_at_prime(p) - want).norm() < 1e-13);
        assert!((g.eval_at_prime(p).norm() - 1.0).abs() < 1e-13);
        assert_eq!(twist(&lam, 0.0).eval_at_prime(p), lam.eval_at_prime(p));
    }
}

#[test]
fn random_functions_are_valid() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let spec = random_function(&mut rng);
        let f = catalog_get(&spec).unwrap();
        for p in primes_up_to(300) {
            assert!(f.eval_at_prime(p).norm() <= 1.0 + 1e-12, "{spec}");
        }
    }
}

proptest! {
    #[test]
    fn twists_compose(t1 in -50.0f64..50.0, t2 in -50.0f64..50.0, idx in 0usize..168) {
        let p = primes_up_to(1000)[idx];
        let chi = catalog_get(&FunctionSpec::kronecker(-3)).unwrap();
        let a = twist(&twist(&chi, t1), t2).eval_at_prime(p);
        let b = twist(&chi, t1 + t2).eval_at_prime(p);
        prop_assert!((a - b).norm() <= 1e-12);
    }

    #[test]
    fn product_is_pointwise(d in prop::sample::select(vec![5i64, -3, 13, -7]), t in -10.0f64..10.0, idx in 0usize..168) {
        let p = primes_up_to(1000)[idx];
        let a = FunctionSpec::kronecker(d);
        let b = FunctionSpec::archimedean(t);
        let prod = catalog_get(&FunctionSpec::product(a.clone(), b.clone())).unwrap().eval_at_prime(p);
        let want = catalog_get(&a).unwrap().eval_at_prime(p) * catalog_get(&b).unwrap().eval_at_prime(p);
        prop_assert!((prod - want).norm() <= 1e-15);
    }
}
