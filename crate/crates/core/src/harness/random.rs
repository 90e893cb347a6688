//! Random catalog functions for property suites.

use rand::Rng;

use crate::catalog::FunctionSpec;

fn leaf<R: Rng + ?Sized>(rng: &mut R) -> FunctionSpec {
    match rng.gen_range(0..5) {
        0 => FunctionSpec::liouville(),
        1 => FunctionSpec::archimedean(rng.gen_range(-5.0..=5.0)),
        2 => {
            let mut d = 0;
            while d == 0 {
                d = rng.gen_range(-60i64..=60);
            }
            FunctionSpec::kronecker(d)
        }
        3 => FunctionSpec::interval(rng.gen_range(2.0..5_000.0f64).floor()),
        _ => {
            let r = rng.gen_range(0.0..=1.0f64).sqrt();
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            FunctionSpec::power_omega_complex(num_complex::Complex64::from_polar(r, th))
        }
    }
}

/// A random catalog member: a leaf family, a twist of one by `t` in
/// `[-5, 5]`, or a product of two.
pub fn random_function<R: Rng + ?Sized>(rng: &mut R) -> FunctionSpec {
    match rng.gen_range(0..10) {
        0..=5 => leaf(rng),
        6..=7 => {
            let b = leaf(rng);
            FunctionSpec::twisted(b, rng.gen_range(-5.0..=5.0))
        }
        _ => {
            let a = leaf(rng);
            let b = leaf(rng);
            FunctionSpec::product(a, b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::catalog_get;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn always_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let f = random_function(&mut rng);
            let a = catalog_get(&f).unwrap();
            for p in [2u64, 3, 5, 7919] {
                assert!(a.eval_at_prime(p).norm() <= 1.0 + 1e-12);
            }
        }
    }
}
