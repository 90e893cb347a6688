use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use pretentious::arith::{build_spf_table, factorize};
use pretentious::dirichlet::{
    chebyshev_monitor, coefficient, comb_log_derivative, der_ratio, der_ratio_check, euler_product_check, i_k_norm,
    l_continued, l_y_derivative, lambda_k_oracle, lambda_k_table, largest_prime_factor_table, montgomery_check,
    partitions, pretentious_scale, siegel_locate, siegel_locate_with, zeta_y_gamma,
};
use pretentious::{catalog_get, Error, FunctionSpec};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn zeta_values() {
    let one = FunctionSpec::one();
    let z = l_y_derivative(&one, 1, c(2.0), 0, 1_000_000).unwrap();
    assert!((z.value - c(PI * PI / 6.0)).norm() <= z.tail_bound);
    assert!(z.tail_bound < 1e-5);
    // zeta'(2)
    let d = l_y_derivative(&one, 1, c(2.0), 1, 1_000_000).unwrap();
    assert!((d.value - c(-0.937_548_254_315_843_8)).norm() <= d.tail_bound);
}

#[test]
fn liouville_series_is_zeta_ratio() {
    // L(s, lambda) = zeta(2s)/zeta(s); removing p = 2 multiplies by 1 + 2^{-s}.
    let lam = FunctionSpec::liouville();
    let e = l_y_derivative(&lam, 2, c(2.0), 0, 1_000_000).unwrap();
    let want = (PI.powi(4) / 90.0) / (PI * PI / 6.0) * 1.25;
    assert!((e.value.re - want).abs() <= e.tail_bound, "{} vs {want}", e.value.re);
}

#[test]
fn only_one_survives_above_truncation() {
    let e = l_y_derivative(&FunctionSpec::kronecker(-3), 5000, Complex64::new(1.3, 4.0), 0, 5000).unwrap();
    assert_eq!(e.value, c(1.0));
    let d = l_y_derivative(&FunctionSpec::kronecker(-3), 5000, Complex64::new(1.3, 4.0), 2, 5000).unwrap();
    assert_eq!(d.value, c(0.0));
}

#[test]
fn divergent_series_is_rejected() {
    assert!(matches!(l_y_derivative(&FunctionSpec::one(), 1, c(1.0), 0, 1000), Err(Error::Divergence { .. })));
}

#[test]
fn character_value_at_one() {
    // L(1, (5/.)) = 2 log((1 + sqrt 5)/2) / sqrt 5.
    let chi = catalog_get(&FunctionSpec::kronecker(5)).unwrap();
    let e = l_continued(&chi, 1, 1.0, 1_000_000).unwrap();
    let want = 2.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln() / 5f64.sqrt();
    assert!(e.rigorous);
    assert!((e.value.re - want).abs() <= e.error.max(1e-9), "{} vs {want} (error {})", e.value.re, e.error);
    // L(1, (-3/.)) = pi / (3 sqrt 3).
    let chi = catalog_get(&FunctionSpec::kronecker(-3)).unwrap();
    let e = l_continued(&chi, 1, 1.0, 1_000_000).unwrap();
    assert!((e.value.re - PI / (3.0 * 3f64.sqrt())).abs() <= e.error.max(1e-9));
}

#[test]
fn euler_factorization() {
    for (spec, y, s) in [
        (FunctionSpec::liouville(), 10, Complex64::new(1.2, 0.0)),
        (FunctionSpec::kronecker(5), 1000, Complex64::new(1.5, 3.0)),
        (FunctionSpec::archimedean(2.0), 100, Complex64::new(2.0, -1.0)),
    ] {
        let f = catalog_get(&spec).unwrap();
        let r = euler_product_check(&f, y, s, 1_000_000).unwrap();
        assert!(r.holds, "{spec}: difference {} above bound {}", r.difference, r.bound);
    }
    let f = catalog_get(&FunctionSpec::one()).unwrap();
    assert!(euler_product_check(&f, 10, c(1.1), 1000).is_err());
}

#[test]
fn gamma_is_real_on_the_real_axis() {
    let g = zeta_y_gamma(10, c(1.0), 10_000_000).unwrap();
    assert!(g.value.im.abs() < 1e-6);
    assert!(g.error_bar.is_finite());
    assert!(g.warning.is_some());
    assert!(zeta_y_gamma(1, c(1.0), 1000).is_err());
}

#[test]
fn lambda_k_values() {
    let t2 = lambda_k_table(2, 1000).unwrap();
    let l = |n: f64| n.ln();
    assert!((t2.get(7) - l(7.0).powi(2)).abs() < 1e-12);
    assert!((t2.get(9) - 3.0 * l(3.0).powi(2)).abs() < 1e-12);
    assert!((t2.get(15) - 2.0 * l(3.0) * l(5.0)).abs() < 1e-12);
    assert_eq!(t2.get(30), 0.0);
    assert_eq!(t2.get(1), 0.0);
    let t0 = lambda_k_table(0, 10).unwrap();
    assert_eq!(t0.values[1..], [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(matches!(lambda_k_table(9, 10), Err(Error::Capacity { .. })));
}

#[test]
fn lambda_k_support_and_oracle() {
    let limit = 30_000;
    let spf = build_spf_table(1, limit).unwrap();
    for k in 1..=4 {
        let rec = lambda_k_table(k, limit).unwrap();
        let ora = lambda_k_oracle(k, limit).unwrap();
        for n in 2..=limit {
            let (a, b) = (rec.get(n), ora.get(n));
            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0), "k = {k}, n = {n}");
            if factorize(n, &spf).unwrap().distinct() > k as usize {
                assert_eq!(a, 0.0, "k = {k}, n = {n}");
            }
        }
    }
}

#[test]
fn chebyshev_constant() {
    let table = lambda_k_table(2, 100_000).unwrap();
    let lpf = largest_prime_factor_table(100_000);
    let row = chebyshev_monitor(&table, &lpf, 1000, 1e5);
    assert!(row.c > 0.0 && row.c.is_finite());
}

#[test]
fn comb_examples() {
    for k in 1..=10 {
        let mut d = vec![c(0.0); k + 1];
        d[0] = Complex64::new(2.0, 1.0);
        assert_eq!(comb_log_derivative(&d).unwrap(), c(0.0));
    }
    let a = Complex64::new(0.3, -1.2);
    let f0 = Complex64::new(1.5, 0.5);
    let d: Vec<Complex64> = (0..=6).map(|j| f0 * a.powu(j)).collect();
    assert!((comb_log_derivative(&d[..2]).unwrap() + a).norm() < 1e-14);
    for k in 2..=6 {
        assert!(comb_log_derivative(&d[..=k]).unwrap().norm() < 1e-12);
    }
    assert!(matches!(comb_log_derivative(&[c(0.0), c(1.0)]), Err(Error::ZeroDenominator(_))));
    assert_eq!(der_ratio(&[c(3.0), c(0.0), c(0.0)]).unwrap(), (0.0, 0.0));
}

#[test]
fn partition_counts_and_coefficients() {
    let counts: Vec<usize> = (1..=10).map(|k| partitions(k).len()).collect();
    assert_eq!(counts, [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    // k = 2: a = (2, 0) gives 2! 1! / 2! = 1; a = (0, 1) gives 2! 0! / 2! = 1.
    assert_eq!(coefficient(&[2, 0]).to_string(), "1");
    assert_eq!(coefficient(&[0, 1]).to_string(), "1");
    assert_eq!(coefficient(&[3, 0, 0]).to_string(), "2");
}

#[test]
fn comb_matches_finite_differences_on_zeta_polynomial() {
    let f = |s: f64, m: u32| -> f64 { (1..=50).map(|n| (-(n as f64).ln()).powi(m as i32) * (n as f64).powf(-s)).sum() };
    let g = |s: f64| -f(s, 1) / f(s, 0);
    let h = 1e-3;
    let s = 2.0;
    let fd = [
        g(s),
        (g(s + h) - g(s - h)) / (2.0 * h),
        (g(s + h) - 2.0 * g(s) + g(s - h)) / (h * h),
        (g(s + 2.0 * h) - 2.0 * g(s + h) + 2.0 * g(s - h) - g(s - 2.0 * h)) / (2.0 * h.powi(3)),
    ];
    let derivs: Vec<Complex64> = (0..=4).map(|m| c(f(s, m))).collect();
    for k in 1..=4 {
        let got = comb_log_derivative(&derivs[..=k]).unwrap().re;
        assert!((got - fd[k - 1]).abs() <= 1e-5 * fd[k - 1].abs(), "k = {k}: {got} vs {}", fd[k - 1]);
    }
    der_ratio_check(&derivs).unwrap();
}

#[test]
fn ik_norm_tail() {
    let x = 1e5f64;
    let sigma = 1.0 + 1.0 / x.ln();
    let lam = FunctionSpec::liouville();
    let a = i_k_norm(&lam, 0, sigma, 0.5 * x.ln(), 1e-3).unwrap();
    let b = i_k_norm(&lam, 0, sigma, x.ln(), 1e-3).unwrap();
    assert!(a.value.is_finite() && a.value > 0.0);
    assert!((b.integral - a.integral).abs() <= a.tail_majorant + a.quadrature_error + b.quadrature_error);
    assert!((a.integral - a.exact_integral).abs() <= a.quadrature_error);
    assert!(matches!(i_k_norm(&lam, 0, 1.0, 5.0, 0.1), Err(Error::Divergence { .. })));
}

#[test]
fn montgomery_majorant() {
    let f = catalog_get(&FunctionSpec::liouville()).unwrap();
    let rows = montgomery_check(&f, 3000, 1.0 + 1.0 / 3000f64.ln(), &[10.0]).unwrap();
    assert!(rows.iter().all(|r| r.holds && r.ratio <= 1.0));
}

#[test]
fn scales() {
    let lam = pretentious_scale(&FunctionSpec::liouville(), 50, 10_000_000).unwrap();
    assert!(lam.degenerate && lam.log_q_prime.is_infinite());
    let chi = FunctionSpec::kronecker(5);
    let a = pretentious_scale(&chi, 50, 500_000).unwrap();
    let b = pretentious_scale(&chi, 50, 1_000_000).unwrap();
    assert!(a.log_q_prime.is_finite() && (a.log_q_prime / b.log_q_prime - 1.0).abs() < 0.1);
    let one = pretentious_scale(&FunctionSpec::one(), 50, 1_000_000).unwrap();
    assert!(!one.degenerate && one.l_value.norm() > 1.0);
}

#[test]
fn real_zero_scan() {
    let p = siegel_locate(&FunctionSpec::kronecker(5), 50, 0.5, 16).unwrap();
    assert!(!p.beta_is_zero && p.ratio_min > 0.0 && p.ratio_max.is_finite());
    assert!((p.beta - (1.0 - 1.0 / 50f64.ln())).abs() < 1e-15);
    let lam = catalog_get(&FunctionSpec::liouville()).unwrap();
    let p = siegel_locate_with(&lam, 50, 0.5, 16, 1_000_000).unwrap();
    assert!(p.beta_is_zero && (p.beta - 1.0).abs() < 1e-2, "beta = {}", p.beta);
    assert!(p.eta.abs() < 1e-2);
    assert!(matches!(siegel_locate(&FunctionSpec::kronecker(5), 50, 0.5, 1), Err(Error::Degenerate(_))));
    assert!(siegel_locate(&FunctionSpec::archimedean(1.0), 50, 0.5, 16).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn der_sandwich(re in prop::collection::vec(-2.0f64..2.0, 6), im in prop::collection::vec(-2.0f64..2.0, 6), f0 in 0.1f64..3.0) {
        let mut d: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        d[0] = c(f0);
        let (m, n) = der_ratio(&d).unwrap();
        prop_assert!(m / 2.0 <= n * (1.0 + 1e-12) && n <= 2.0 * m * (1.0 + 1e-12));
    }

    #[test]
    fn exponential_log_derivative(a_re in -3.0f64..3.0, a_im in -3.0f64..3.0, k in 2usize..=10) {
        let a = Complex64::new(a_re, a_im);
        let d: Vec<Complex64> = (0..=k as u32).map(|j| a.powu(j)).collect();
        let v = comb_log_derivative(&d).unwrap();
        // the individual terms reach k! |a|^k, so cancellation is measured against that
        let scale = (1..=k).map(|j| j as f64).product::<f64>() * a.norm().max(1.0).powi(k as i32);
        prop_assert!(v.norm() <= 1e-13 * scale, "{} against {scale}", v.norm());
    }
}
