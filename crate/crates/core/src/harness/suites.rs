//! Verification suites: property checks with CSV tables.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, Scenario};
use super::fmt_f64;
use super::random::random_function;
use super::report::{SuiteCheck, SuiteReport};
use crate::arith::primes::primes_up_to;
use crate::catalog::{catalog_get, FunctionSpec};
use crate::dirichlet::{
    chebyshev_monitor, lambda_k_oracle, lambda_k_tables, largest_prime_factor_table, montgomery_check,
    plancherel_pair_with, pretentious_scale_with, relative_deviation, siegel_locate_with,
};
use crate::distance::distance_sq_values;
use crate::error::Result;
use crate::sieve_weights::{build_beta_sieve, main_term_ratio, sandwich_scan};

/// Slack for the triangle inequality on distances.
pub const TRIANGLE_SLACK: f64 = 1e-9;

fn scaled(n: f64, scale: f64, min: f64) -> u64 {
    (n * scale).max(min).round() as u64
}

/// Triangle inequality `D(f,g) + D(g,h) >= D(f,h)` over random catalog
/// triples and random ranges `(y, x]` with `x <= 10^6`.
pub fn distance_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let scale = cfg.scale();
    let n_triples = scaled(200.0, scale, 1.0) as usize;
    let n_ranges = scaled(20.0, scale, 1.0) as usize;
    let x_cap = scaled(1_000_000.0, scale.min(1.0), 1000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let triples: Vec<[FunctionSpec; 3]> =
        (0..n_triples).map(|_| [random_function(&mut rng), random_function(&mut rng), random_function(&mut rng)]).collect();
    let ranges: Vec<(u64, u64)> = (0..n_ranges)
        .map(|_| {
            let x = (rng.gen_range((1000f64).ln()..=(x_cap as f64).ln())).exp().floor() as u64;
            let y = (rng.gen_range(0.0..=((x / 2) as f64).ln())).exp().floor().max(1.0) as u64;
            (y, x)
        })
        .collect();
    let primes = primes_up_to(ranges.iter().map(|r| r.1).max().unwrap_or(2));
    let slices: Vec<(usize, usize)> =
        ranges.iter().map(|&(y, x)| (primes.partition_point(|&p| p <= y), primes.partition_point(|&p| p <= x))).collect();

    let specs: Vec<[crate::arith::PrimeAssignment; 3]> = triples
        .iter()
        .map(|t| Ok([catalog_get(&t[0])?, catalog_get(&t[1])?, catalog_get(&t[2])?]))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<(f64, f64, f64)>> = specs
        .par_iter()
        .map(|fs| {
            let vals: Vec<Vec<Complex64>> = fs.iter().map(|f| primes.iter().map(|&p| f.eval_at_prime(p)).collect()).collect();
            slices
                .iter()
                .map(|&(a, b)| {
                    let ps = &primes[a..b];
                    let d = |i: usize, j: usize| distance_sq_values(&vals[i][a..b], &vals[j][a..b], ps).max(0.0).sqrt();
                    (d(0, 1), d(1, 2), d(0, 2))
                })
                .collect()
        })
        .collect();

    let mut csv = String::from("triple,range,y,x,d_fg,d_gh,d_fh,margin\n");
    let mut violations = 0u64;
    let mut worst = f64::INFINITY;
    for (ti, row) in rows.iter().enumerate() {
        for (ri, &(fg, gh, fh)) in row.iter().enumerate() {
            let margin = fg + gh - fh;
            worst = worst.min(margin);
            if margin < -TRIANGLE_SLACK {
                violations += 1;
            }
            let (y, x) = ranges[ri];
            csv.push_str(&format!(
                "{ti},{ri},{y},{x},{},{},{},{}\n",
                fmt_f64(fg),
                fmt_f64(gh),
                fmt_f64(fh),
                fmt_f64(margin)
            ));
        }
    }
    let mut fcsv = String::from("triple,f,g,h\n");
    for (i, t) in triples.iter().enumerate() {
        fcsv.push_str(&format!("{i},\"{}\",\"{}\",\"{}\"\n", t[0], t[1], t[2]));
    }
    Ok(SuiteReport {
        scenario: Scenario::DistanceSuite,
        checks: vec![
            SuiteCheck::at_most(
                "triangle_violations",
                violations as f64,
                0.0,
                format!("{n_triples} triples x {n_ranges} ranges, slack {TRIANGLE_SLACK:e}"),
            ),
            SuiteCheck::at_least("triangle_min_margin", worst, -TRIANGLE_SLACK, "D(f,g) + D(g,h) - D(f,h)"),
        ],
        tables: vec![("triangle".into(), csv), ("triangle_functions".into(), fcsv)],
    })
}

/// Recursion against the Möbius convolution oracle, support, positivity and
/// the Chebyshev-type constant.
pub fn lambda_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let limit = scaled(100_000.0, cfg.scale().min(1.0), 100.0);
    let k_max = cfg.k.unwrap_or(4).min(crate::dirichlet::lambda_k::MAX_K);
    let tables = lambda_k_tables(k_max, limit)?;
    let omega = distinct_prime_counts(limit);
    let mut csv = String::from("k,max_relative_deviation,support_violations,sign_violations,log_cap_violations\n");
    let mut worst_dev = 0.0f64;
    let mut support_bad = 0u64;
    let mut shape_bad = 0u64;
    for k in 1..=k_max {
        let t = &tables[k as usize];
        let o = lambda_k_oracle(k, limit)?;
        let mut dev = 0.0f64;
        let (mut sup, mut sign, mut cap) = (0u64, 0u64, 0u64);
        for n in 1..=limit as usize {
            let v = t.values[n];
            dev = dev.max(relative_deviation(v, o.values[n]));
            if omega[n] > k && v != 0.0 {
                sup += 1;
            }
            let scale = if n > 1 { (n as f64).ln().powi(k as i32) } else { 0.0 };
            if v < -1e-9 * scale.max(1.0) {
                sign += 1;
            }
            if v > scale * (1.0 + 1e-9) + 1e-12 {
                cap += 1;
            }
        }
        worst_dev = worst_dev.max(dev);
        support_bad += sup;
        shape_bad += sign + cap;
        csv.push_str(&format!("{k},{},{sup},{sign},{cap}\n", fmt_f64(dev)));
    }
    let lpf = largest_prime_factor_table(limit);
    let mut cheb = String::from("k,z,x,lhs,scale,c\n");
    let mut c_max = 0.0f64;
    for k in 1..=k_max.min(3) {
        for z in [10u64, 100, 1000] {
            let r = chebyshev_monitor(&tables[k as usize], &lpf, z, limit as f64);
            c_max = c_max.max(r.c);
            cheb.push_str(&format!("{k},{z},{},{},{},{}\n", fmt_f64(r.x), fmt_f64(r.lhs), fmt_f64(r.scale), fmt_f64(r.c)));
        }
    }
    Ok(SuiteReport {
        scenario: Scenario::LambdaSuite,
        checks: vec![
            SuiteCheck::at_most("oracle_max_relative_deviation", worst_dev, 1e-9, format!("k <= {k_max}, n <= {limit}")),
            SuiteCheck::at_most("support_violations", support_bad as f64, 0.0, "more than k distinct primes"),
            SuiteCheck::at_most("range_violations", shape_bad as f64, 0.0, "0 <= Lambda_k(n) <= (log n)^k"),
            SuiteCheck { name: "chebyshev_constant".into(), passed: true, value: c_max, limit: f64::INFINITY, detail: "reported".into() },
        ],
        tables: vec![("lambda_oracle".into(), csv), ("lambda_chebyshev".into(), cheb)],
    })
}

/// `omega(n)`, the number of distinct prime factors, for `n <= limit`.
pub fn distinct_prime_counts(limit: u64) -> Vec<u32> {
    let mut w = vec![0u32; limit as usize + 1];
    for p in primes_up_to(limit) {
        for m in (p as usize..=limit as usize).step_by(p as usize) {
            w[m] += 1;
        }
    }
    w
}

/// Sandwich configurations `(y, u, x)` checked by the sieve suite.
pub const SANDWICH_CONFIGS: [(u64, f64, u64); 3] = [(10, 2.0, 100_000), (30, 3.0, 1_000_000), (100, 2.0, 1_000_000)];

pub fn sieve_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let scale = cfg.scale().min(1.0);
    let mut checks = Vec::new();
    let mut csv = String::from("y,u,x,rough,violations,min_plus,max_minus\n");
    for &(y, u, x) in &SANDWICH_CONFIGS {
        let x = scaled(x as f64, scale, 1000.0);
        let w = build_beta_sieve(y, u)?;
        let r = sandwich_scan(&w, x)?;
        csv.push_str(&format!("{y},{},{x},{},{},{},{}\n", fmt_f64(u), r.rough, r.violations, r.min_plus, r.max_minus));
        checks.push(SuiteCheck::at_most(&format!("sandwich_y{y}_u{u}"), r.violations as f64, 0.0, format!("x = {x}")));
    }
    let one = FunctionSpec::one();
    let y = cfg.y.unwrap_or(100);
    let mut ratios = String::from("y,u,support_plus,support_minus,ratio_plus,ratio_minus,envelope\n");
    for u in [2.0, 3.0, 4.0, 5.0] {
        let w = build_beta_sieve(y, u)?;
        let (rp, rm) = main_term_ratio(&w, &one)?;
        let env = 10.0 * (-u as f64).exp();
        let dev = (rp - 1.0).abs().max((rm - 1.0).abs());
        ratios.push_str(&format!(
            "{y},{},{},{},{},{},{}\n",
            fmt_f64(u),
            w.lambda_plus.len(),
            w.lambda_minus.len(),
            fmt_f64(rp),
            fmt_f64(rm),
            fmt_f64(env)
        ));
        checks.push(SuiteCheck::at_most(&format!("main_term_u{u}"), dev, env, format!("|ratio - 1| at y = {y}")));
    }
    Ok(SuiteReport { scenario: Scenario::SieveSuite, checks, tables: vec![("sandwich".into(), csv), ("main_term".into(), ratios)] })
}

/// Abscissa of the Plancherel comparison.
pub const PLANCHEREL_SIGMA: f64 = 1.5;

pub fn plancherel_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let scale = cfg.scale().min(1.0);
    let x = scaled(100_000.0, scale, 1000.0);
    let t_max = 200.0 * scale.max(0.05);
    let f = catalog_get(cfg.function.as_ref().unwrap_or(&FunctionSpec::liouville()))?;
    let mut checks = Vec::new();
    let mut csv = String::from("k,sigma,u_max,t_max,lhs,rhs,relative_gap,lhs_deficit,rhs_deficit\n");
    let mut tables = Vec::new();
    for k in [0u32, 1] {
        let p = plancherel_pair_with(&f, k, PLANCHEREL_SIGMA, (x as f64).ln(), t_max, crate::dirichlet::plancherel::DEFAULT_T_STEP)?;
        csv.push_str(&format!(
            "{k},{},{},{},{},{},{},{},{}\n",
            fmt_f64(PLANCHEREL_SIGMA),
            fmt_f64((x as f64).ln()),
            fmt_f64(t_max),
            fmt_f64(p.lhs),
            fmt_f64(p.rhs),
            fmt_f64(p.relative_gap),
            fmt_f64(p.lhs_deficit),
            fmt_f64(p.rhs_deficit)
        ));
        checks.push(SuiteCheck::at_most(&format!("plancherel_k{k}"), p.relative_gap, 0.05, format!("x = {x}, t_max = {t_max}")));
        tables.push((format!("plancherel_profile_k{k}"), p.to_csv()));
    }
    tables.insert(0, ("plancherel".into(), csv));
    let lam = catalog_get(&FunctionSpec::liouville())?;
    let rows = montgomery_check(&lam, x, 1.0, &[10.0, 100.0])?;
    let mut mcsv = String::from("t_max,a_mean_square,b_mean_square,ratio\n");
    for r in &rows {
        mcsv.push_str(&format!("{},{},{},{}\n", fmt_f64(r.t_max), fmt_f64(r.a_mean_square), fmt_f64(r.b_mean_square), fmt_f64(r.ratio)));
        checks.push(SuiteCheck::at_most(&format!("montgomery_T{}", r.t_max), r.ratio, 1.0, format!("N = {x}")));
    }
    tables.push(("montgomery".into(), mcsv));
    Ok(SuiteReport { scenario: Scenario::PlancherelSuite, checks, tables })
}

/// Truncation for `L_Q(1, lambda)`.
pub const LIOUVILLE_N: u64 = 10_000_000;

pub fn siegel_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    let scale = cfg.scale().min(1.0);
    let q = cfg.q.unwrap_or(50);
    let n_window = scaled(1_000_000.0, scale, 10_000.0);
    let n_liou = scaled(LIOUVILLE_N as f64, scale, 100_000.0);
    let chi = catalog_get(&FunctionSpec::kronecker(5))?;
    let prof = siegel_locate_with(&chi, q, crate::dirichlet::siegel::DEFAULT_C_WINDOW, 32, n_window)?;
    let band = prof.ratio_max / prof.ratio_min;
    let mut checks = vec![
        SuiteCheck::at_most("kronecker5_sign_changes", prof.beta_is_zero as u8 as f64, 0.0, format!("Q = {q}")),
        SuiteCheck::at_least(
            "kronecker5_ratio_positive",
            prof.ratio_min,
            f64::MIN_POSITIVE,
            "minimum of L/((sigma - beta) log Q)",
        ),
        SuiteCheck::at_most("kronecker5_ratio_band", band, 100.0, "max/min of the profile ratio"),
    ];
    let s1 = pretentious_scale_with(&chi, q, n_window)?;
    let s2 = pretentious_scale_with(&chi, q, 2 * n_window)?;
    checks.push(SuiteCheck::at_most(
        "kronecker5_scale_stability",
        (s1.log_q_prime / s2.log_q_prime - 1.0).abs(),
        0.1,
        "log Q' under x_proxy doubling",
    ));
    let lam = catalog_get(&FunctionSpec::liouville())?;
    let sl = pretentious_scale_with(&lam, q, n_liou)?;
    checks.push(SuiteCheck::at_most("liouville_L_Q_at_1", sl.l_value.norm(), 1e-3, format!("N = {n_liou}")));
    let mut scsv = String::from("function,q,log_q_prime,l_re,l_im,l_error,degenerate\n");
    for (name, s) in [("kronecker:d=5", &s1), ("liouville", &sl)] {
        scsv.push_str(&format!(
            "{name},{q},{},{},{},{},{}\n",
            fmt_f64(s.log_q_prime),
            fmt_f64(s.l_value.re),
            fmt_f64(s.l_value.im),
            fmt_f64(s.l_error),
            s.degenerate
        ));
    }
    Ok(SuiteReport {
        scenario: Scenario::SiegelSuite,
        checks,
        tables: vec![("siegel_profile".into(), prof.to_csv()), ("pretentious_scale".into(), scsv)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_small() {
        let w = distinct_prime_counts(30);
        assert_eq!(w[30], 3);
        assert_eq!(w[16], 1);
        assert_eq!(w[1], 0);
    }

    #[test]
    fn small_triangle_suite() {
        let mut cfg = ExperimentConfig::new(Scenario::DistanceSuite);
        cfg.scale = Some(0.05);
        let r = distance_suite(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }
}
