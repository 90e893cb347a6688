//! Acceptance checks. Prints one `PASS` or `FAIL` line per criterion and
//! exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pretentious::arith::CmStream;
use pretentious::dirichlet::{comb_log_derivative, der_ratio_check, default_envelope_grid, lemma_envelope};
use pretentious::harness::{
    distance_suite, lambda_suite, plancherel_suite, run_cli_with, run_example11, run_halasz_monitor, siegel_suite,
    sieve_suite, ExperimentConfig, Scenario, SuiteReport,
};
use pretentious::sums::{log_grid, partial_sum, SumRequest};
use pretentious::{catalog_get, FunctionSpec};

/// `S_0(10^6; lambda)`, frozen from [`liouville_oracle`].
const LIOUVILLE_S0_1E6: i64 = -530;

struct Criterion {
    passed: bool,
    detail: String,
}

impl Criterion {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

fn suite_detail(r: &SuiteReport) -> String {
    r.checks
        .iter()
        .map(|c| format!("{}={:.3e}/{:.3e}{}", c.name, c.value, c.limit, if c.passed { "" } else { "!" }))
        .collect::<Vec<_>>()
        .join(" ")
}

fn within(elapsed: Duration, secs: u64) -> bool {
    elapsed <= Duration::from_secs(secs)
}

fn c1_triangle() -> Criterion {
    let t = Instant::now();
    let r = distance_suite(&ExperimentConfig::new(Scenario::DistanceSuite)).unwrap();
    let el = t.elapsed();
    Criterion::new(r.passed() && within(el, 120), format!("{} in {el:.1?}", suite_detail(&r)))
}

fn c2_lambda() -> Criterion {
    let t = Instant::now();
    let r = lambda_suite(&ExperimentConfig::new(Scenario::LambdaSuite)).unwrap();
    let el = t.elapsed();
    let dev = r.check("oracle_max_relative_deviation").map_or(f64::INFINITY, |c| c.value);
    let support = r.check("support_violations").map_or(f64::INFINITY, |c| c.value);
    let ok = r.passed() && dev <= 1e-9 && support == 0.0 && within(el, 60);
    Criterion::new(ok, format!("{} in {el:.1?}", suite_detail(&r)))
}

fn c3_sieve() -> Criterion {
    let t = Instant::now();
    let r = sieve_suite(&ExperimentConfig::new(Scenario::SieveSuite)).unwrap();
    let el = t.elapsed();
    let mut ok = r.passed() && within(el, 180);
    for u in 2..=5 {
        match r.check(&format!("main_term_u{u}")) {
            Some(c) => ok &= c.value <= 10.0 * (-(u as f64)).exp(),
            None => ok = false,
        }
    }
    ok &= r.checks.iter().filter(|c| c.name.starts_with("sandwich_")).count() == 3;
    Criterion::new(ok, format!("{} in {el:.1?}", suite_detail(&r)))
}

/// `F(s) = 1 + sum_j (a_j + b_j s) n_j^{-s}` with closed-form derivatives.
struct PolyExp {
    terms: Vec<(f64, Complex64, Complex64)>,
}

impl PolyExp {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        let count = rng.gen_range(1..=6);
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let n: u32 = rng.gen_range(2..=30);
            let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.4;
            let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.1;
            terms.push(((n as f64).ln(), a, b));
        }
        Self { terms }
    }

    /// `F^{(m)}(s)`.
    fn deriv(&self, s: Complex64, m: u32) -> Complex64 {
        let mut v = if m == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
        for &(ln, a, b) in &self.terms {
            let e = (-s * ln).exp();
            let c = Complex64::new(-ln, 0.0);
            v += (a + b * s) * c.powu(m) * e;
            if m > 0 {
                v += b * m as f64 * c.powu(m - 1) * e;
            }
        }
        v
    }
}

/// `(-F'/F)^{(m)}(s)` by the trapezoid rule on a circle of radius `r`.
fn cauchy_derivative(g: impl Fn(Complex64) -> Complex64, s: Complex64, m: u32, r: f64, points: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..points {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / points as f64);
        acc += g(s + w * r) / w.powu(m);
    }
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    acc * fact / (points as f64 * r.powi(m as i32))
}

fn c4_comb() -> Criterion {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut draws, mut sandwich_fail) = (0.0f64, 0, 0);
    while draws < 100 {
        let f = PolyExp::random(&mut rng);
        let s = Complex64::new(rng.gen_range(1.0..3.0), rng.gen_range(-10.0..10.0));
        // Keep F away from zero on the contour so the circle integral converges.
        let r = 0.2;
        let near_zero = (0..64).any(|j| f.deriv(s + Complex64::from_polar(2.0 * r, j as f64 * PI / 32.0), 0).norm() < 0.2)
            || f.deriv(s, 0).norm() < 0.2;
        if near_zero {
            continue;
        }
        draws += 1;
        let derivs: Vec<Complex64> = (0..=5).map(|m| f.deriv(s, m)).collect();
        let neg_log_der = |z: Complex64| -f.deriv(z, 1) / f.deriv(z, 0);
        for k in 1..=5usize {
            let got = comb_log_derivative(&derivs[..=k]).unwrap();
            let want = cauchy_derivative(neg_log_der, s, k as u32 - 1, r, 128);
            worst = worst.max((got - want).norm() / want.norm().max(1e-12));
        }
        if der_ratio_check(&derivs).is_err() {
            sandwich_fail += 1;
        }
    }
    let el = t.elapsed();
    let ok = worst <= 1e-5 && sandwich_fail == 0 && within(el, 30);
    Criterion::new(ok, format!("draws={draws} max_rel={worst:.3e} sandwich_failures={sandwich_fail} in {el:.1?}"))
}

fn c5_plancherel() -> Criterion {
    let t = Instant::now();
    let r = plancherel_suite(&ExperimentConfig::new(Scenario::PlancherelSuite)).unwrap();
    let el = t.elapsed();
    let ok = ["plancherel_k0", "plancherel_k1"].iter().all(|n| r.check(n).is_some_and(|c| c.passed && c.limit == 0.05))
        && within(el, 300);
    Criterion::new(ok, format!("{} in {el:.1?}", suite_detail(&r)))
}

fn c6_envelope() -> Criterion {
    let t = Instant::now();
    let specs = [
        FunctionSpec::one(),
        FunctionSpec::liouville(),
        FunctionSpec::kronecker(-3),
        FunctionSpec::archimedean(2.0),
        FunctionSpec::power_omega(0.5),
    ];
    let fs: Vec<_> = specs.iter().map(|s| catalog_get(s).unwrap()).collect();
    let (xs, ts) = default_envelope_grid();
    let r = lemma_envelope(&fs, 2, &xs, &ts, 3.0).unwrap();
    let el = t.elapsed();
    let ok = r.violations == 0 && r.rows.len() == 500 && *xs.last().unwrap() <= 1_000_000 && within(el, 300);
    Criterion::new(ok, format!("rows={} max_deviation={:.3e} violations={} in {el:.1?}", r.rows.len(), r.max_deviation, r.violations))
}

fn c7_example11() -> Criterion {
    let t = Instant::now();
    let y = 1000;
    let mut cfg = ExperimentConfig::new(Scenario::Example11Extremal);
    cfg.y = Some(y);
    cfg.x_grid = Some((3 * y / 2 + 1..=2 * y).collect());
    let r = run_example11(&cfg).unwrap();
    let el = t.elapsed();
    let (lo, hi) = (r.notes["band_min"], r.notes["band_max"]);
    let ok = r.rows.len() == 500 && r.notes["count_mismatches"] == 0.0 && lo >= 0.1 && hi <= 10.0 && within(el, 10);
    Criterion::new(ok, format!("points={} band=[{lo:.3}, {hi:.3}] count_mismatches={} in {el:.1?}", r.rows.len(), r.notes["count_mismatches"]))
}

/// `sum_{n <= x} (-1)^{Omega(n)}` from an Omega sieve over prime powers.
fn liouville_oracle(x: usize) -> i64 {
    let mut composite = vec![false; x + 1];
    let mut omega = vec![0u8; x + 1];
    for p in 2..=x {
        if composite[p] {
            continue;
        }
        for m in (p * p..=x).step_by(p) {
            composite[m] = true;
        }
        let mut q = p;
        while q <= x {
            for m in (q..=x).step_by(q) {
                omega[m] += 1;
            }
            q = match q.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    omega[1..].iter().map(|&w| if w % 2 == 0 { 1 } else { -1 }).sum()
}

fn c8_liouville() -> Criterion {
    let t = Instant::now();
    let oracle = liouville_oracle(1_000_000);
    let lib = partial_sum(&SumRequest::new(FunctionSpec::liouville(), 1_000_000)).unwrap().value;
    let mut cfg = ExperimentConfig::new(Scenario::HalaszBound);
    cfg.function = Some(FunctionSpec::liouville());
    cfg.t = Some(10.0);
    cfg.x_grid = Some(log_grid(10_000, 10_000_000, 8));
    let h = run_halasz_monitor(&cfg).unwrap();
    let el = t.elapsed();
    let x_max = h.rows.iter().map(|r| r.x).fold(0.0, f64::max);
    let ok = oracle == LIOUVILLE_S0_1E6
        && lib.re == oracle as f64
        && lib.im == 0.0
        && h.max_ratio <= 20.0
        && x_max == 1e7
        && within(el, 240);
    Criterion::new(ok, format!("oracle={oracle} library={} halasz_max_ratio={:.3e} in {el:.1?}", lib.re, h.max_ratio))
}

fn c9_siegel() -> Criterion {
    let t = Instant::now();
    let r = siegel_suite(&ExperimentConfig::new(Scenario::SiegelSuite)).unwrap();
    let el = t.elapsed();
    let needed = ["kronecker5_sign_changes", "kronecker5_ratio_band", "liouville_L_Q_at_1"];
    let ok = r.passed() && needed.iter().all(|n| r.check(n).is_some()) && within(el, 180);
    Criterion::new(ok, format!("{} in {el:.1?}", suite_detail(&r)))
}

fn c10_throughput() -> Criterion {
    let f = catalog_get(&FunctionSpec::liouville()).unwrap();
    let n: u64 = 50_000_000;
    let t = Instant::now();
    let stream = CmStream::new(&f, n).unwrap();
    let mut sum = 0.0f64;
    let mut count = 0u64;
    stream.for_each_segment(1, n, |seg| {
        count += seg.len() as u64;
        sum += seg.values.iter().map(|z| z.re).sum::<f64>();
    });
    let el = t.elapsed();
    let rate = count as f64 / el.as_secs_f64();
    Criterion::new(count == n && rate >= 1e7 && sum.is_finite(), format!("{count} integers in {el:.2?}: {rate:.3e}/s, sum={sum}"))
}

fn verify_csvs(scenario: &str, threads: usize, extra: &[&str]) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap().to_string();
    let threads = threads.to_string();
    let mut argv = vec!["pretentious", "verify", "--scenario", scenario, "--threads", &threads, "--out", &out];
    argv.extend_from_slice(extra);
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = run_cli_with(argv, &mut so, &mut se);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&se));
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c11_determinism() -> Criterion {
    let t = Instant::now();
    let runs: [(&str, &[&str]); 3] = [
        ("distance_suite", &["--scale", "0.25"]),
        ("halasz_bound", &["--function", "liouville", "--x-grid", "10000,100000,1000000"]),
        ("lambda_suite", &[]),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (scenario, extra) in runs {
        let one = verify_csvs(scenario, 1, extra);
        let eight = verify_csvs(scenario, 8, extra);
        let again = verify_csvs(scenario, 8, extra);
        let same = !one.is_empty() && one == eight && eight == again;
        ok &= same;
        details.push(format!("{scenario}: {} files {}", one.len(), if same { "identical" } else { "DIFFER" }));
    }
    details.push(format!("in {:.1?}", t.elapsed()));
    Criterion::new(ok, details.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Criterion); 11] = [
        ("triangle inequality suite", c1_triangle),
        ("generalized von Mangoldt oracle", c2_lambda),
        ("fundamental-lemma sandwich", c3_sieve),
        ("log-derivative identity", c4_comb),
        ("Plancherel cross-check", c5_plancherel),
        ("Euler-product envelope", c6_envelope),
        ("interval-indicator extremality", c7_example11),
        ("Liouville desk numbers", c8_liouville),
        ("real-zero suite", c9_siegel),
        ("streaming throughput", c10_throughput),
        ("thread-count determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        println!("{} {:>2} {name}: {}", if c.passed { "PASS" } else { "FAIL" }, i + 1, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
