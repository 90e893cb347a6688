use std::fs;

use pretentious::harness::cli::{EXIT_HYPOTHESIS, EXIT_OK, EXIT_USAGE};
use pretentious::harness::{fmt_f64, run_cli_with, run_experiment, ExperimentConfig, Outcome, Scenario, Verdict};
use pretentious::sums::{partial_sum, SumRequest};
use pretentious::FunctionSpec;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut o = Vec::new();
    let mut e = Vec::new();
    let argv: Vec<String> = std::iter::once("pretentious").chain(args.iter().copied()).map(String::from).collect();
    let code = run_cli_with(argv, &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

/// Every numeric CSV field must be `{:.16e}` and parse back to itself.
fn assert_canonical(csv: &str) {
    for line in csv.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap_or_else(|_| panic!("`{field}` in `{line}`"));
            assert_eq!(fmt_f64(v), field);
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(run(&[]).0, EXIT_USAGE);
    assert_eq!(run(&["sum", "--function", "liouville"]).0, EXIT_USAGE);
    assert_eq!(run(&["sum", "--function", "kronecker:d", "--x", "10"]).0, EXIT_USAGE);
    assert_eq!(run(&["sum", "--function", "power_omega:v=1", "--x", "10", "--weight", "mystery"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--scenario", "no_such_scenario"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--scenario", "thm12b_zero", "--function", "liouville", "--q", "10", "--a", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["verify", "--scenario", "halasz_bound", "--function", "power_omega:v=1", "--t", "0.5"]).0, EXIT_USAGE);
    let (code, _, err) = run(&["lambda", "--k", "1", "--limit", "10", "--n", "11"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("outside"));
}

#[test]
fn small_modulus_fails_the_power_hypothesis() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = run(&["verify", "--scenario", "thm16_power", "--function", "liouville", "--q", "10", "--out", out]);
    assert_eq!(code, EXIT_HYPOTHESIS, "{err}");
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn subcommands_agree_with_the_library() {
    let (code, out, _) = run(&["sum", "--function", "liouville", "--x", "1000000"]);
    assert_eq!(code, EXIT_OK);
    let want = partial_sum(&SumRequest::new(FunctionSpec::liouville(), 1_000_000)).unwrap();
    assert_eq!(out.trim(), format!("{},{},{}", fmt_f64(want.value.re), fmt_f64(want.value.im), want.terms));

    let (_, out, _) = run(&["sieve", "--hi", "100", "--n", "12,97,1"]);
    assert_eq!(out, "range [1, 100]: 25 primes\n12 = 2^2 * 3^1 (Omega = 3)\n97 = 97^1 (Omega = 1)\n1 = 1 (Omega = 0)\n");

    let (_, out, _) = run(&["lambda", "--k", "2", "--limit", "100", "--n", "9,30"]);
    assert_eq!(out, format!("n,lambda_k\n9,{}\n30,{}\n", fmt_f64(3.0 * 3f64.ln().powi(2)), fmt_f64(0.0)));

    let (_, out, _) = run(&["distance", "--f", "liouville", "--g", "liouville", "--x", "1000"]);
    assert_eq!(out, format!("{},168\n", fmt_f64(0.0)));

    let (code, out, _) = run(&["lseries", "--function", "power_omega:v=1", "--sigma", "2", "--n", "100000"]);
    assert_eq!(code, EXIT_OK);
    let re: f64 = out.split(',').next().unwrap().parse().unwrap();
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-4);

    let (code, out, _) = run(&["weights", "--y", "5", "--u", "2", "--scan", "5000"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("violations,0\n"), "{out}");
}

#[test]
fn verify_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("halasz");
    let (code, stdout, err) = run(&[
        "verify",
        "--scenario",
        "halasz_bound",
        "--function",
        "kronecker:d=5",
        "--x-grid",
        "10000,100000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(stdout.starts_with("halasz_bound: 2 rows"), "{stdout}");
    let csv = fs::read_to_string(out.join("halasz_bound.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,lhs,rhs,ratio"));
    assert_eq!(csv.lines().count(), 3);
    assert_canonical(&csv);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("halasz_bound.json")).unwrap()).unwrap();
    assert_eq!(json["kind"], "bound");
    assert_eq!(json["scenario"], "halasz_bound");
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    let cfg = format!(
        r#"{{"scenario":"halasz_bound","function":{{"name":"liouville"}},"x_grid":[20000],"T":5,"output_dir":{:?}}}"#,
        out.to_str().unwrap()
    );
    fs::write(&path, cfg).unwrap();
    let parsed = ExperimentConfig::load(&path).unwrap();
    assert_eq!((parsed.t, parsed.x_grid.clone()), (Some(5.0), Some(vec![20_000])));
    assert_eq!(ExperimentConfig::from_json(&parsed.to_json()).unwrap(), parsed);

    let (code, _, err) = run(&["verify", "--config", path.to_str().unwrap(), "--x-grid", "20000,40000"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let csv = fs::read_to_string(out.join("halasz_bound.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    fs::write(&path, r#"{"scenario":"halasz_bound","unknown":true}"#).unwrap();
    assert_eq!(run(&["verify", "--config", path.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn constant_function_violates_the_mean_value_bound() {
    let mut cfg = ExperimentConfig::new(Scenario::HalaszBound);
    cfg.function = Some(FunctionSpec::one());
    cfg.x_grid = Some(vec![10_000, 50_000]);
    cfg.t = Some(1.0);
    cfg.threshold = Some(0.4);
    let Outcome::Bound(b) = run_experiment(&cfg).unwrap() else { panic!("bound expected") };
    // S(x) = x and M = 0 at t = 0, so the bound is (0 + 1) e^0 + 1/T = 2.
    assert!(b.rows.iter().all(|r| (r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 2.0).abs() < 1e-9));
    assert!((b.max_ratio - 0.5).abs() < 1e-9);
    assert_eq!(b.verdict, Verdict::Violated);
}
