//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};
use num_complex::Complex64;

use super::config::{ExperimentConfig, Scenario};
use super::fmt_f64;
use super::run::{run_experiment, write_outcome};
use crate::arith::SpfTable;
use crate::catalog::{catalog_get, FunctionSpec};
use crate::dirichlet::{l_continued, l_y_derivative_with, lambda_k_table};
use crate::distance::{default_step, distance_sq_with, halasz_m_with};
use crate::error::{Error, Result};
use crate::sieve_weights::{build_beta_sieve, main_term_ratio, sandwich_scan};
use crate::sums::{partial_sum_with, SumRequest, Weight};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "pretentious", version, about = "Numerical laboratory for completely multiplicative functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smallest-prime-factor table over [lo, hi].
    Sieve {
        #[arg(long, default_value_t = 1)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Integers to factor.
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        /// Write `n,spf` for the whole range to this CSV file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partial sum of f(n) (log n)^k over n <= x.
    Sum {
        #[arg(long)]
        function: String,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 0)]
        k: u32,
        /// Restrict to n with smallest prime factor > y.
        #[arg(long)]
        y: Option<u64>,
        #[arg(long)]
        prime_only: bool,
        /// unit, log_p or von_mangoldt.
        #[arg(long, default_value = "unit")]
        weight: String,
    },
    /// Distance D^2(f, g; y, x), or the Halász functional with --halasz.
    Distance {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: Option<String>,
        #[arg(long, default_value_t = 1)]
        y: u64,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        halasz: bool,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
    },
    /// Truncated L_y^{(k)}(sigma + it, f).
    Lseries {
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 1)]
        y: u64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        /// Smoothed evaluation valid for sigma <= 1 (real sigma only).
        #[arg(long)]
        continued: bool,
    },
    /// Generalized von Mangoldt values Lambda_k(n).
    Lambda {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        limit: u64,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
    },
    /// Beta-sieve weights: support, main-term ratios and an optional sandwich scan.
    Weights {
        #[arg(long)]
        y: u64,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        scan: Option<u64>,
    },
    /// Run a scenario from a config file or inline flags.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    function: Option<String>,
    #[arg(long = "q", visible_alias = "Q")]
    q: Option<u64>,
    #[arg(long = "a", visible_alias = "A")]
    a: Option<f64>,
    #[arg(long = "t", visible_alias = "T")]
    t: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    x_grid: Option<Vec<u64>>,
    #[arg(long)]
    y: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    scale: Option<f64>,
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(out, "{}", e.render()) } else { write!(err, "{}", e.render()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "error: {e}");
            if code == EXIT_USAGE {
                let _ = writeln!(err, "{}", Cli::command().render_help());
            }
            code
        }
    }
}

/// Exit code for an error: 64 usage, 2 unmet hypothesis, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        Error::HypothesisUnmet(_) => EXIT_HYPOTHESIS,
        _ => EXIT_INTERNAL,
    }
}

fn function(s: &str) -> Result<crate::arith::PrimeAssignment> {
    let spec = FunctionSpec::parse(s).map_err(|e| Error::Usage(format!("bad function `{s}`: {e}")))?;
    catalog_get(&spec)
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Sieve { lo, hi, n, out: path } => {
            let t = SpfTable::build(lo, hi)?;
            let mut primes = 0u64;
            for m in lo..=hi {
                if t.is_prime(m) == Some(true) {
                    primes += 1;
                }
            }
            writeln!(out, "range [{lo}, {hi}]: {primes} primes").map_err(io)?;
            for m in n {
                let fac = t.factorize(m)?;
                let parts: Vec<String> = fac.pairs.iter().map(|(p, e)| format!("{p}^{e}")).collect();
                writeln!(out, "{m} = {} (Omega = {})", if parts.is_empty() { "1".into() } else { parts.join(" * ") }, fac.big_omega())
                    .map_err(io)?;
            }
            if let Some(p) = path {
                let mut body = String::from("n,spf\n");
                for m in lo..=hi {
                    body.push_str(&format!("{m},{}\n", t.spf(m).unwrap_or(0)));
                }
                std::fs::write(p, body)?;
            }
        }
        Command::Sum { function: fs, x, k, y, prime_only, weight } => {
            let spec = FunctionSpec::parse(&fs).map_err(|e| Error::Usage(format!("bad function `{fs}`: {e}")))?;
            let f = catalog_get(&spec)?;
            let weight = match weight.as_str() {
                "unit" => Weight::Unit,
                "log_p" => Weight::LogP,
                "von_mangoldt" => Weight::VonMangoldt,
                other => return Err(Error::Usage(format!("unknown weight `{other}`"))),
            };
            let mut req = SumRequest::new(spec, x);
            req.k = k;
            req.y = y;
            req.prime_only = prime_only;
            req.weight = weight;
            let r = partial_sum_with(&f, &req)?;
            writeln!(out, "{},{},{}", fmt_f64(r.value.re), fmt_f64(r.value.im), r.terms).map_err(io)?;
        }
        Command::Distance { f, g, y, x, halasz, t_max } => {
            let fa = function(&f)?;
            if halasz {
                let m = halasz_m_with(&fa, x, t_max, default_step(x))?;
                write!(out, "{}", m.to_csv()).map_err(io)?;
            } else {
                let g = g.ok_or_else(|| Error::Usage("distance needs --g or --halasz".into()))?;
                let d = distance_sq_with(&fa, &function(&g)?, y, x)?;
                writeln!(out, "{},{}", fmt_f64(d.value), d.primes_used).map_err(io)?;
            }
        }
        Command::Lseries { function: fs, y, sigma, t, k, n, continued } => {
            let f = function(&fs)?;
            if continued {
                if t != 0.0 || k != 0 {
                    return Err(Error::Usage("--continued evaluates L_y(sigma) only".into()));
                }
                let e = l_continued(&f, y, sigma, n)?;
                writeln!(out, "{},{},{},{}", fmt_f64(e.value.re), fmt_f64(e.value.im), fmt_f64(e.error), e.converged)
                    .map_err(io)?;
            } else {
                let e = l_y_derivative_with(&f, y, Complex64::new(sigma, t), k, n)?;
                writeln!(out, "{},{},{}", fmt_f64(e.value.re), fmt_f64(e.value.im), fmt_f64(e.tail_bound)).map_err(io)?;
            }
        }
        Command::Lambda { k, limit, n } => {
            let t = lambda_k_table(k, limit)?;
            let query: Vec<u64> = if n.is_empty() { (1..=limit.min(30)).collect() } else { n };
            writeln!(out, "n,lambda_k").map_err(io)?;
            for m in query {
                if m == 0 || m > limit {
                    return Err(Error::Usage(format!("n = {m} is outside [1, {limit}]")));
                }
                writeln!(out, "{m},{}", fmt_f64(t.get(m))).map_err(io)?;
            }
        }
        Command::Weights { y, u, scan } => {
            let w = build_beta_sieve(y, u)?;
            let (rp, rm) = main_term_ratio(&w, &FunctionSpec::one())?;
            writeln!(out, "support_plus,{}", w.lambda_plus.len()).map_err(io)?;
            writeln!(out, "support_minus,{}", w.lambda_minus.len()).map_err(io)?;
            writeln!(out, "ratio_plus,{}", fmt_f64(rp)).map_err(io)?;
            writeln!(out, "ratio_minus,{}", fmt_f64(rm)).map_err(io)?;
            if let Some(x) = scan {
                let r = sandwich_scan(&w, x)?;
                writeln!(out, "violations,{}", r.violations).map_err(io)?;
            }
        }
        Command::Verify(v) => {
            let cfg = verify_config(v)?;
            let outcome = run_experiment(&cfg)?;
            let files = write_outcome(&outcome, &cfg.output_dir())?;
            writeln!(out, "{}", outcome.summary_line()).map_err(io)?;
            for f in files {
                writeln!(out, "wrote {}", f.display()).map_err(io)?;
            }
        }
    }
    Ok(())
}

fn verify_config(v: VerifyArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&v.config, &v.scenario) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(s)) => ExperimentConfig::new(s.parse::<Scenario>()?),
        (None, None) => return Err(Error::Usage("verify needs --scenario or --config".into())),
    };
    if let (Some(_), Some(s)) = (&v.config, &v.scenario) {
        cfg.scenario = s.parse()?;
    }
    if let Some(f) = v.function {
        cfg.function = Some(FunctionSpec::parse(&f).map_err(|e| Error::Usage(format!("bad function `{f}`: {e}")))?);
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if v.$field.is_some() { cfg.$field = v.$field; } )* };
    }
    set!(q, a, t, t0, x_grid, y, k, seed, threshold, threads, scale);
    if v.out.is_some() {
        cfg.output_dir = v.out;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let argv: Vec<String> = std::iter::once("pretentious").chain(args.iter().copied()).map(String::from).collect();
        let code = run_cli_with(argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["verify", "--scenario", "thm12a_bound", "--function", "liouville"]).0, EXIT_USAGE);
        assert_eq!(run(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run(&["verify"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn sum_and_lambda() {
        let (c, o, _) = run(&["sum", "--function", "liouville", "--x", "100"]);
        assert_eq!(c, 0);
        assert!(o.starts_with(&fmt_f64(-2.0)), "{o}");
        let (c, o, _) = run(&["lambda", "--k", "1", "--limit", "10", "--n", "8"]);
        assert_eq!(c, 0);
        assert!(o.contains(&fmt_f64(2f64.ln())));
    }
}
