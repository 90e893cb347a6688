//! Scenario dispatch and output writing.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, Scenario};
use super::monitors::*;
use super::report::Outcome;
use super::suites::*;
use crate::error::{Error, Result};

/// Validates the config, then runs the scenario on a pool with the
/// configured thread count (the global pool when unset).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let go = || dispatch(cfg);
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::arg(format!("thread pool: {e}")))?
            .install(go),
        None => go(),
    }
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Outcome> {
    use Scenario::*;
    Ok(match cfg.scenario {
        HalaszBound => Outcome::Bound(run_halasz_monitor(cfg)?),
        Thm12aBound => Outcome::Bound(run_thm12a_monitor(cfg)?),
        Thm12bZero => Outcome::Bound(run_thm12b_monitor(cfg)?),
        Cor15Real => Outcome::Bound(run_cor15_real(cfg)?),
        Thm16Power => Outcome::Bound(run_thm16_power(cfg)?),
        Example11Extremal => Outcome::Bound(run_example11(cfg)?),
        DistanceSuite => Outcome::Suite(distance_suite(cfg)?),
        LambdaSuite => Outcome::Suite(lambda_suite(cfg)?),
        SieveSuite => Outcome::Suite(sieve_suite(cfg)?),
        PlancherelSuite => Outcome::Suite(plancherel_suite(cfg)?),
        SiegelSuite => Outcome::Suite(siegel_suite(cfg)?),
    })
}

/// Writes every CSV table and a `<scenario>.json` summary into `dir`.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, body) in outcome.csv_files() {
        let p = dir.join(name);
        fs::write(&p, body)?;
        written.push(p);
    }
    let p = dir.join(format!("{}.json", outcome.scenario()));
    fs::write(&p, outcome.to_json() + "\n")?;
    written.push(p);
    Ok(written)
}
