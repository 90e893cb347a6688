//! Config-driven experiment runner: bound monitors, verification suites,
//! report emission and the command-line front end.

pub mod cli;
pub mod config;
pub mod monitors;
pub mod random;
pub mod report;
pub mod run;
pub mod suites;

pub use cli::{run_cli, run_cli_with};
pub use config::{ExperimentConfig, Scenario};
pub use monitors::{
    run_cor15_real, run_example11, run_halasz_monitor, run_thm12a_monitor, run_thm12b_monitor, run_thm16_power,
};
pub use random::random_function;
pub use report::{BoundReport, BoundRow, Outcome, SuiteCheck, SuiteReport, Verdict};
pub use run::{run_experiment, write_outcome};
pub use suites::{distance_suite, lambda_suite, plancherel_suite, siegel_suite, sieve_suite};

/// CSV number format: 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
