//! Dirichlet series of completely multiplicative functions: truncated
//! `L_y`, the constant `gamma_{s,y}`, `Lambda_k`, log-derivative identities,
//! mean-square norms and the real-zero locator.

pub mod checks;
pub mod comb;
pub mod gamma;
pub mod lambda_k;
pub mod plancherel;
pub mod series;
pub mod siegel;

pub use checks::{default_envelope_grid, euler_product_check, lemma_envelope, EnvelopeReport, EnvelopeRow, EulerCheck};
pub use comb::{coefficient, comb_log_derivative, der_ratio, der_ratio_check, partitions};
pub use gamma::{zeta_y_gamma, GammaEstimate};
pub use lambda_k::{
    chebyshev_monitor, lambda_k_oracle, lambda_k_table, lambda_k_tables, largest_prime_factor_table, mobius_table,
    relative_deviation, ChebyshevRow, LambdaTable,
};
pub use plancherel::{
    i_k_norm, i_k_norm_with, montgomery_check, plancherel_pair, plancherel_pair_with, IkNorm, MontgomeryRow,
    PlancherelPair,
};
pub use series::{
    euler_factor, l_continued, l_y_derivative, l_y_derivative_with, l_y_derivatives_with, tail_majorant,
    ContinuedEvaluation, RoughTerms, SeriesEvaluation,
};
pub use siegel::{
    pretentious_scale, pretentious_scale_with, siegel_locate, siegel_locate_with, PretentiousScale, ScaleMethod,
    SiegelProfile, SiegelSample,
};
