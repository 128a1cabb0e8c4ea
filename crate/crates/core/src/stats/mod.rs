//! Poisson baselines and the counting problems behind the almost-all-α
//! statements.

mod counting;
mod poisson;
mod report;

pub use counting::{
    distinct_moduli, ford_constant, ford_exponent_report, mult_table_distinct, mult_table_distinct_bounded,
    quadruple_count, quadruple_holds, FordReport, FordRow, QuadrupleCount, QuadrupleWindow, MULT_TABLE_BOUND,
    QUADRUPLE_MAX_M, QUADRUPLE_WITNESSES,
};
pub use poisson::{
    devroye_frequencies, exact_min_gap_cdf, ks_distance, limit_cdf, limit_median, poisson_min_gap, quantile,
    trial_gaps, DevroyeRow, PoissonDistribution, PoissonExperiment, Quantile, Summary, QUANTILE_LEVELS,
};
pub use report::{billiard_vs_poisson_report, propagation_check, BilliardReport, PropagationCheck, ReportRow};
