//! Analytic resource model: multiplexing, pair demand, binomial collection
//! statistics, and the two integer solvers.

mod binomial;
mod model;
mod sweep;

pub use binomial::{binomial_cdf, binomial_pmf, binomial_tail_geq};
pub use model::{
    attempts_budget, max_rate, min_attempts, min_ions, multiplexing_k, p_onepair, pairs_required,
    DeviceParams, EstimateResult, QueryTarget, SurgeryQuery,
};
pub use sweep::{
    log_space, min_ions_table, plateau_onset, rate_table, required_coupling, sweep_coupling,
    MinIonsRow, RateRow, SweepRow,
};
