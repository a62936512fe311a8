//! Genetic search over `n -> 1` purification circuits and the benchmark sweep
//! of the candidates it finds.

mod benchmark;
mod genome;
mod search;

pub use benchmark::{
    benchmark_sweep, load_candidates, mean_success_by_n, select_high_yield, BenchmarkRow,
    Candidate, F_IDEAL, F_REQ,
};
pub use genome::{record_label, GateGene, Genome, MeasureGene};
pub use search::{
    fitness, score, search, search_detailed, GaConfig, RankedCircuit, SearchInput, SearchReport,
};
