//! Criterion benchmarks for the estimator, the simulator and the Monte Carlo engine; see `benches/`.
