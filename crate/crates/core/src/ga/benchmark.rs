use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::RankedCircuit;
use crate::error::{Error, Result};
use crate::purification::{simulate, PurificationCircuit};
use crate::quantum::{stephenson_pair, NoiseModel};

/// Pair fidelity targeted by the surgery.
pub const F_IDEAL: f64 = 0.99;
/// Stricter fidelity threshold also reported in summaries.
pub const F_REQ: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub path: String,
    pub circuit: PurificationCircuit,
}

impl Candidate {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(Self {
            path: path.display().to_string(),
            circuit: PurificationCircuit::load(path)?,
        })
    }
}

/// Every `*.json` circuit in `dir`, sorted by file name.
pub fn load_candidates(dir: impl AsRef<Path>) -> Result<Vec<Candidate>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(Candidate::load).collect()
}

/// One row of the benchmark CSV: `n_pairs,success_probability,output_fidelity,circuit_path`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n_pairs: usize,
    pub success_probability: f64,
    pub output_fidelity: f64,
    pub circuit_path: String,
}

impl BenchmarkRow {
    pub fn meets_f_ideal(&self) -> bool {
        self.output_fidelity >= F_IDEAL
    }

    pub fn meets_f_req(&self) -> bool {
        self.output_fidelity >= F_REQ
    }
}

/// Re-simulates every candidate on aligned Stephenson pairs.
pub fn benchmark_sweep(candidates: &[Candidate], noise: &NoiseModel) -> Result<Vec<BenchmarkRow>> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate circuits".into()));
    }
    let input = stephenson_pair(true);
    candidates
        .par_iter()
        .map(|c| {
            let o = simulate(&c.circuit, &input, noise)?;
            Ok(BenchmarkRow {
                n_pairs: c.circuit.n_pairs,
                success_probability: o.success_probability,
                output_fidelity: o.output_fidelity,
                circuit_path: c.path.clone(),
            })
        })
        .collect()
}

/// Mean success probability per `n_pairs`, ascending in `n_pairs`.
pub fn mean_success_by_n(rows: &[BenchmarkRow]) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n_pairs).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let ps: Vec<f64> = rows
                .iter()
                .filter(|r| r.n_pairs == n)
                .map(|r| r.success_probability)
                .collect();
            (n, ps.iter().sum::<f64>() / ps.len() as f64)
        })
        .collect()
}

/// Highest-yield circuit among those at or above `min_fidelity`, after
/// re-simulating each on aligned Stephenson pairs.
pub fn select_high_yield(
    pool: &[RankedCircuit],
    min_fidelity: f64,
    noise: &NoiseModel,
) -> Result<Option<RankedCircuit>> {
    let input = stephenson_pair(true);
    let rescored: Vec<RankedCircuit> = pool
        .par_iter()
        .map(|r| {
            let outcome = simulate(&r.circuit, &input, noise)?;
            Ok(RankedCircuit {
                circuit: r.circuit.clone(),
                fitness: outcome.output_fidelity,
                outcome,
            })
        })
        .collect::<Result<_>>()?;
    Ok(rescored
        .into_iter()
        .filter(|r| r.outcome.output_fidelity >= min_fidelity)
        .max_by(|a, b| {
            a.outcome
                .success_probability
                .total_cmp(&b.outcome.success_probability)
                .then(b.circuit.ops.len().cmp(&a.circuit.ops.len()))
        }))
}
