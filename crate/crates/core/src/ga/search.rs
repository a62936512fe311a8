use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::genome::Genome;
use crate::error::{check_probability, Error, Result};
use crate::purification::{simulate, ProtocolOutcome, PurificationCircuit, MAX_PAIRS, MIN_PAIRS};
use crate::quantum::{stephenson_pair, BellDiagonalState, DensityMatrix, NoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub n_pairs: usize,
    pub seed: u64,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    /// Bilateral gate slots per genome.
    pub max_ops: usize,
    pub elite_fraction: f64,
    pub tournament_size: usize,
    /// Circuits accepting less often than this score 0.
    pub min_success_probability: f64,
    /// Distinct circuits kept in the archive.
    pub archive_size: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 150,
            n_pairs: 3,
            seed: 0,
            mutation_rate: 0.1,
            crossover_rate: 0.7,
            max_ops: 8,
            elite_fraction: 0.1,
            tournament_size: 3,
            min_success_probability: 0.01,
            archive_size: 500,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParameter(
                "population_size must be at least 2".into(),
            ));
        }
        if !(MIN_PAIRS..=MAX_PAIRS).contains(&self.n_pairs) {
            return Err(Error::InvalidParameter(format!(
                "n_pairs = {} outside {MIN_PAIRS}..={MAX_PAIRS}",
                self.n_pairs
            )));
        }
        if self.max_ops == 0 || self.tournament_size == 0 {
            return Err(Error::InvalidParameter(
                "max_ops and tournament_size must be positive".into(),
            ));
        }
        check_probability("mutation_rate", self.mutation_rate)?;
        check_probability("crossover_rate", self.crossover_rate)?;
        check_probability("elite_fraction", self.elite_fraction)?;
        check_probability("min_success_probability", self.min_success_probability)?;
        Ok(())
    }

    fn elite_count(&self) -> usize {
        ((self.elite_fraction * self.population_size as f64).ceil() as usize)
            .min(self.population_size)
    }
}

/// Raw pairs fed to every slot of the searched circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchInput {
    BellDiagonal(BellDiagonalState),
    /// The measured ion-ion pair, aligned to `phi+`.
    Stephenson,
    State(DensityMatrix),
}

impl SearchInput {
    pub fn state(&self) -> DensityMatrix {
        match self {
            SearchInput::BellDiagonal(b) => b.to_density(),
            SearchInput::Stephenson => stephenson_pair(true),
            SearchInput::State(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCircuit {
    pub circuit: PurificationCircuit,
    pub fitness: f64,
    pub outcome: ProtocolOutcome,
}

/// Output fidelity, or 0 when the circuit accepts less often than `floor`.
pub fn score(outcome: &ProtocolOutcome, floor: f64) -> f64 {
    if outcome.success_probability < floor {
        0.0
    } else {
        outcome.output_fidelity
    }
}

/// Fitness with the default yield floor of 0.01.
pub fn fitness(
    circuit: &PurificationCircuit,
    input: &DensityMatrix,
    noise: &NoiseModel,
) -> Result<f64> {
    let floor = GaConfig::default().min_success_probability;
    Ok(score(&simulate(circuit, input, noise)?, floor))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Final population, best first.
    pub ranked: Vec<RankedCircuit>,
    /// Best fitness after each generation (index 0 is the initial population).
    pub best_fitness: Vec<f64>,
    /// Best distinct circuits evaluated at any point, best first.
    pub archive: Vec<RankedCircuit>,
}

fn ranking(a: &RankedCircuit, b: &RankedCircuit) -> std::cmp::Ordering {
    b.fitness.total_cmp(&a.fitness).then(
        b.outcome
            .success_probability
            .total_cmp(&a.outcome.success_probability),
    )
}

struct Evaluator<'a> {
    input: &'a DensityMatrix,
    noise: &'a NoiseModel,
    floor: f64,
    cache: HashMap<PurificationCircuit, ProtocolOutcome>,
    /// First-seen order of cached circuits, for a deterministic archive.
    seen: Vec<PurificationCircuit>,
}

impl Evaluator<'_> {
    fn evaluate(&mut self, genomes: &[Genome]) -> Result<Vec<RankedCircuit>> {
        let circuits: Vec<PurificationCircuit> = genomes.iter().map(Genome::decode).collect();
        let mut fresh: Vec<&PurificationCircuit> = Vec::new();
        for c in &circuits {
            if !self.cache.contains_key(c) && !fresh.contains(&c) {
                fresh.push(c);
            }
        }
        let outcomes: Vec<Result<ProtocolOutcome>> = fresh
            .par_iter()
            .map(|c| simulate(c, self.input, self.noise))
            .collect();
        for (c, o) in fresh.into_iter().zip(outcomes) {
            self.cache.insert(c.clone(), o?);
            self.seen.push(c.clone());
        }
        Ok(circuits
            .into_iter()
            .map(|circuit| {
                let outcome = self.cache[&circuit].clone();
                RankedCircuit {
                    fitness: score(&outcome, self.floor),
                    circuit,
                    outcome,
                }
            })
            .collect())
    }

    fn archive(&self, size: usize) -> Vec<RankedCircuit> {
        let mut all: Vec<RankedCircuit> = self
            .seen
            .iter()
            .map(|c| {
                let outcome = self.cache[c].clone();
                RankedCircuit {
                    fitness: score(&outcome, self.floor),
                    circuit: c.clone(),
                    outcome,
                }
            })
            .collect();
        all.sort_by(ranking);
        all.truncate(size);
        all
    }
}

fn tournament<'g, R: Rng>(pop: &'g [(Genome, f64)], size: usize, rng: &mut R) -> &'g Genome {
    let mut best = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let c = rng.gen_range(0..pop.len());
        if pop[c].1 > pop[best].1 {
            best = c;
        }
    }
    &pop[best].0
}

/// Stream of child `i` of generation `g`; generation 0 seeds the initial population.
fn child_rng(seed: u64, generation: usize, child: usize, pop: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((generation * pop + child) as u64);
    rng
}

/// Generational GA with elitism and tournament selection. Deterministic for a
/// fixed config: every child draws from its own stream and evaluation order
/// does not affect results.
pub fn search_detailed(
    config: &GaConfig,
    input: &SearchInput,
    noise: &NoiseModel,
) -> Result<SearchReport> {
    config.validate()?;
    noise.validate()?;
    let state = input.state();
    let mut eval = Evaluator {
        input: &state,
        noise,
        floor: config.min_success_probability,
        cache: HashMap::new(),
        seen: Vec::new(),
    };
    let pop_size = config.population_size;
    let genomes: Vec<Genome> = (0..pop_size)
        .map(|i| {
            let mut rng = child_rng(config.seed, 0, i, pop_size);
            Genome::random(&mut rng, config.n_pairs, config.max_ops)
        })
        .collect();
    let mut ranked = eval.evaluate(&genomes)?;
    let mut population: Vec<(Genome, f64)> = genomes
        .into_iter()
        .zip(ranked.iter().map(|r| r.fitness))
        .collect();
    let mut best_fitness = vec![ranked.iter().map(|r| r.fitness).fold(0.0, f64::max)];

    let elites = config.elite_count();
    for g in 1..=config.generations {
        let mut order: Vec<usize> = (0..pop_size).collect();
        order.sort_by(|&a, &b| ranking(&ranked[a], &ranked[b]));
        let mut next: Vec<Genome> = order[..elites]
            .iter()
            .map(|&i| population[i].0.clone())
            .collect();
        let mut child = 0;
        while next.len() < pop_size {
            let mut rng = child_rng(config.seed, g, child, pop_size);
            child += 1;
            let a = tournament(&population, config.tournament_size, &mut rng);
            let b = tournament(&population, config.tournament_size, &mut rng);
            let (mut x, mut y) = if rng.gen_bool(config.crossover_rate) {
                a.crossover(b, &mut rng)
            } else {
                (a.clone(), b.clone())
            };
            x.mutate(config.mutation_rate, &mut rng);
            y.mutate(config.mutation_rate, &mut rng);
            next.push(x);
            if next.len() < pop_size {
                next.push(y);
            }
        }
        ranked = eval.evaluate(&next)?;
        population = next
            .into_iter()
            .zip(ranked.iter().map(|r| r.fitness))
            .collect();
        best_fitness.push(ranked.iter().map(|r| r.fitness).fold(0.0, f64::max));
    }
    ranked.sort_by(ranking);
    Ok(SearchReport {
        ranked,
        best_fitness,
        archive: eval.archive(config.archive_size),
    })
}

/// Final population in descending fitness.
pub fn search(
    config: &GaConfig,
    input: &SearchInput,
    noise: &NoiseModel,
) -> Result<Vec<RankedCircuit>> {
    search_detailed(config, input, noise).map(|r| r.ranked)
}
