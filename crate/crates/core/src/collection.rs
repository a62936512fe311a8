//! Seeded Monte Carlo of entanglement collection: every still-vacant ion is
//! pulsed once per round and retires after its first success.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::resource::{binomial_tail_geq, p_onepair};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Draw each ion's first-success round directly (geometric law).
    #[default]
    FirstSuccess,
    /// Pulse vacant ions round by round.
    RoundByRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub n_ions: u64,
    pub p_entangle: f64,
    pub attempts: u64,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        check_probability("p_entangle", self.p_entangle)?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// Independent stream per trial, so results do not depend on scheduling.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Round of the first success for per-round probability `p`; `u64::MAX` if never.
fn first_success<R: Rng>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    if p <= 0.0 {
        return u64::MAX;
    }
    // u in (0, 1]
    let u: f64 = 1.0 - rng.gen::<f64>();
    let g = (u.ln() / (-p).ln_1p()).floor();
    if g >= (u64::MAX - 1) as f64 {
        u64::MAX
    } else {
        g as u64 + 1
    }
}

fn count_round_by_round<R: Rng>(rng: &mut R, n_ions: u64, p: f64, attempts: u64) -> u64 {
    let mut vacant = n_ions;
    for _ in 0..attempts {
        if vacant == 0 {
            break;
        }
        let hits = (0..vacant).filter(|_| rng.gen_bool(p)).count() as u64;
        vacant -= hits;
    }
    n_ions - vacant
}

/// Per-trial entangled counts after `attempts` rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionSummary {
    pub config: TrialConfig,
    pub counts: Vec<u64>,
}

impl CollectionSummary {
    pub fn trials(&self) -> u64 {
        self.counts.len() as u64
    }

    /// Fraction of trials with at least `k` entangled ions.
    pub fn tail(&self, k: u64) -> f64 {
        self.counts.iter().filter(|&&c| c >= k).count() as f64 / self.counts.len() as f64
    }

    pub fn tails(&self, ks: &[u64]) -> BTreeMap<u64, f64> {
        ks.iter().map(|&k| (k, self.tail(k))).collect()
    }

    pub fn mean(&self) -> f64 {
        self.counts.iter().sum::<u64>() as f64 / self.counts.len() as f64
    }

    /// Histogram indexed by count.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.config.n_ions as usize + 1];
        for &c in &self.counts {
            h[c as usize] += 1;
        }
        h
    }
}

pub fn simulate_collection(config: &TrialConfig) -> Result<CollectionSummary> {
    simulate_collection_with(config, Engine::FirstSuccess)
}

pub fn simulate_collection_with(config: &TrialConfig, engine: Engine) -> Result<CollectionSummary> {
    config.validate()?;
    let TrialConfig {
        n_ions,
        p_entangle: p,
        attempts,
        trials,
        seed,
    } = *config;
    let counts = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            match engine {
                Engine::FirstSuccess => (0..n_ions)
                    .filter(|_| first_success(&mut rng, p) <= attempts)
                    .count() as u64,
                Engine::RoundByRound => count_round_by_round(&mut rng, n_ions, p, attempts),
            }
        })
        .collect();
    Ok(CollectionSummary {
        config: *config,
        counts,
    })
}

/// Wilson score interval for `successes / trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Empirical minimum attempt count with its 99% Wilson bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalAttempts {
    /// Smallest `A` whose empirical success frequency reaches `p_ls`.
    pub estimate: u64,
    /// Smallest `A` whose upper Wilson bound reaches `p_ls`.
    pub low: u64,
    /// Smallest `A` whose lower Wilson bound reaches `p_ls`; `u64::MAX` if none.
    pub high: u64,
    pub trials: u64,
}

impl EmpiricalAttempts {
    pub fn brackets(&self, a: u64) -> bool {
        self.low <= a && a <= self.high
    }
}

/// Monte Carlo counterpart of the analytic attempt minimum. Each trial
/// records the round at which the `k_star`-th ion entangles; a budget `A`
/// succeeds in that trial iff this round is at most `A`.
pub fn empirical_min_attempts(
    n_ions: u64,
    p_entangle: f64,
    k_star: u64,
    p_ls: f64,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalAttempts> {
    check_probability("p_entangle", p_entangle)?;
    check_probability("p_ls", p_ls)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if k_star > n_ions {
        return Err(Error::Infeasible(format!(
            "{k_star} pairs cannot come from {n_ions} ions"
        )));
    }
    if k_star == 0 {
        return Ok(EmpiricalAttempts {
            estimate: 0,
            low: 0,
            high: 0,
            trials,
        });
    }
    let mut finish: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let mut rounds: Vec<u64> = (0..n_ions)
                .map(|_| first_success(&mut rng, p_entangle))
                .collect();
            let (_, kth, _) = rounds.select_nth_unstable((k_star - 1) as usize);
            *kth
        })
        .collect();
    finish.sort_unstable();
    // successes at budget finish[i] (i from 0) are at least i + 1
    let first_index = |ok: &dyn Fn(u64) -> bool| -> u64 {
        (1..=trials)
            .find(|&s| ok(s))
            .map_or(u64::MAX, |s| finish[(s - 1) as usize])
    };
    let estimate = first_index(&|s| s as f64 / trials as f64 >= p_ls);
    let low = first_index(&|s| wilson_interval(s, trials, Z_99).1 >= p_ls);
    let high = first_index(&|s| wilson_interval(s, trials, Z_99).0 >= p_ls);
    Ok(EmpiricalAttempts {
        estimate,
        low,
        high,
        trials,
    })
}

/// A `(n_ions, p_c, A)` point of the agreement check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n_ions: u64,
    pub p_c: f64,
    pub attempts: u64,
}

/// Default smoke grid spanning small and large ion counts and couplings.
pub fn smoke_grid() -> Vec<GridPoint> {
    [
        (100, 2.18e-4, 1000),
        (100, 2.18e-4, 100),
        (45, 2.18e-4, 49_000),
        (200, 1e-3, 1000),
        (1000, 2.18e-4, 1000),
        (500, 1.5e-3, 200),
        (50, 0.01, 100),
        (150, 0.1, 10),
        (20, 0.5, 2),
    ]
    .into_iter()
    .map(|(n_ions, p_c, attempts)| GridPoint {
        n_ions,
        p_c,
        attempts,
    })
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub n_ions: u64,
    pub p_c: f64,
    pub attempts: u64,
    pub k: u64,
    pub analytic: f64,
    pub empirical: f64,
    /// Binomial standard error of the empirical tail, from the analytic value.
    pub std_error: f64,
    pub z_score: f64,
    pub pass: bool,
}

/// Thresholds at the mean and one standard deviation either side.
pub fn probe_thresholds(n_ions: u64, p: f64) -> Vec<u64> {
    let mean = n_ions as f64 * p;
    let sd = (mean * (1.0 - p)).sqrt();
    let mut ks: Vec<u64> = [mean - sd, mean, mean + sd]
        .iter()
        .map(|x| x.round().clamp(0.0, n_ions as f64) as u64)
        .collect();
    ks.dedup();
    ks
}

/// Compares the empirical tails at `ks` against the binomial model; a point
/// passes when the gap is within `z_max` standard errors.
pub fn compare_tails(summary: &CollectionSummary, ks: &[u64], z_max: f64) -> Vec<Agreement> {
    let cfg = summary.config;
    let p1 = p_onepair(cfg.p_entangle, cfg.attempts);
    let n = summary.trials() as f64;
    ks.iter()
        .map(|&k| {
            let analytic = binomial_tail_geq(cfg.n_ions, p1, k);
            let empirical = summary.tail(k);
            let std_error = (analytic * (1.0 - analytic) / n).sqrt();
            let gap = (empirical - analytic).abs();
            let z_score = if std_error > 0.0 {
                gap / std_error
            } else if gap == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            Agreement {
                n_ions: cfg.n_ions,
                p_c: cfg.p_entangle,
                attempts: cfg.attempts,
                k,
                analytic,
                empirical,
                std_error,
                z_score,
                pass: z_score <= z_max,
            }
        })
        .collect()
}

/// Runs every grid point with `trials` trials and checks the tails at the
/// probe thresholds within 3 standard errors.
pub fn cross_validate(grid: &[GridPoint], trials: u64, seed: u64) -> Result<Vec<Agreement>> {
    let mut rows = Vec::new();
    for (i, g) in grid.iter().enumerate() {
        let cfg = TrialConfig {
            n_ions: g.n_ions,
            p_entangle: g.p_c,
            attempts: g.attempts,
            trials,
            seed: seed.wrapping_add(i as u64),
        };
        let summary = simulate_collection(&cfg)?;
        let ks = probe_thresholds(g.n_ions, p_onepair(g.p_c, g.attempts));
        rows.extend(compare_tails(&summary, &ks, 3.0));
    }
    Ok(rows)
}
