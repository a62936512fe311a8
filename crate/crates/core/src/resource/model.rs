use std::path::Path;

use serde::{Deserialize, Serialize};

use super::binomial::binomial_tail_geq;
use crate::error::{Error, Result};

/// Device and protocol constants of the estimator. JSON keys follow the
/// conventional symbols (`R`, `p_c`, `p`, `N_p`, `P_pair`, `P_LS`, `F_ideal`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceParams {
    /// Entanglement attempts per second per ion.
    #[serde(rename = "R", alias = "pulse_rate_hz")]
    pub pulse_rate_hz: f64,
    /// Per-attempt probability that two communication ions become entangled.
    #[serde(rename = "p_c", alias = "p_entangle")]
    pub p_entangle: f64,
    /// Success probability of one purification circuit.
    #[serde(rename = "p", alias = "p_purify")]
    pub p_purify: f64,
    /// Raw pairs consumed per purification circuit.
    #[serde(rename = "N_p", alias = "pairs_per_circuit")]
    pub pairs_per_circuit: u32,
    /// Confidence that the multiplexed circuits yield at least one pair.
    #[serde(rename = "P_pair", alias = "p_pair_confidence")]
    pub p_pair_confidence: f64,
    /// Confidence that enough raw pairs are collected within one cycle.
    #[serde(rename = "P_LS", alias = "p_ls_confidence")]
    pub p_ls_confidence: f64,
    /// Pair fidelity required by the lattice surgery.
    #[serde(rename = "F_ideal", alias = "f_ideal")]
    pub f_ideal: f64,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            pulse_rate_hz: 1e6,
            p_entangle: 2.18e-4,
            p_purify: 0.819,
            pairs_per_circuit: 3,
            p_pair_confidence: 0.999,
            p_ls_confidence: 0.999,
            f_ideal: 0.99,
        }
    }
}

impl DeviceParams {
    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside (0, 1]"
                )))
            }
        };
        prob("p_c", self.p_entangle)?;
        prob("p", self.p_purify)?;
        prob("P_pair", self.p_pair_confidence)?;
        prob("P_LS", self.p_ls_confidence)?;
        prob("F_ideal", self.f_ideal)?;
        if !(self.pulse_rate_hz > 0.0 && self.pulse_rate_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "R = {} must be positive",
                self.pulse_rate_hz
            )));
        }
        if self.pairs_per_circuit < 2 {
            return Err(Error::InvalidParameter("N_p must be at least 2".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device serializes")
    }

    pub fn with_p_entangle(mut self, p_c: f64) -> Self {
        self.p_entangle = p_c;
        self
    }

    /// Attempts available within a cycle of `cycle_time_s`: `floor(T R)`.
    pub fn attempts_in(&self, cycle_time_s: f64) -> u64 {
        attempts_budget(cycle_time_s, self.pulse_rate_hz)
    }
}

/// `floor(T R)`, ignoring representation error in products like `1e-5 * 1e6`.
pub fn attempts_budget(cycle_time_s: f64, pulse_rate_hz: f64) -> u64 {
    let x = cycle_time_s * pulse_rate_hz;
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as u64
    } else {
        x.floor() as u64
    }
}

/// Smallest number of parallel purification circuits with
/// `1 - (1 - p)^K >= P_pair`.
pub fn multiplexing_k(p_purify: f64, p_pair_confidence: f64) -> Result<u32> {
    if !(p_purify > 0.0 && p_purify <= 1.0) {
        return Err(Error::Infeasible(format!(
            "purification success probability {p_purify} must be in (0, 1]"
        )));
    }
    if !(p_pair_confidence > 0.0 && p_pair_confidence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "P_pair = {p_pair_confidence} must be in (0, 1)"
        )));
    }
    if p_purify == 1.0 {
        return Ok(1);
    }
    // (1-p)^K <= 1 - P_pair  <=>  K ln(1-p) <= ln(1-P_pair)
    let log_fail = (-p_purify).ln_1p();
    let log_budget = (-p_pair_confidence).ln_1p();
    let ok = |k: u32| k as f64 * log_fail <= log_budget;
    let mut k = (log_budget / log_fail).ceil().max(1.0) as u32;
    while k > 1 && ok(k - 1) {
        k -= 1;
    }
    while !ok(k) {
        k += 1;
    }
    Ok(k)
}

/// Raw pairs per surgery cycle: `d N_p K`.
pub fn pairs_required(distance: u32, pairs_per_circuit: u32, k_multiplex: u32) -> u64 {
    distance as u64 * pairs_per_circuit as u64 * k_multiplex as u64
}

/// `1 - (1 - p_e)^A`.
pub fn p_onepair(p_entangle: f64, attempts: u64) -> f64 {
    if attempts == 0 || p_entangle <= 0.0 {
        return 0.0;
    }
    if p_entangle >= 1.0 {
        return 1.0;
    }
    -(attempts as f64 * (-p_entangle).ln_1p()).exp_m1()
}

/// What a query fixes besides the code distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryTarget {
    CycleTime { seconds: f64 },
    Ions { count: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurgeryQuery {
    pub distance: u32,
    pub target: QueryTarget,
    /// Require `N_LS + 1` pairs, reproducing the published tables.
    #[serde(default)]
    pub paper_compat: bool,
}

impl SurgeryQuery {
    pub fn cycle_time(distance: u32, seconds: f64) -> Self {
        Self {
            distance,
            target: QueryTarget::CycleTime { seconds },
            paper_compat: false,
        }
    }

    pub fn ions(distance: u32, count: u64) -> Self {
        Self {
            distance,
            target: QueryTarget::Ions { count },
            paper_compat: false,
        }
    }

    pub fn compat(mut self, paper_compat: bool) -> Self {
        self.paper_compat = paper_compat;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.distance == 0 {
            return Err(Error::InvalidParameter(
                "distance must be at least 1".into(),
            ));
        }
        match self.target {
            QueryTarget::CycleTime { seconds } if !(seconds > 0.0 && seconds.is_finite()) => Err(
                Error::InvalidParameter(format!("cycle time {seconds} s must be positive")),
            ),
            QueryTarget::Ions { count: 0 } => {
                Err(Error::InvalidParameter("need at least one ion".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Solver output. `answer` is the minimum ion count (cycle-time queries) or the
/// minimum attempt count (ion-budget queries); it is 0 when infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub k_multiplex: u32,
    pub n_ls: u64,
    /// Pairs that must be collected: `N_LS`, or `N_LS + 1` in compatibility mode.
    pub k_star: u64,
    pub attempts_budget: u64,
    pub p_onepair: f64,
    pub answer: u64,
    /// Surgery cycles per second; 0 when infeasible.
    pub rate_hz: f64,
    pub feasible: bool,
}

impl EstimateResult {
    /// Rate of complete surgeries if one takes `d` consecutive cycles.
    pub fn full_surgery_rate_hz(&self, distance: u32) -> f64 {
        self.rate_hz / distance as f64
    }
}

struct Demand {
    k_multiplex: u32,
    n_ls: u64,
    k_star: u64,
}

fn demand(distance: u32, paper_compat: bool, device: &DeviceParams) -> Result<Demand> {
    let k_multiplex = multiplexing_k(device.p_purify, device.p_pair_confidence)?;
    let n_ls = pairs_required(distance, device.pairs_per_circuit, k_multiplex);
    Ok(Demand {
        k_multiplex,
        n_ls,
        k_star: n_ls + u64::from(paper_compat),
    })
}

/// Smallest `x >= lo` with `pred(x)`, for `pred` monotone (false..false true..true).
/// Doubles until the predicate holds, then bisects.
fn first_true(lo: u64, cap: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if pred(lo) {
        return Some(lo);
    }
    let mut below = lo;
    let mut step = lo.max(1);
    let mut hi = loop {
        let probe = below.checked_add(step)?.min(cap);
        if pred(probe) {
            break probe;
        }
        if probe == cap {
            return None;
        }
        below = probe;
        step = step.saturating_mul(2);
    };
    // invariant: pred(below) false, pred(hi) true
    while hi - below > 1 {
        let mid = below + (hi - below) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            below = mid;
        }
    }
    Some(hi)
}

const SEARCH_CAP: u64 = 1 << 52;

/// Minimum communication ions so that at least `k*` of them are entangled
/// within one cycle with confidence `P_LS`.
pub fn min_ions(query: &SurgeryQuery, device: &DeviceParams) -> Result<EstimateResult> {
    query.validate()?;
    device.validate()?;
    let QueryTarget::CycleTime { seconds } = query.target else {
        return Err(Error::InvalidParameter(
            "min_ions needs a cycle time".into(),
        ));
    };
    let Demand {
        k_multiplex,
        n_ls,
        k_star,
    } = demand(query.distance, query.paper_compat, device)?;
    let attempts = device.attempts_in(seconds);
    let p1 = p_onepair(device.p_entangle, attempts);
    if p1 <= 0.0 {
        return Err(Error::Infeasible(format!(
            "no entanglement possible within {attempts} attempts"
        )));
    }
    let target = device.p_ls_confidence;
    let answer = first_true(k_star, SEARCH_CAP, |n| {
        binomial_tail_geq(n, p1, k_star) >= target
    })
    .ok_or_else(|| Error::Infeasible("ion count exceeds search range".into()))?;
    Ok(EstimateResult {
        k_multiplex,
        n_ls,
        k_star,
        attempts_budget: attempts,
        p_onepair: p1,
        answer,
        rate_hz: 1.0 / seconds,
        feasible: true,
    })
}

/// Minimum attempts for a fixed ion budget; infeasible when the budget is
/// below `k*` or entanglement never succeeds.
pub fn min_attempts(query: &SurgeryQuery, device: &DeviceParams) -> Result<EstimateResult> {
    query.validate()?;
    device.validate()?;
    let QueryTarget::Ions { count } = query.target else {
        return Err(Error::InvalidParameter(
            "min_attempts needs an ion count".into(),
        ));
    };
    let Demand {
        k_multiplex,
        n_ls,
        k_star,
    } = demand(query.distance, query.paper_compat, device)?;
    let infeasible = EstimateResult {
        k_multiplex,
        n_ls,
        k_star,
        attempts_budget: 0,
        p_onepair: 0.0,
        answer: 0,
        rate_hz: 0.0,
        feasible: false,
    };
    if count < k_star {
        return Ok(infeasible);
    }
    let target = device.p_ls_confidence;
    let pe = device.p_entangle;
    let found = first_true(1, SEARCH_CAP, |a| {
        binomial_tail_geq(count, p_onepair(pe, a), k_star) >= target
    });
    Ok(match found {
        Some(a) => EstimateResult {
            attempts_budget: a,
            p_onepair: p_onepair(pe, a),
            answer: a,
            rate_hz: device.pulse_rate_hz / a as f64,
            feasible: true,
            ..infeasible
        },
        None => infeasible,
    })
}

/// Highest surgery cycle rate for a fixed ion budget: `R / A_min`.
pub fn max_rate(query: &SurgeryQuery, device: &DeviceParams) -> Result<EstimateResult> {
    min_attempts(query, device)
}
