//! Grid evaluations of the solvers: min-ion tables, rate tables, and the
//! coupling sweep, plus the two derived coupling thresholds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{max_rate, min_ions, DeviceParams, SurgeryQuery};
use crate::error::{Error, Result};

/// `points` values from `from` to `to` (inclusive), evenly spaced in log10.
pub fn log_space(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if !(from > 0.0 && to > 0.0 && from.is_finite() && to.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "log grid bounds must be positive, got {from}..{to}"
        )));
    }
    if points == 0 {
        return Err(Error::InvalidParameter(
            "grid needs at least one point".into(),
        ));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let (a, b) = (from.log10(), to.log10());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == points - 1 {
                to
            } else {
                10f64.powf(a + step * i as f64)
            }
        })
        .collect())
}

/// Row of the min-ion table. `min_ions` is 0 when infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinIonsRow {
    pub distance: u32,
    pub cycle_time_us: f64,
    pub min_ions: u64,
    pub feasible: bool,
}

/// Row of the rate table. Rates are 0.0 when infeasible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub distance: u32,
    pub n_ions: u64,
    pub rate_hz: f64,
    pub full_surgery_rate_hz: f64,
    pub feasible: bool,
}

/// Row of the coupling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub distance: u32,
    pub cycle_time_us: f64,
    pub p_c: f64,
    pub min_ions: u64,
    pub feasible: bool,
}

/// Seconds to microseconds, rounded to picosecond resolution so that
/// `1e-5` reports as `10`.
fn to_us(seconds: f64) -> f64 {
    (seconds * 1e12).round() / 1e6
}

fn check_nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(Error::InvalidParameter(format!("{name} grid is empty")))
    } else {
        Ok(())
    }
}

fn ions_cell(
    distance: u32,
    cycle_time_s: f64,
    device: &DeviceParams,
    paper_compat: bool,
) -> Result<Option<u64>> {
    let q = SurgeryQuery::cycle_time(distance, cycle_time_s).compat(paper_compat);
    match min_ions(&q, device) {
        Ok(r) => Ok(Some(r.answer)),
        Err(Error::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Min-ion table over `distances x cycle_times_s`, row-major in distance.
pub fn min_ions_table(
    distances: &[u32],
    cycle_times_s: &[f64],
    device: &DeviceParams,
    paper_compat: bool,
) -> Result<Vec<MinIonsRow>> {
    check_nonempty("distance", distances)?;
    check_nonempty("cycle time", cycle_times_s)?;
    let cells: Vec<(u32, f64)> = distances
        .iter()
        .flat_map(|&d| cycle_times_s.iter().map(move |&t| (d, t)))
        .collect();
    cells
        .par_iter()
        .map(|&(distance, t)| {
            let cell = ions_cell(distance, t, device, paper_compat)?;
            Ok(MinIonsRow {
                distance,
                cycle_time_us: to_us(t),
                min_ions: cell.unwrap_or(0),
                feasible: cell.is_some(),
            })
        })
        .collect()
}

/// Rate table over `distances x ion_counts`, row-major in distance.
pub fn rate_table(
    distances: &[u32],
    ion_counts: &[u64],
    device: &DeviceParams,
    paper_compat: bool,
) -> Result<Vec<RateRow>> {
    check_nonempty("distance", distances)?;
    check_nonempty("ion count", ion_counts)?;
    let cells: Vec<(u32, u64)> = distances
        .iter()
        .flat_map(|&d| ion_counts.iter().map(move |&n| (d, n)))
        .collect();
    cells
        .par_iter()
        .map(|&(distance, n_ions)| {
            let r = max_rate(
                &SurgeryQuery::ions(distance, n_ions).compat(paper_compat),
                device,
            )?;
            Ok(RateRow {
                distance,
                n_ions,
                rate_hz: r.rate_hz,
                full_surgery_rate_hz: r.full_surgery_rate_hz(distance),
                feasible: r.feasible,
            })
        })
        .collect()
}

/// One `min_ions` evaluation per `(d, T, p_c)` grid point, ordered by d, then T, then p_c.
pub fn sweep_coupling(
    distances: &[u32],
    cycle_times_s: &[f64],
    p_c_grid: &[f64],
    device: &DeviceParams,
    paper_compat: bool,
) -> Result<Vec<SweepRow>> {
    check_nonempty("distance", distances)?;
    check_nonempty("cycle time", cycle_times_s)?;
    check_nonempty("p_c", p_c_grid)?;
    let mut cells = Vec::with_capacity(distances.len() * cycle_times_s.len() * p_c_grid.len());
    for &d in distances {
        for &t in cycle_times_s {
            for &pc in p_c_grid {
                cells.push((d, t, pc));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(distance, t, p_c)| {
            let dev = device.with_p_entangle(p_c);
            let cell = ions_cell(distance, t, &dev, paper_compat)?;
            Ok(SweepRow {
                distance,
                cycle_time_us: to_us(t),
                p_c,
                min_ions: cell.unwrap_or(0),
                feasible: cell.is_some(),
            })
        })
        .collect()
}

/// Smallest `p_c` in `[lo, 1]` satisfying `ok`, by bisection on `log p_c`
/// to relative precision `1e-9`. `ok` must be monotone in `p_c`.
fn coupling_threshold(lo: f64, ok: impl Fn(f64) -> Result<bool>) -> Result<Option<f64>> {
    if !ok(1.0)? {
        return Ok(None);
    }
    if ok(lo)? {
        return Ok(Some(lo));
    }
    let (mut bad, mut good) = (lo.ln(), 0.0f64);
    while good - bad > 1e-9 {
        let mid = 0.5 * (bad + good);
        if ok(mid.exp())? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(Some(good.exp()))
}

const MIN_COUPLING: f64 = 1e-12;

/// Smallest `p_c` at which `n_ions` suffice for distance `d` at cycle time `T`;
/// `None` if not even `p_c = 1` does.
pub fn required_coupling(
    distance: u32,
    cycle_time_s: f64,
    n_ions: u64,
    device: &DeviceParams,
    paper_compat: bool,
) -> Result<Option<f64>> {
    coupling_threshold(MIN_COUPLING, |pc| {
        let cell = ions_cell(
            distance,
            cycle_time_s,
            &device.with_p_entangle(pc),
            paper_compat,
        )?;
        Ok(matches!(cell, Some(n) if n <= n_ions))
    })
}

/// Smallest `p_c` at which the minimum ion count reaches its floor `k*`.
pub fn plateau_onset(
    distance: u32,
    cycle_time_s: f64,
    device: &DeviceParams,
    paper_compat: bool,
) -> Result<f64> {
    let q = SurgeryQuery::cycle_time(distance, cycle_time_s).compat(paper_compat);
    let floor = min_ions(&q, &device.with_p_entangle(1.0))?.answer;
    let onset = coupling_threshold(MIN_COUPLING, |pc| {
        let cell = ions_cell(
            distance,
            cycle_time_s,
            &device.with_p_entangle(pc),
            paper_compat,
        )?;
        Ok(cell == Some(floor))
    })?;
    Ok(onset.expect("p_c = 1 reaches the floor"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints() {
        let g = log_space(1e-4, 1.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[4], 1.0);
        assert!((g[2] - 1e-2).abs() < 1e-15);
        assert_eq!(log_space(0.3, 1.0, 1).unwrap(), vec![0.3]);
        assert!(log_space(0.0, 1.0, 3).is_err());
        assert!(log_space(0.1, 1.0, 0).is_err());
    }

    #[test]
    fn sweep_shape_and_order() {
        let dev = DeviceParams::default();
        let rows = sweep_coupling(&[3, 9], &[1e-3], &[1e-3, 1.0], &dev, false).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].distance, rows[0].p_c), (3, 1e-3));
        assert_eq!((rows[3].distance, rows[3].min_ions), (9, 135));
        assert!(sweep_coupling(&[], &[1e-3], &[1.0], &dev, false).is_err());
    }

    #[test]
    fn threshold_is_tight() {
        let dev = DeviceParams::default();
        let pc = required_coupling(9, 1e-3, 200, &dev, false)
            .unwrap()
            .unwrap();
        let at = |p: f64| {
            min_ions(&SurgeryQuery::cycle_time(9, 1e-3), &dev.with_p_entangle(p))
                .unwrap()
                .answer
        };
        assert!(at(pc) <= 200);
        assert!(at(pc * (1.0 - 1e-6)) > 200);
        assert_eq!(required_coupling(9, 1e-3, 100, &dev, false).unwrap(), None);
    }

    #[test]
    fn infeasible_rate_cells_are_zero() {
        let rows = rate_table(&[7], &[100], &DeviceParams::default(), false).unwrap();
        assert_eq!(rows[0].rate_hz, 0.0);
        assert_eq!(rows[0].full_surgery_rate_hz, 0.0);
        assert!(!rows[0].feasible);
    }
}
