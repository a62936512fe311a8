use serde::{Deserialize, Serialize};

use super::gates::{HADAMARD, PHASE_S, PHASE_S_DAG};
use super::{gates, DensityMatrix};
use crate::error::{check_probability, Result};

/// Circuit-level noise: depolarizing after gates, bit flips on measurement records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Single-qubit depolarizing probability per gate.
    pub p1: f64,
    /// Two-qubit depolarizing probability per gate.
    pub p2: f64,
    /// Classical bit-flip probability per measurement record.
    pub p_meas: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64, p_meas: f64) -> Result<Self> {
        let m = Self { p1, p2, p_meas };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            p_meas: 0.0,
        }
    }

    /// Trapped-ion device rates: 1e-5 single-qubit, 5e-5 two-qubit, 1e-5 readout.
    pub fn trapped_ion() -> Self {
        Self {
            p1: 1e-5,
            p2: 5e-5,
            p_meas: 1e-5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p1", self.p1)?;
        check_probability("p2", self.p2)?;
        check_probability("p_meas", self.p_meas)
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::trapped_ion()
    }
}

pub fn depolarize(state: &DensityMatrix, targets: &[usize], p: f64) -> Result<DensityMatrix> {
    let mut out = state.clone();
    out.depolarize(targets, p)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    /// Unitary taking this basis to the computational basis (eigenvalue +1 to `|0>`).
    pub(crate) fn rotation_to_z(self) -> Option<super::Mat2> {
        match self {
            Basis::Z => None,
            Basis::X => Some(HADAMARD),
            Basis::Y => Some(gates::matmul(&HADAMARD, &PHASE_S_DAG)),
        }
    }

    pub(crate) fn rotation_from_z(self) -> Option<super::Mat2> {
        match self {
            Basis::Z => None,
            Basis::X => Some(HADAMARD),
            Basis::Y => Some(gates::matmul(&PHASE_S, &HADAMARD)),
        }
    }
}

/// One labelled measurement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBranch {
    pub outcome: u8,
    pub probability: f64,
    /// Post-measurement state, normalized when `probability > 0`.
    /// The measured qubit is left in the projected basis state.
    pub state: DensityMatrix,
}

/// Both outcomes of a single-qubit measurement whose classical record is
/// flipped with probability `p_meas`.
pub fn measure_branches(
    state: &DensityMatrix,
    qubit: usize,
    basis: Basis,
    p_meas: f64,
) -> Result<[MeasurementBranch; 2]> {
    check_probability("p_meas", p_meas)?;
    state.check_qubit(qubit)?;
    let mut rotated = state.clone();
    if let Some(u) = basis.rotation_to_z() {
        rotated.apply_single(&u, qubit)?;
    }
    let mut projected = [rotated.clone(), rotated];
    for (bit, p) in projected.iter_mut().enumerate() {
        p.project_z(qubit, bit)?;
        if let Some(u) = basis.rotation_from_z() {
            p.apply_single(&u, qubit)?;
        }
    }
    let raw = [projected[0].trace().re, projected[1].trace().re];
    let total = raw[0] + raw[1];
    let branch = |b: usize| {
        let mut s = projected[b].clone();
        s.scale(1.0 - p_meas);
        s.add_scaled(&projected[1 - b], p_meas);
        let prob = (1.0 - p_meas) * raw[b] + p_meas * raw[1 - b];
        if prob > 0.0 {
            s.scale(1.0 / prob);
        }
        MeasurementBranch {
            outcome: b as u8,
            probability: prob / total,
            state: s,
        }
    };
    Ok([branch(0), branch(1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::C64;

    #[test]
    fn p_zero_is_noop() {
        let s = crate::quantum::stephenson_pair(true);
        assert_eq!(depolarize(&s, &[0], 0.0).unwrap(), s);
        assert_eq!(depolarize(&s, &[0, 1], 0.0).unwrap(), s);
    }

    #[test]
    fn full_single_qubit_depolarizing() {
        let s = DensityMatrix::zero_state(1).unwrap();
        let out = depolarize(&s, &[0], 1.0).unwrap();
        assert!((out.get(0, 0).re - 1.0 / 3.0).abs() < 1e-15);
        assert!((out.get(1, 1).re - 2.0 / 3.0).abs() < 1e-15);
        assert!(depolarize(&s, &[0], 1.5).is_err());
        assert!(depolarize(&s, &[0, 0], 0.1).is_err());
        assert!(depolarize(&s, &[], 0.1).is_err());
    }

    #[test]
    fn noise_model_bounds() {
        assert!(NoiseModel::new(0.1, 1.1, 0.0).is_err());
        assert!(NoiseModel::new(-0.1, 0.0, 0.0).is_err());
        assert_eq!(
            NoiseModel::new(1e-5, 5e-5, 1e-5).unwrap(),
            NoiseModel::trapped_ion()
        );
    }

    #[test]
    fn z_measure_with_bitflip() {
        let s = DensityMatrix::zero_state(1).unwrap();
        let [b0, b1] = measure_branches(&s, 0, Basis::Z, 0.0).unwrap();
        assert_eq!(b0.probability, 1.0);
        assert_eq!(b1.probability, 0.0);
        let [b0, b1] = measure_branches(&s, 0, Basis::Z, 0.1).unwrap();
        assert!((b0.probability - 0.9).abs() < 1e-15);
        assert!((b1.probability - 0.1).abs() < 1e-15);
        // the reported label is wrong, the qubit itself still sits in |0>
        assert!((b1.state.get(0, 0).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_is_even_in_every_basis() {
        let s = DensityMatrix::maximally_mixed(1).unwrap();
        for basis in [Basis::X, Basis::Y, Basis::Z] {
            for pm in [0.0, 0.3, 1.0] {
                let [b0, b1] = measure_branches(&s, 0, basis, pm).unwrap();
                assert!((b0.probability - 0.5).abs() < 1e-15);
                assert!((b1.probability - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn basis_eigenstates_are_deterministic() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus_i = DensityMatrix::from_pure(&[C64::new(h, 0.0), C64::new(0.0, h)]).unwrap();
        let [b0, _] = measure_branches(&plus_i, 0, Basis::Y, 0.0).unwrap();
        assert!((b0.probability - 1.0).abs() < 1e-12);
        assert!(b0.state.max_abs_diff(&plus_i) < 1e-12);
        let minus = DensityMatrix::from_pure(&[C64::new(h, 0.0), C64::new(-h, 0.0)]).unwrap();
        let [_, b1] = measure_branches(&minus, 0, Basis::X, 0.0).unwrap();
        assert!((b1.probability - 1.0).abs() < 1e-12);
    }
}
