use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::{DensityMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PsiPlus,
        BellKind::PhiMinus,
        BellKind::PsiMinus,
    ];

    pub fn amplitudes(self) -> [C64; 4] {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        match self {
            BellKind::PhiPlus => [h, z, z, h],
            BellKind::PhiMinus => [h, z, z, -h],
            BellKind::PsiPlus => [z, h, h, z],
            BellKind::PsiMinus => [z, h, -h, z],
        }
    }
}

pub fn bell_state(kind: BellKind) -> DensityMatrix {
    DensityMatrix::from_pure(&kind.amplitudes()).expect("Bell vectors are valid")
}

fn check_two_qubits(state: &DensityMatrix) -> Result<()> {
    if state.num_qubits() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: state.num_qubits(),
        });
    }
    Ok(())
}

/// `<bell| rho |bell>`.
pub fn fidelity_to_bell(state: &DensityMatrix, kind: BellKind) -> Result<f64> {
    check_two_qubits(state)?;
    state.expectation_pure(&kind.amplitudes())
}

/// Bell-diagonal two-qubit state
/// `f phi+ + (1 - f)(px psi+ + pz phi- + py psi-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalState {
    pub f: f64,
    pub px: f64,
    pub pz: f64,
    pub py: f64,
}

impl BellDiagonalState {
    pub fn new(f: f64, px: f64, pz: f64, py: f64) -> Result<Self> {
        for (name, v) in [("f", f), ("px", px), ("pz", pz), ("py", py)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidState(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if (px + py + pz - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "px + py + pz = {} != 1",
                px + py + pz
            )));
        }
        Ok(Self { f, px, pz, py })
    }

    /// Isotropic noise: `px = py = pz = 1/3`.
    pub fn werner(f: f64) -> Result<Self> {
        let third = 1.0 / 3.0;
        Self::new(f, third, third, 1.0 - 2.0 * third)
    }

    /// Absolute weights in the order `[phi+, psi+, phi-, psi-]`.
    pub fn weights(&self) -> [f64; 4] {
        let r = 1.0 - self.f;
        [self.f, r * self.px, r * self.pz, r * self.py]
    }

    pub fn to_density(&self) -> DensityMatrix {
        let mut out =
            DensityMatrix::from_entries(2, vec![C64::new(0.0, 0.0); 16]).expect("16 entries");
        for (kind, w) in BellKind::ALL.iter().zip(self.weights()) {
            out.add_scaled(&bell_state(*kind), w);
        }
        out
    }
}

/// Bell-basis diagonal `[phi+, psi+, phi-, psi-]` of a two-qubit operator.
/// Sums to `trace(rho)`.
pub fn bell_weights(state: &DensityMatrix) -> Result<[f64; 4]> {
    check_two_qubits(state)?;
    let mut out = [0.0; 4];
    for (w, kind) in out.iter_mut().zip(BellKind::ALL) {
        *w = state.expectation_pure(&kind.amplitudes())?;
    }
    Ok(out)
}

/// Deterministic twirl to the Bell-diagonal state of equal `phi+` fidelity.
///
/// When the remainder `1 - f` vanishes the relative weights default to 1/3 each.
pub fn twirl(state: &DensityMatrix) -> Result<BellDiagonalState> {
    let w = bell_weights(state)?;
    let f = w[0];
    let rest = w[1] + w[2] + w[3];
    let (px, pz, py) = if rest > 1e-15 {
        (w[1] / rest, w[2] / rest, w[3] / rest)
    } else {
        (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    };
    Ok(BellDiagonalState { f, px, pz, py })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{apply_gate, Gate};

    #[test]
    fn phi_plus_entries() {
        let s = bell_state(BellKind::PhiPlus);
        for i in 0..4 {
            for j in 0..4 {
                let want = if [0, 3].contains(&i) && [0, 3].contains(&j) {
                    0.5
                } else {
                    0.0
                };
                assert!((s.get(i, j) - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn orthogonality_and_pauli_relations() {
        let psi_m = bell_state(BellKind::PsiMinus);
        assert!(fidelity_to_bell(&psi_m, BellKind::PhiPlus).unwrap().abs() < 1e-15);
        let phi_p = bell_state(BellKind::PhiPlus);
        let z0 = apply_gate(&phi_p, Gate::Z, &[0]).unwrap();
        assert!(z0.max_abs_diff(&bell_state(BellKind::PhiMinus)) < 1e-15);
        assert!((fidelity_to_bell(&phi_p, BellKind::PhiPlus).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_dimension() {
        let s = DensityMatrix::zero_state(3).unwrap();
        assert!(matches!(
            fidelity_to_bell(&s, BellKind::PhiPlus),
            Err(Error::WrongDimension {
                expected: 2,
                actual: 3
            })
        ));
        assert!(twirl(&s).is_err());
    }

    #[test]
    fn bell_diagonal_round_trip() {
        let b = BellDiagonalState::new(0.94, 0.5, 0.2, 0.3).unwrap();
        let rho = b.to_density();
        assert!((fidelity_to_bell(&rho, BellKind::PhiPlus).unwrap() - 0.94).abs() < 1e-15);
        let t = twirl(&rho).unwrap();
        assert!((t.f - b.f).abs() < 1e-12);
        assert!((t.px - b.px).abs() < 1e-12);
        assert!((t.pz - b.pz).abs() < 1e-12);
        assert!((t.py - b.py).abs() < 1e-12);
        assert!(BellDiagonalState::new(0.9, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn twirl_of_pure_phi_plus() {
        let t = twirl(&bell_state(BellKind::PhiPlus)).unwrap();
        assert!((t.f - 1.0).abs() < 1e-15);
    }
}
