//! Dense few-qubit mixed states, gates, noise channels and Bell-basis tools.
//!
//! Qubit `q0` is the most significant bit of a basis index.

mod bell;
mod density;
pub mod gates;
mod noise;
mod stephenson;

use num_complex::Complex64;

pub use bell::{bell_state, bell_weights, fidelity_to_bell, twirl, BellDiagonalState, BellKind};
pub use density::{DensityMatrix, HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
pub use gates::{apply_gate, Clifford, Gate};
pub use noise::{depolarize, measure_branches, Basis, MeasurementBranch, NoiseModel};
pub use stephenson::{apply_alignment, stephenson_pair};

pub type C64 = Complex64;
/// Row-major 2x2 complex matrix.
pub type Mat2 = [[C64; 2]; 2];

/// Largest supported register: five Bell pairs.
pub const MAX_QUBITS: usize = 10;

pub fn partial_trace(state: &DensityMatrix, keep: &[usize]) -> crate::Result<DensityMatrix> {
    state.partial_trace(keep)
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> crate::Result<DensityMatrix> {
    a.tensor(b)
}
