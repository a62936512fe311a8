//! Communication-ion resource estimation for trapped-ion lattice surgery, with an
//! exact noisy simulator for entanglement purification circuits and a genetic
//! search over them.

pub mod collection;
pub mod error;
pub mod ga;
pub mod purification;
pub mod quantum;
pub mod resource;

pub use error::{Error, Result};
pub use ga::{GaConfig, RankedCircuit};
pub use purification::{simulate, ProtocolOutcome, PurificationCircuit};
pub use quantum::{BellDiagonalState, DensityMatrix, NoiseModel};
pub use resource::{DeviceParams, EstimateResult, SurgeryQuery};
