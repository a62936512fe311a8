//! `n -> 1` entanglement purification: circuit description and exact noisy simulation.

mod circuit;
mod entanglement;
mod simulate;

pub use circuit::{
    Constraint, Instruction, PurificationCircuit, Relation, Side, MAX_PAIRS, MIN_PAIRS, OUTPUT_PAIR,
};
pub use entanglement::{
    entropy_bits, marginal_entanglement_check, EntanglementReport, PairCorrelation,
    CORRELATION_THRESHOLD,
};
pub use simulate::{
    simulate, simulate_detailed, BranchRecord, PairInputs, ProtocolOutcome, SimulationReport,
};
