use serde::{Deserialize, Serialize};

use super::circuit::{Instruction, PurificationCircuit, OUTPUT_PAIR};
use crate::error::{Error, Result};
use crate::quantum::{fidelity_to_bell, BellKind, DensityMatrix, NoiseModel, C64};

/// Result of running a protocol: the renormalized output pair on acceptance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOutcome {
    /// `phi+` fidelity of the accepted output pair (0 when nothing is accepted).
    pub output_fidelity: f64,
    pub success_probability: f64,
    pub output_state: DensityMatrix,
}

/// One full assignment of classical records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    /// Record per label, in measurement order.
    pub records: Vec<u8>,
    pub probability: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub outcome: ProtocolOutcome,
    pub labels: Vec<String>,
    pub branches: Vec<BranchRecord>,
}

/// Input pairs: either one state copied onto every pair, or one state per pair.
#[derive(Debug, Clone, Copy)]
pub enum PairInputs<'a> {
    Shared(&'a DensityMatrix),
    PerPair(&'a [DensityMatrix]),
}

impl<'a> From<&'a DensityMatrix> for PairInputs<'a> {
    fn from(s: &'a DensityMatrix) -> Self {
        PairInputs::Shared(s)
    }
}

impl<'a> From<&'a [DensityMatrix]> for PairInputs<'a> {
    fn from(s: &'a [DensityMatrix]) -> Self {
        PairInputs::PerPair(s)
    }
}

impl<'a> From<&'a Vec<DensityMatrix>> for PairInputs<'a> {
    fn from(s: &'a Vec<DensityMatrix>) -> Self {
        PairInputs::PerPair(s.as_slice())
    }
}

impl<'a> PairInputs<'a> {
    fn resolve(self, n_pairs: usize) -> Result<Vec<&'a DensityMatrix>> {
        let states: Vec<&DensityMatrix> = match self {
            PairInputs::Shared(s) => vec![s; n_pairs],
            PairInputs::PerPair(list) => {
                if list.len() != n_pairs {
                    return Err(Error::InvalidParameter(format!(
                        "{} input states for {n_pairs} pairs",
                        list.len()
                    )));
                }
                list.iter().collect()
            }
        };
        for s in &states {
            if s.num_qubits() != 2 {
                return Err(Error::WrongDimension {
                    expected: 2,
                    actual: s.num_qubits(),
                });
            }
        }
        Ok(states)
    }
}

/// Register layout `A0..A(n-1) B0..B(n-1)` built from per-pair states.
fn joint_state(pairs: &[&DensityMatrix]) -> Result<DensityMatrix> {
    let n = pairs.len();
    let nq = 2 * n;
    let dim = 1usize << nq;
    // (a bit, b bit) of pair k inside a register index
    let local = |idx: usize, k: usize| -> usize {
        let a = idx >> (nq - 1 - k) & 1;
        let b = idx >> (nq - 1 - (n + k)) & 1;
        2 * a + b
    };
    let locals: Vec<Vec<usize>> = (0..dim)
        .map(|idx| (0..n).map(|k| local(idx, k)).collect())
        .collect();
    let mut data = Vec::with_capacity(dim * dim);
    for li in &locals {
        for lj in &locals {
            let mut v = C64::new(1.0, 0.0);
            for (k, pair) in pairs.iter().enumerate() {
                v *= pair.get(li[k], lj[k]);
                if v == C64::new(0.0, 0.0) {
                    break;
                }
            }
            data.push(v);
        }
    }
    DensityMatrix::from_entries(nq, data)
}

/// Execution step after scheduling.
enum Step<'c> {
    Op(&'c Instruction),
    Discard(usize),
}

/// Moves every measurement (and the discard of idle sacrificial qubits) to just
/// after the last gate touching that qubit. Measurements commute with gates on
/// other qubits, so the protocol is unchanged while later gates act on smaller
/// registers.
fn schedule(circuit: &PurificationCircuit) -> Vec<Step<'_>> {
    let n = circuit.n_pairs;
    let mut steps: Vec<Step> = Vec::with_capacity(circuit.ops.len() + 2 * n);
    // position after the last gate touching each qubit
    let mut ready = vec![0usize; 2 * n];
    for op in &circuit.ops {
        let qs = op.qubits(n);
        if op.is_measurement() {
            let at = ready[qs[0]];
            steps.insert(at, Step::Op(op));
            for r in ready.iter_mut() {
                if *r >= at {
                    *r += 1;
                }
            }
        } else {
            steps.push(Step::Op(op));
            for q in qs {
                ready[q] = steps.len();
            }
        }
    }
    let measured: Vec<usize> = circuit
        .ops
        .iter()
        .filter(|op| op.is_measurement())
        .flat_map(|op| op.qubits(n))
        .collect();
    let output = [OUTPUT_PAIR, n + OUTPUT_PAIR];
    let mut idle: Vec<usize> = (0..2 * n)
        .filter(|q| !output.contains(q) && !measured.contains(q))
        .collect();
    // insert from the back so earlier positions stay valid
    idle.sort_by_key(|&q| (std::cmp::Reverse(ready[q]), std::cmp::Reverse(q)));
    for q in idle {
        steps.insert(ready[q], Step::Discard(q));
    }
    steps
}

struct Branch {
    records: u64,
    state: DensityMatrix,
}

/// Exact simulation with every measurement branch enumerated.
pub fn simulate<'a>(
    circuit: &PurificationCircuit,
    inputs: impl Into<PairInputs<'a>>,
    noise: &NoiseModel,
) -> Result<ProtocolOutcome> {
    simulate_detailed(circuit, inputs, noise).map(|r| r.outcome)
}

/// [`simulate`] plus the probability of every record assignment.
pub fn simulate_detailed<'a>(
    circuit: &PurificationCircuit,
    inputs: impl Into<PairInputs<'a>>,
    noise: &NoiseModel,
) -> Result<SimulationReport> {
    circuit.validate()?;
    noise.validate()?;
    let n = circuit.n_pairs;
    let pairs = inputs.into().resolve(n)?;
    let initial = joint_state(&pairs)?;
    let norm = initial.trace().re;

    let labels: Vec<String> = circuit.labels().into_iter().map(String::from).collect();
    let label_index = circuit.label_indices();

    // register position of each logical qubit, None once removed
    let mut position: Vec<Option<usize>> = (0..2 * n).map(Some).collect();
    let remove = |position: &mut Vec<Option<usize>>, q: usize| {
        let p = position[q].take().expect("qubit present");
        for slot in position.iter_mut().flatten() {
            if *slot > p {
                *slot -= 1;
            }
        }
        p
    };

    let mut branches = vec![Branch {
        records: 0,
        state: initial,
    }];
    for step in schedule(circuit) {
        match step {
            Step::Discard(q) => {
                let p = remove(&mut position, q);
                for b in &mut branches {
                    let keep: Vec<usize> = (0..b.state.num_qubits()).filter(|&k| k != p).collect();
                    b.state = b.state.partial_trace(&keep)?;
                }
            }
            Step::Op(op) => match op {
                Instruction::Cnot {
                    side,
                    control,
                    target,
                }
                | Instruction::Cz {
                    side,
                    control,
                    target,
                } => {
                    let c = position[side.qubit(*control, n)].expect("validated");
                    let t = position[side.qubit(*target, n)].expect("validated");
                    let is_cnot = matches!(op, Instruction::Cnot { .. });
                    for b in &mut branches {
                        if is_cnot {
                            b.state.apply_cnot(c, t)?;
                        } else {
                            b.state.apply_cz(c, t)?;
                        }
                        b.state.depolarize(&[c, t], noise.p2)?;
                    }
                }
                Instruction::Clifford { pair, side, index } => {
                    let q = position[side.qubit(*pair, n)].expect("validated");
                    let m = index.matrix();
                    for b in &mut branches {
                        if index.index() != 0 {
                            b.state.apply_single(&m, q)?;
                        }
                        b.state.depolarize(&[q], noise.p1)?;
                    }
                }
                Instruction::Measure {
                    pair,
                    side,
                    basis,
                    label,
                } => {
                    let bit = 1u64 << label_index[label.as_str()];
                    let p = remove(&mut position, side.qubit(*pair, n));
                    let pm = noise.p_meas;
                    let mut next = Vec::with_capacity(2 * branches.len());
                    for mut b in branches {
                        if let Some(u) = basis.rotation_to_z() {
                            b.state.apply_single(&u, p)?;
                        }
                        let (mut zero, mut one) = b.state.measure_z_discard(p)?;
                        if pm > 0.0 {
                            let z = zero.clone();
                            zero.scale(1.0 - pm);
                            zero.add_scaled(&one, pm);
                            one.scale(1.0 - pm);
                            one.add_scaled(&z, pm);
                        }
                        next.push(Branch {
                            records: b.records,
                            state: zero,
                        });
                        next.push(Branch {
                            records: b.records | bit,
                            state: one,
                        });
                    }
                    branches = next;
                }
            },
        }
    }

    let a0 = position[OUTPUT_PAIR].expect("output kept");
    let b0 = position[n + OUTPUT_PAIR].expect("output kept");
    let constraints: Vec<(usize, usize, _)> = circuit
        .accept
        .iter()
        .map(|c| {
            (
                label_index[c.labels[0].as_str()],
                label_index[c.labels[1].as_str()],
                c.relation,
            )
        })
        .collect();
    let mut accepted = DensityMatrix::from_entries(2, vec![C64::new(0.0, 0.0); 16])?;
    let mut records = Vec::with_capacity(branches.len());
    for b in &branches {
        let out = if b.state.num_qubits() == 2 {
            b.state.clone()
        } else {
            b.state.partial_trace(&[a0, b0])?
        };
        let bit = |i: usize| (b.records >> i & 1) as u8;
        let ok = constraints
            .iter()
            .all(|&(i, j, rel)| rel.holds(bit(i), bit(j)));
        let probability = out.trace().re / norm;
        if ok {
            accepted.add_scaled(&out, 1.0 / norm);
        }
        records.push(BranchRecord {
            records: (0..labels.len()).map(bit).collect(),
            probability,
            accepted: ok,
        });
    }
    let success_probability = accepted.trace().re;
    let output_fidelity = if success_probability > 0.0 {
        accepted.scale(1.0 / success_probability);
        fidelity_to_bell(&accepted, BellKind::PhiPlus)?
    } else {
        0.0
    };
    Ok(SimulationReport {
        outcome: ProtocolOutcome {
            output_fidelity,
            success_probability,
            output_state: accepted,
        },
        labels,
        branches: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::purification::circuit::{Constraint, Relation, Side};
    use crate::quantum::{bell_state, stephenson_pair, Basis, Clifford};

    fn bbpssw() -> PurificationCircuit {
        let mut c = PurificationCircuit::identity(2);
        for side in Side::BOTH {
            c.ops.push(Instruction::Cnot {
                side,
                control: 0,
                target: 1,
            });
        }
        for (side, label) in [(Side::A, "c1"), (Side::B, "c3")] {
            c.ops.push(Instruction::Measure {
                pair: 1,
                side,
                basis: Basis::Z,
                label: label.into(),
            });
        }
        c.accept.push(Constraint {
            labels: ["c1".into(), "c3".into()],
            relation: Relation::Coincident,
        });
        c
    }

    #[test]
    fn joint_state_layout() {
        let p0 = DensityMatrix::basis_state(2, 0b10).unwrap(); // A0=1, B0=0
        let p1 = DensityMatrix::basis_state(2, 0b01).unwrap(); // A1=0, B1=1
        let j = joint_state(&[&p0, &p1]).unwrap();
        // register order A0 A1 B0 B1 = 1 0 0 1
        assert_eq!(j, DensityMatrix::basis_state(4, 0b1001).unwrap());
    }

    #[test]
    fn identity_protocol() {
        let phi = bell_state(BellKind::PhiPlus);
        let out = simulate(
            &PurificationCircuit::identity(3),
            &phi,
            &NoiseModel::noiseless(),
        )
        .unwrap();
        assert!((out.success_probability - 1.0).abs() < 1e-12);
        assert!((out.output_fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn werner_bbpssw_round() {
        let w = crate::quantum::BellDiagonalState::werner(0.94)
            .unwrap()
            .to_density();
        let out = simulate(&bbpssw(), &w, &NoiseModel::noiseless()).unwrap();
        let f: f64 = 0.94;
        let e = (1.0 - f) / 3.0;
        let norm = f * f + 2.0 * f * e * 1.0 + 5.0 * e * e;
        assert!((out.success_probability - norm).abs() < 1e-12);
        assert!((out.output_fidelity - (f * f + e * e) / norm).abs() < 1e-12);
    }

    #[test]
    fn contradictory_constraints_never_accept() {
        let mut c = bbpssw();
        c.accept.push(Constraint {
            labels: ["c1".into(), "c3".into()],
            relation: Relation::Anticoincident,
        });
        let out = simulate(&c, &stephenson_pair(true), &NoiseModel::trapped_ion()).unwrap();
        assert_eq!(out.success_probability, 0.0);
        assert_eq!(out.output_fidelity, 0.0);
    }

    #[test]
    fn wrong_inputs_rejected() {
        let phi = bell_state(BellKind::PhiPlus);
        let two = vec![phi.clone(), phi.clone()];
        assert!(simulate(
            &PurificationCircuit::identity(3),
            &two,
            &NoiseModel::noiseless()
        )
        .is_err());
        let big = DensityMatrix::zero_state(3).unwrap();
        assert!(simulate(
            &PurificationCircuit::identity(2),
            &big,
            &NoiseModel::noiseless()
        )
        .is_err());
        let bad_noise = NoiseModel {
            p1: 2.0,
            p2: 0.0,
            p_meas: 0.0,
        };
        assert!(simulate(&PurificationCircuit::identity(2), &phi, &bad_noise).is_err());
    }

    #[test]
    fn schedule_hoists_measurements() {
        let mut c = PurificationCircuit::identity(3);
        c.ops.push(Instruction::Cnot {
            side: Side::A,
            control: 0,
            target: 1,
        });
        c.ops.push(Instruction::Clifford {
            pair: 0,
            side: Side::A,
            index: Clifford::new(4).unwrap(),
        });
        c.ops.push(Instruction::Measure {
            pair: 1,
            side: Side::A,
            basis: Basis::X,
            label: "m".into(),
        });
        let steps = schedule(&c);
        let kinds: Vec<String> = steps
            .iter()
            .map(|s| match s {
                Step::Op(Instruction::Cnot { .. }) => "cnot".to_string(),
                Step::Op(Instruction::Clifford { .. }) => "clifford".to_string(),
                Step::Op(Instruction::Measure { .. }) => "measure".to_string(),
                Step::Op(_) => "other".to_string(),
                Step::Discard(q) => format!("discard{q}"),
            })
            .collect();
        // idle B1 and both halves of pair 2 are dropped up front
        assert_eq!(
            kinds,
            ["discard2", "discard4", "discard5", "cnot", "measure", "clifford"]
        );
    }

    #[test]
    fn branch_probabilities_normalize() {
        let report = simulate_detailed(
            &bbpssw(),
            &stephenson_pair(true),
            &NoiseModel::new(1e-3, 5e-3, 1e-2).unwrap(),
        )
        .unwrap();
        let total: f64 = report.branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(report.branches.len(), 4);
        assert_eq!(report.labels, ["c1", "c3"]);
    }
}
