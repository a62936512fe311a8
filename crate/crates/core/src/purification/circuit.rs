use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{Basis, Clifford};

pub const MIN_PAIRS: usize = 2;
pub const MAX_PAIRS: usize = 5;
/// Pair whose two halves carry the protocol output.
pub const OUTPUT_PAIR: usize = 0;

/// Which node of the link an instruction acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::A, Side::B];

    /// Register index of this side's half of `pair`.
    /// Side A holds qubits `0..n`, side B holds `n..2n`.
    pub fn qubit(self, pair: usize, n_pairs: usize) -> usize {
        match self {
            Side::A => pair,
            Side::B => n_pairs + pair,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instruction {
    Cnot {
        side: Side,
        control: usize,
        target: usize,
    },
    Cz {
        side: Side,
        control: usize,
        target: usize,
    },
    Clifford {
        pair: usize,
        side: Side,
        index: Clifford,
    },
    Measure {
        pair: usize,
        side: Side,
        basis: Basis,
        label: String,
    },
}

impl Instruction {
    /// Register qubits touched, for a circuit over `n_pairs` pairs.
    pub fn qubits(&self, n_pairs: usize) -> Vec<usize> {
        match self {
            Instruction::Cnot {
                side,
                control,
                target,
            }
            | Instruction::Cz {
                side,
                control,
                target,
            } => vec![side.qubit(*control, n_pairs), side.qubit(*target, n_pairs)],
            Instruction::Clifford { pair, side, .. } | Instruction::Measure { pair, side, .. } => {
                vec![side.qubit(*pair, n_pairs)]
            }
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self, Instruction::Measure { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// Both records equal.
    Coincident,
    /// Records differ.
    Anticoincident,
}

impl Relation {
    pub fn holds(self, a: u8, b: u8) -> bool {
        match self {
            Relation::Coincident => a == b,
            Relation::Anticoincident => a != b,
        }
    }

    pub fn toggled(self) -> Self {
        match self {
            Relation::Coincident => Relation::Anticoincident,
            Relation::Anticoincident => Relation::Coincident,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub labels: [String; 2],
    pub relation: Relation,
}

/// An `n -> 1` purification protocol: gates and measurements over `n_pairs`
/// Bell pairs, accepted when every classical constraint holds. The output is
/// always pair 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PurificationCircuit {
    pub n_pairs: usize,
    pub ops: Vec<Instruction>,
    #[serde(default)]
    pub accept: Vec<Constraint>,
}

impl PurificationCircuit {
    /// Circuit with no operations; returns pair 0 untouched.
    pub fn identity(n_pairs: usize) -> Self {
        Self {
            n_pairs,
            ops: Vec::new(),
            accept: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        2 * self.n_pairs
    }

    /// Labels in measurement order.
    pub fn labels(&self) -> Vec<&str> {
        self.ops
            .iter()
            .filter_map(|op| match op {
                Instruction::Measure { label, .. } => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        if !(MIN_PAIRS..=MAX_PAIRS).contains(&self.n_pairs) {
            return bad(format!(
                "n_pairs = {} outside {MIN_PAIRS}..={MAX_PAIRS}",
                self.n_pairs
            ));
        }
        let n = self.n_pairs;
        let mut measured: HashSet<usize> = HashSet::new();
        let mut labels: HashSet<&str> = HashSet::new();
        for (k, op) in self.ops.iter().enumerate() {
            match op {
                Instruction::Cnot {
                    control, target, ..
                }
                | Instruction::Cz {
                    control, target, ..
                } => {
                    if *control >= n || *target >= n {
                        return bad(format!("op {k}: pair index out of range"));
                    }
                    if control == target {
                        return bad(format!("op {k}: control equals target"));
                    }
                }
                Instruction::Clifford { pair, .. } => {
                    if *pair >= n {
                        return bad(format!("op {k}: pair {pair} out of range"));
                    }
                }
                Instruction::Measure { pair, label, .. } => {
                    if *pair >= n {
                        return bad(format!("op {k}: pair {pair} out of range"));
                    }
                    if *pair == OUTPUT_PAIR {
                        return bad(format!("op {k}: the output pair is never measured"));
                    }
                    if !labels.insert(label.as_str()) {
                        return bad(format!("op {k}: duplicate label {label:?}"));
                    }
                }
            }
            for q in op.qubits(n) {
                if measured.contains(&q) {
                    return bad(format!("op {k}: qubit {q} used after its measurement"));
                }
            }
            if let Instruction::Measure { .. } = op {
                measured.extend(op.qubits(n));
            }
        }
        for c in &self.accept {
            for l in &c.labels {
                if !labels.contains(l.as_str()) {
                    return bad(format!("accept references unknown label {l:?}"));
                }
            }
            if c.labels[0] == c.labels[1] {
                return bad(format!("accept relates {:?} to itself", c.labels[0]));
            }
        }
        Ok(())
    }

    /// Index of each label in measurement order.
    pub(crate) fn label_indices(&self) -> HashMap<&str, usize> {
        self.labels()
            .into_iter()
            .enumerate()
            .map(|(i, l)| (l, i))
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

impl fmt::Display for PurificationCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Side| match s {
            Side::A => "a",
            Side::B => "b",
        };
        writeln!(f, "{} -> 1 over {} qubits", self.n_pairs, self.num_qubits())?;
        for op in &self.ops {
            match op {
                Instruction::Cnot {
                    side: s,
                    control,
                    target,
                } => writeln!(f, "  cnot[{}] {control} -> {target}", side(s))?,
                Instruction::Cz {
                    side: s,
                    control,
                    target,
                } => writeln!(f, "  cz[{}] {control} - {target}", side(s))?,
                Instruction::Clifford {
                    pair,
                    side: s,
                    index,
                } => writeln!(f, "  {}[{}] pair {pair}", index.name(), side(s))?,
                Instruction::Measure {
                    pair,
                    side: s,
                    basis,
                    label,
                } => writeln!(f, "  measure {basis:?}[{}] pair {pair} -> {label}", side(s))?,
            }
        }
        for c in &self.accept {
            let rel = match c.relation {
                Relation::Coincident => "==",
                Relation::Anticoincident => "!=",
            };
            writeln!(f, "  accept {} {rel} {}", c.labels[0], c.labels[1])?;
        }
        Ok(())
    }
}
