use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::purification::{Constraint, Instruction, PurificationCircuit, Relation, Side};
use crate::quantum::{Basis, Clifford};

/// A bilateral operation: the same gate on both nodes (a Clifford `C` on
/// side A is paired with `C*` on side B so `phi+` stays invariant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GateGene {
    Cnot { control: usize, target: usize },
    Cz { control: usize, target: usize },
    Clifford { pair: usize, index: Clifford },
}

/// How sacrificial pair `i` is read out: both halves in `basis`, accepted
/// when the two records satisfy `relation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasureGene {
    pub basis: Basis,
    pub relation: Relation,
}

/// Fixed-capacity slot list (`None` is a no-op) plus one readout gene per
/// sacrificial pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Genome {
    pub n_pairs: usize,
    pub slots: Vec<Option<GateGene>>,
    pub readout: Vec<MeasureGene>,
}

const BASES: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

fn random_pair_indices<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let control = rng.gen_range(0..n);
    let mut target = rng.gen_range(0..n - 1);
    if target >= control {
        target += 1;
    }
    (control, target)
}

impl GateGene {
    pub fn random<R: Rng>(rng: &mut R, n_pairs: usize) -> Self {
        match rng.gen_range(0..5) {
            0 | 1 => {
                let (control, target) = random_pair_indices(rng, n_pairs);
                GateGene::Cnot { control, target }
            }
            2 => {
                let (control, target) = random_pair_indices(rng, n_pairs);
                GateGene::Cz { control, target }
            }
            _ => GateGene::Clifford {
                pair: rng.gen_range(0..n_pairs),
                index: Clifford::new(rng.gen_range(1..Clifford::COUNT)).expect("in range"),
            },
        }
    }

    fn push_instructions(&self, ops: &mut Vec<Instruction>) {
        for side in Side::BOTH {
            ops.push(match *self {
                GateGene::Cnot { control, target } => Instruction::Cnot {
                    side,
                    control,
                    target,
                },
                GateGene::Cz { control, target } => Instruction::Cz {
                    side,
                    control,
                    target,
                },
                GateGene::Clifford { pair, index } => Instruction::Clifford {
                    pair,
                    side,
                    index: match side {
                        Side::A => index,
                        Side::B => index.conjugate(),
                    },
                },
            });
        }
    }
}

impl MeasureGene {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Self {
            basis: BASES[rng.gen_range(0..3)],
            relation: if rng.gen_bool(0.5) {
                Relation::Coincident
            } else {
                Relation::Anticoincident
            },
        }
    }
}

/// Record label of a register qubit.
pub fn record_label(qubit: usize) -> String {
    format!("c{qubit}")
}

impl Genome {
    /// Random genome; each slot is filled with probability one half.
    pub fn random<R: Rng>(rng: &mut R, n_pairs: usize, max_ops: usize) -> Self {
        let slots = (0..max_ops)
            .map(|_| rng.gen_bool(0.5).then(|| GateGene::random(rng, n_pairs)))
            .collect();
        let readout = (1..n_pairs).map(|_| MeasureGene::random(rng)).collect();
        Self {
            n_pairs,
            slots,
            readout,
        }
    }

    pub fn active_ops(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    /// The circuit this genome encodes. Gates come first, then every
    /// sacrificial pair is measured on both sides, so decoded circuits always
    /// satisfy the circuit invariants.
    pub fn decode(&self) -> PurificationCircuit {
        let n = self.n_pairs;
        let mut ops = Vec::with_capacity(2 * self.slots.len() + 2 * n);
        for gene in self.slots.iter().flatten() {
            gene.push_instructions(&mut ops);
        }
        let mut accept = Vec::with_capacity(n - 1);
        for (k, gene) in self.readout.iter().enumerate() {
            let pair = k + 1;
            let labels = [record_label(pair), record_label(n + pair)];
            for (side, label) in Side::BOTH.into_iter().zip(labels.iter()) {
                ops.push(Instruction::Measure {
                    pair,
                    side,
                    basis: gene.basis,
                    label: label.clone(),
                });
            }
            accept.push(Constraint {
                labels,
                relation: gene.relation,
            });
        }
        PurificationCircuit {
            n_pairs: n,
            ops,
            accept,
        }
    }

    /// Single cut point over the concatenated slot and readout genes.
    pub fn crossover<R: Rng>(&self, other: &Genome, rng: &mut R) -> (Genome, Genome) {
        let len = self.slots.len() + self.readout.len();
        let cut = rng.gen_range(1..len.max(2));
        let mut a = self.clone();
        let mut b = other.clone();
        for i in cut..len {
            if i < self.slots.len() {
                std::mem::swap(&mut a.slots[i], &mut b.slots[i]);
            } else {
                let j = i - self.slots.len();
                std::mem::swap(&mut a.readout[j], &mut b.readout[j]);
            }
        }
        (a, b)
    }

    /// Each slot and readout gene mutates independently with probability `rate`.
    /// Slots are inserted into, deleted, or redrawn; readouts toggle their
    /// relation or change basis.
    pub fn mutate<R: Rng>(&mut self, rate: f64, rng: &mut R) {
        let n = self.n_pairs;
        let cap = self.slots.len();
        let mut i = 0;
        while i < cap {
            if rng.gen_bool(rate) {
                match rng.gen_range(0..3) {
                    0 => {
                        // insert, dropping the last slot
                        self.slots.pop();
                        self.slots.insert(i, Some(GateGene::random(rng, n)));
                        i += 1;
                    }
                    1 => {
                        self.slots.remove(i);
                        self.slots.push(None);
                    }
                    _ => self.slots[i] = Some(GateGene::random(rng, n)),
                }
            }
            i += 1;
        }
        for gene in &mut self.readout {
            if rng.gen_bool(rate) {
                if rng.gen_bool(0.5) {
                    gene.relation = gene.relation.toggled();
                } else {
                    let others: Vec<Basis> =
                        BASES.iter().copied().filter(|b| *b != gene.basis).collect();
                    gene.basis = others[rng.gen_range(0..others.len())];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn decoded_circuits_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=5 {
            for _ in 0..200 {
                let mut g = Genome::random(&mut rng, n, 10);
                g.mutate(0.5, &mut rng);
                let other = Genome::random(&mut rng, n, 10);
                let (a, b) = g.crossover(&other, &mut rng);
                for x in [&g, &a, &b] {
                    assert_eq!(x.slots.len(), 10);
                    assert_eq!(x.readout.len(), n - 1);
                    x.decode().validate().unwrap();
                }
            }
        }
    }

    #[test]
    fn labels_follow_register_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = Genome::random(&mut rng, 3, 4).decode();
        assert_eq!(c.labels(), ["c1", "c4", "c2", "c5"]);
        assert_eq!(c.accept[1].labels, ["c2".to_string(), "c5".to_string()]);
    }

    #[test]
    fn bilateral_clifford_uses_conjugate() {
        let g = Genome {
            n_pairs: 2,
            slots: vec![Some(GateGene::Clifford {
                pair: 0,
                index: Clifford::new(8).unwrap(),
            })],
            readout: vec![MeasureGene {
                basis: Basis::Z,
                relation: Relation::Coincident,
            }],
        };
        let c = g.decode();
        match (&c.ops[0], &c.ops[1]) {
            (
                Instruction::Clifford { index: a, .. },
                Instruction::Clifford { index: b, side, .. },
            ) => {
                assert_eq!(*side, Side::B);
                assert_eq!(*b, a.conjugate());
            }
            _ => panic!("expected two Clifford instructions"),
        }
    }
}
