use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{DensityMatrix, Mat2, C64};
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];
pub const HADAMARD: Mat2 = [
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)],
    [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(-FRAC_1_SQRT_2, 0.0)],
];
pub const PHASE_S: Mat2 = [[ONE, ZERO], [ZERO, I]];
pub const PHASE_S_DAG: Mat2 = [[ONE, ZERO], [ZERO, C64::new(0.0, -1.0)]];

pub fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn conj(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[0][1].conj()],
        [a[1][0].conj(), a[1][1].conj()],
    ]
}

/// Equality up to a global phase.
pub fn same_up_to_phase(a: &Mat2, b: &Mat2, tol: f64) -> bool {
    // <a, b> = Tr(a^† b) has modulus 2 iff b = e^{i t} a for unitaries.
    let mut inner = ZERO;
    for i in 0..2 {
        for j in 0..2 {
            inner += a[i][j].conj() * b[i][j];
        }
    }
    (inner.norm() - 2.0).abs() < tol
}

/// One of the 24 single-qubit Clifford operations (modulo global phase).
///
/// Index `4 * frame + pauli` denotes `P_pauli · F_frame` with
/// `F = [I, H, S, HS, SH, HSH]` (the six axis permutations) and
/// `P = [I, X, Y, Z]`. Index 0 is the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Clifford(u8);

impl TryFrom<u8> for Clifford {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Clifford::new(value as usize)
    }
}

impl From<Clifford> for u8 {
    fn from(c: Clifford) -> u8 {
        c.0
    }
}

pub const FRAME_NAMES: [&str; 6] = ["I", "H", "S", "HS", "SH", "HSH"];
pub const PAULI_NAMES: [&str; 4] = ["I", "X", "Y", "Z"];

struct CliffordTable {
    matrices: [Mat2; 24],
    conjugate: [u8; 24],
    inverse: [u8; 24],
}

fn table() -> &'static CliffordTable {
    static TABLE: OnceLock<CliffordTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = HADAMARD;
        let s = PHASE_S;
        let frames = [
            IDENTITY,
            h,
            s,
            matmul(&h, &s),
            matmul(&s, &h),
            matmul(&matmul(&h, &s), &h),
        ];
        let paulis = [IDENTITY, PAULI_X, PAULI_Y, PAULI_Z];
        let mut matrices = [IDENTITY; 24];
        for (f, frame) in frames.iter().enumerate() {
            for (p, pauli) in paulis.iter().enumerate() {
                matrices[4 * f + p] = matmul(pauli, frame);
            }
        }
        let find = |target: &Mat2| -> u8 {
            matrices
                .iter()
                .position(|m| same_up_to_phase(m, target, 1e-9))
                .expect("Clifford group is closed") as u8
        };
        let mut conjugate = [0u8; 24];
        let mut inverse = [0u8; 24];
        for k in 0..24 {
            let m = &matrices[k];
            conjugate[k] = find(&conj(m));
            let dagger = [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ];
            inverse[k] = find(&dagger);
        }
        CliffordTable {
            matrices,
            conjugate,
            inverse,
        }
    })
}

impl Clifford {
    pub const COUNT: usize = 24;
    pub const IDENTITY: Clifford = Clifford(0);

    pub fn new(index: usize) -> Result<Self> {
        if index < Self::COUNT {
            Ok(Self(index as u8))
        } else {
            Err(Error::InvalidParameter(format!(
                "Clifford index {index} not in 0..24"
            )))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Clifford> {
        (0..Self::COUNT as u8).map(Clifford)
    }

    pub fn matrix(self) -> Mat2 {
        table().matrices[self.index()]
    }

    /// The Clifford whose matrix is the complex conjugate of this one.
    /// `C ⊗ C*` leaves `|phi+>` invariant.
    pub fn conjugate(self) -> Clifford {
        Clifford(table().conjugate[self.index()])
    }

    pub fn inverse(self) -> Clifford {
        Clifford(table().inverse[self.index()])
    }

    pub fn name(self) -> String {
        let (f, p) = (self.index() / 4, self.index() % 4);
        match (f, p) {
            (0, 0) => "I".into(),
            (0, _) => PAULI_NAMES[p].into(),
            (_, 0) => FRAME_NAMES[f].into(),
            _ => format!("{}·{}", PAULI_NAMES[p], FRAME_NAMES[f]),
        }
    }
}

/// Named unitaries understood by [`apply_gate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    Clifford(Clifford),
    /// Arbitrary single-qubit unitary.
    Unitary(Mat2),
    Cnot,
    Cz,
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz => 2,
            _ => 1,
        }
    }

    pub fn single_matrix(&self) -> Option<Mat2> {
        Some(match self {
            Gate::X => PAULI_X,
            Gate::Y => PAULI_Y,
            Gate::Z => PAULI_Z,
            Gate::H => HADAMARD,
            Gate::S => PHASE_S,
            Gate::Sdg => PHASE_S_DAG,
            Gate::Clifford(c) => c.matrix(),
            Gate::Unitary(m) => *m,
            Gate::Cnot | Gate::Cz => return None,
        })
    }
}

/// `U rho U^†` on the given targets (control first for CNOT).
pub fn apply_gate(state: &DensityMatrix, gate: Gate, targets: &[usize]) -> Result<DensityMatrix> {
    let mut out = state.clone();
    apply_gate_in_place(&mut out, gate, targets)?;
    Ok(out)
}

pub(crate) fn apply_gate_in_place(
    state: &mut DensityMatrix,
    gate: Gate,
    targets: &[usize],
) -> Result<()> {
    if targets.len() != gate.arity() {
        return Err(Error::InvalidParameter(format!(
            "{gate:?} acts on {} qubit(s), got {} target(s)",
            gate.arity(),
            targets.len()
        )));
    }
    match gate {
        Gate::Cnot => state.apply_cnot(targets[0], targets[1]),
        Gate::Cz => state.apply_cz(targets[0], targets[1]),
        Gate::Clifford(c) if c == Clifford::IDENTITY => state.check_qubit(targets[0]),
        g => {
            let m = g.single_matrix().expect("single-qubit gate");
            state.apply_single(&m, targets[0])
        }
    }
}
