use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Mat2, C64, MAX_QUBITS};
use crate::error::{Error, Result};

/// Tolerances used by [`DensityMatrix::validate`].
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
/// Measured input data may carry small negative eigenvalues.
pub const PSD_TOL: f64 = -1e-7;

/// Dense mixed state of up to [`MAX_QUBITS`] qubits.
///
/// Entries are stored row-major in the computational basis `|q0 q1 ... q_{n-1}>`
/// with `q0` the most significant bit of the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    num_qubits: usize,
    data: Vec<C64>,
}

#[inline]
fn shift_of(num_qubits: usize, qubit: usize) -> usize {
    num_qubits - 1 - qubit
}

/// Inserts `bit` at position `shift` of `value`, moving higher bits up by one.
#[inline]
fn insert_bit(value: usize, shift: usize, bit: usize) -> usize {
    let low = value & ((1 << shift) - 1);
    let high = value >> shift;
    (high << (shift + 1)) | (bit << shift) | low
}

impl DensityMatrix {
    fn check_size(num_qubits: usize) -> Result<()> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        Ok(())
    }

    /// `|0...0><0...0|`.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        data[0] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, data })
    }

    /// Computational basis projector `|index><index|`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        Self::check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        data[index * dim + index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, data })
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        Self::check_size(num_qubits)?;
        let dim = 1 << num_qubits;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        let w = 1.0 / dim as f64;
        for i in 0..dim {
            data[i * dim + i] = C64::new(w, 0.0);
        }
        Ok(Self { num_qubits, data })
    }

    /// Projector onto a (not necessarily normalized) pure state.
    pub fn from_pure(amplitudes: &[C64]) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidState(format!(
                "state vector length {dim} is not a power of two"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        Self::check_size(num_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm <= 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for a in amplitudes {
            for b in amplitudes {
                data.push(a * b.conj() / norm);
            }
        }
        Ok(Self { num_qubits, data })
    }

    /// Wraps raw row-major entries without checking the state invariants.
    /// Call [`validate`](Self::validate) when the data comes from outside.
    pub fn from_entries(num_qubits: usize, data: Vec<C64>) -> Result<Self> {
        Self::check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { num_qubits, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (self.data[i * dim + j] - self.data[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            (self.data[i * dim + j] + self.data[j * dim + i].conj()) * 0.5
        });
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Checks Hermiticity, unit trace and positivity within the module tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (error {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(())
    }

    /// Largest entrywise distance to another state of the same size.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.num_qubits, other.num_qubits);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `<psi| rho |psi>` for a normalized state vector.
    pub fn expectation_pure(&self, psi: &[C64]) -> Result<f64> {
        let dim = self.dim();
        if psi.len() != dim {
            return Err(Error::WrongDimension {
                expected: psi.len().trailing_zeros() as usize,
                actual: self.num_qubits,
            });
        }
        let mut acc = C64::new(0.0, 0.0);
        for (i, a) in psi.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let row = &self.data[i * dim..(i + 1) * dim];
            let inner: C64 = row.iter().zip(psi).map(|(r, b)| r * b).sum();
            acc += a.conj() * inner;
        }
        Ok(acc.re)
    }

    pub fn scale(&mut self, factor: f64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }

    /// `self += weight * other`.
    pub fn add_scaled(&mut self, other: &Self, weight: f64) {
        assert_eq!(self.num_qubits, other.num_qubits);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * weight;
        }
    }

    pub(crate) fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits(n));
        }
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for ia in 0..da {
            for ja in 0..da {
                let a = self.data[ia * da + ja];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..db {
                    let row = (ia * db + ib) * dim + ja * db;
                    let src = &other.data[ib * db..(ib + 1) * db];
                    for (dst, b) in data[row..row + db].iter_mut().zip(src) {
                        *dst = a * b;
                    }
                }
            }
        }
        Ok(Self {
            num_qubits: n,
            data,
        })
    }

    /// Reduced state on `keep` (sorted, distinct); the result keeps their order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        for (k, &q) in keep.iter().enumerate() {
            self.check_qubit(q)?;
            if k > 0 && keep[k - 1] >= q {
                return Err(if keep[k - 1] == q {
                    Error::DuplicateQubit(q)
                } else {
                    Error::InvalidParameter("keep list must be sorted".into())
                });
            }
        }
        if keep.len() == self.num_qubits {
            return Ok(self.clone());
        }
        let n = self.num_qubits;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let spread = |bits: usize, qubits: &[usize]| -> usize {
            let k = qubits.len();
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if bits >> (k - 1 - pos) & 1 == 1 {
                    acc | 1 << shift_of(n, q)
                } else {
                    acc
                }
            })
        };
        let kept_offsets: Vec<usize> = (0..1 << keep.len()).map(|b| spread(b, keep)).collect();
        let traced_offsets: Vec<usize> =
            (0..1 << traced.len()).map(|b| spread(b, &traced)).collect();
        let dim_in = self.dim();
        let dim_out = kept_offsets.len();
        let mut data = vec![C64::new(0.0, 0.0); dim_out * dim_out];
        for (r, &ro) in kept_offsets.iter().enumerate() {
            for (c, &co) in kept_offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &t in &traced_offsets {
                    acc += self.data[(ro | t) * dim_in + (co | t)];
                }
                data[r * dim_out + c] = acc;
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            data,
        })
    }

    /// In-place `U rho U^†` for a single-qubit unitary.
    pub fn apply_single(&mut self, u: &Mat2, qubit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let dim = self.dim();
        let mask = 1 << shift_of(self.num_qubits, qubit);
        // rows: U rho
        for i0 in (0..dim).filter(|i| i & mask == 0) {
            let i1 = i0 | mask;
            for j in 0..dim {
                let a = self.data[i0 * dim + j];
                let b = self.data[i1 * dim + j];
                self.data[i0 * dim + j] = u[0][0] * a + u[0][1] * b;
                self.data[i1 * dim + j] = u[1][0] * a + u[1][1] * b;
            }
        }
        // columns: (U rho) U^†
        let c = [
            [u[0][0].conj(), u[0][1].conj()],
            [u[1][0].conj(), u[1][1].conj()],
        ];
        for i in 0..dim {
            let row = &mut self.data[i * dim..(i + 1) * dim];
            for j0 in (0..dim).filter(|j| j & mask == 0) {
                let j1 = j0 | mask;
                let a = row[j0];
                let b = row[j1];
                row[j0] = a * c[0][0] + b * c[0][1];
                row[j1] = a * c[1][0] + b * c[1][1];
            }
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::DuplicateQubit(a));
        }
        Ok(())
    }

    /// In-place CNOT conjugation; a basis permutation, so exact.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_pair(control, target)?;
        let cm = 1 << shift_of(self.num_qubits, control);
        let tm = 1 << shift_of(self.num_qubits, target);
        let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
        self.permute(perm);
        Ok(())
    }

    /// In-place CZ conjugation.
    pub fn apply_cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.check_pair(a, b)?;
        let am = 1 << shift_of(self.num_qubits, a);
        let bm = 1 << shift_of(self.num_qubits, b);
        let both = am | bm;
        let dim = self.dim();
        for i in 0..dim {
            let si = i & both == both;
            for j in 0..dim {
                if si != (j & both == both) {
                    self.data[i * dim + j] = -self.data[i * dim + j];
                }
            }
        }
        Ok(())
    }

    /// `rho[i][j] <- rho[p(i)][p(j)]` for an involutive index permutation `p`.
    fn permute(&mut self, perm: impl Fn(usize) -> usize) {
        let dim = self.dim();
        let old = std::mem::take(&mut self.data);
        let map: Vec<usize> = (0..dim).map(&perm).collect();
        let mut data = Vec::with_capacity(dim * dim);
        for &pi in &map {
            let row = &old[pi * dim..(pi + 1) * dim];
            data.extend(map.iter().map(|&pj| row[pj]));
        }
        self.data = data;
    }

    /// Depolarizing channel on one or two qubits:
    /// `(1-p) rho + p * (uniform mixture over the 3 or 15 non-identity Paulis)`.
    ///
    /// The Pauli sum is evaluated through the identity
    /// `sum_P P rho P = 4^k (I/2^k ⊗ Tr_targets rho)`.
    pub fn depolarize(&mut self, targets: &[usize], p: f64) -> Result<()> {
        crate::error::check_probability("depolarizing probability", p)?;
        let masks: Vec<usize> = match *targets {
            [q] => {
                self.check_qubit(q)?;
                vec![1 << shift_of(self.num_qubits, q)]
            }
            [a, b] => {
                self.check_pair(a, b)?;
                vec![
                    1 << shift_of(self.num_qubits, a),
                    1 << shift_of(self.num_qubits, b),
                ]
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "depolarizing noise acts on one or two qubits".into(),
                ))
            }
        };
        if p == 0.0 {
            return Ok(());
        }
        let k = masks.len();
        let blocks = 1usize << k;
        // lambda * (I/2^k ⊗ Tr rho) + (1 - lambda) rho, lambda = 4^k p / (4^k - 1)
        let lambda = (blocks * blocks) as f64 * p / ((blocks * blocks) as f64 - 1.0);
        let keep = 1.0 - lambda;
        let all: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..blocks)
            .map(|b| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(pos, _)| b >> (k - 1 - pos) & 1 == 1)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();
        let dim = self.dim();
        for i in (0..dim).filter(|i| i & all == 0) {
            for j in (0..dim).filter(|j| j & all == 0) {
                let mut reduced = C64::new(0.0, 0.0);
                for &o in &offsets {
                    reduced += self.data[(i | o) * dim + (j | o)];
                }
                let mixed = reduced * (lambda / blocks as f64);
                for &ro in &offsets {
                    for &co in &offsets {
                        let idx = (i | ro) * dim + (j | co);
                        self.data[idx] *= keep;
                        if ro == co {
                            self.data[idx] += mixed;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Unnormalized `<b|_q rho |b>_q` on the remaining qubits, for `b` in {0, 1}.
    /// The traces of the two parts are the Z-outcome probabilities times `trace(rho)`.
    pub fn measure_z_discard(&self, qubit: usize) -> Result<(Self, Self)> {
        self.check_qubit(qubit)?;
        if self.num_qubits == 1 {
            return Err(Error::EmptyKeep);
        }
        let shift = shift_of(self.num_qubits, qubit);
        let dim_in = self.dim();
        let dim = dim_in / 2;
        let mut parts = [
            vec![C64::new(0.0, 0.0); dim * dim],
            vec![C64::new(0.0, 0.0); dim * dim],
        ];
        for (b, part) in parts.iter_mut().enumerate() {
            for r in 0..dim {
                let ri = insert_bit(r, shift, b);
                let src = &self.data[ri * dim_in..(ri + 1) * dim_in];
                for c in 0..dim {
                    part[r * dim + c] = src[insert_bit(c, shift, b)];
                }
            }
        }
        let [zero, one] = parts;
        let n = self.num_qubits - 1;
        Ok((
            Self {
                num_qubits: n,
                data: zero,
            },
            Self {
                num_qubits: n,
                data: one,
            },
        ))
    }

    /// Zeroes every entry whose row or column has `qubit` different from `bit`.
    pub(crate) fn project_z(&mut self, qubit: usize, bit: usize) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = 1 << shift_of(self.num_qubits, qubit);
        let want = if bit == 0 { 0 } else { mask };
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                if i & mask != want || j & mask != want {
                    self.data[i * dim + j] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn insert_bit_places_bit() {
        assert_eq!(insert_bit(0b11, 1, 0), 0b101);
        assert_eq!(insert_bit(0b11, 0, 0), 0b110);
        assert_eq!(insert_bit(0b00, 2, 1), 0b100);
    }

    #[test]
    fn size_limits() {
        assert!(DensityMatrix::zero_state(0).is_err());
        assert!(DensityMatrix::zero_state(MAX_QUBITS + 1).is_err());
        let a = DensityMatrix::zero_state(6).unwrap();
        let b = DensityMatrix::zero_state(5).unwrap();
        assert!(matches!(a.tensor(&b), Err(Error::TooManyQubits(11))));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = DensityMatrix::basis_state(1, 0).unwrap();
        let b = DensityMatrix::basis_state(1, 1).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.partial_trace(&[0]).unwrap(), a);
        assert_eq!(ab.partial_trace(&[1]).unwrap(), b);
        assert_eq!(ab.partial_trace(&[0, 1]).unwrap(), ab);
        assert!(matches!(ab.partial_trace(&[]), Err(Error::EmptyKeep)));
        assert!(ab.partial_trace(&[1, 0]).is_err());
        assert!(ab.partial_trace(&[2]).is_err());
    }

    #[test]
    fn tensor_with_mixed_round_trips() {
        let psi = [c(0.6), C64::new(0.0, 0.8)];
        let a = DensityMatrix::from_pure(&psi).unwrap();
        let m = DensityMatrix::maximally_mixed(2).unwrap();
        let back = a.tensor(&m).unwrap().partial_trace(&[0]).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-15);
        let back = m.tensor(&a).unwrap().partial_trace(&[2]).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn cnot_and_cz_on_basis_states() {
        let mut s = DensityMatrix::basis_state(2, 0b10).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_eq!(s, DensityMatrix::basis_state(2, 0b11).unwrap());
        s.apply_cnot(1, 0).unwrap();
        assert_eq!(s, DensityMatrix::basis_state(2, 0b01).unwrap());
        assert!(s.apply_cnot(1, 1).is_err());
        assert!(s.apply_cz(0, 2).is_err());
    }

    #[test]
    fn measure_discard_splits_probability() {
        let psi = [c(0.6), c(0.0), c(0.0), c(0.8)];
        let s = DensityMatrix::from_pure(&psi).unwrap();
        let (zero, one) = s.measure_z_discard(0).unwrap();
        assert!((zero.trace().re - 0.36).abs() < 1e-15);
        assert!((one.trace().re - 0.64).abs() < 1e-15);
        assert!((zero.get(0, 0).re - 0.36).abs() < 1e-15);
        assert!((one.get(1, 1).re - 0.64).abs() < 1e-15);
    }

    #[test]
    fn validate_rejects_bad_states() {
        let bad = DensityMatrix::from_entries(1, vec![c(1.0), c(0.3), c(0.0), c(0.0)]).unwrap();
        assert!(bad.validate().is_err());
        let neg = DensityMatrix::from_entries(1, vec![c(1.5), c(0.0), c(0.0), c(-0.5)]).unwrap();
        assert!(neg.validate().is_err());
        DensityMatrix::maximally_mixed(3)
            .unwrap()
            .validate()
            .unwrap();
    }
}
