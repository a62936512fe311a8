//! Measured ion-ion entangled state used as the realistic purification input.

use super::{DensityMatrix, C64};

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Raw density matrix as reported by the interferometer experiment.
const UNROTATED: [[C64; 4]; 4] = [
    [
        c(0.01, 0.0),
        c(-0.00487616, 0.00349614),
        c(0.0135924, 0.00634402),
        c(0.00374015, -0.00331833),
    ],
    [
        c(-0.00487616, -0.00349614),
        c(0.569, 0.0),
        c(0.0542638, 0.440672),
        c(-0.012985, -0.0292471),
    ],
    [
        c(0.0135924, -0.00634402),
        c(0.0542638, -0.440672),
        c(0.416, 0.0),
        c(-0.0225074, -0.00473484),
    ],
    [
        c(0.00374015, 0.00331833),
        c(-0.012985, 0.0292471),
        c(-0.0225074, 0.00473484),
        c(0.005, 0.0),
    ],
];

/// Locally rotated copy whose dominant component is `phi+`.
const ROTATED: [[C64; 4]; 4] = [
    [
        c(0.569, 0.0),
        c(-0.00487616, -0.00349614),
        c(-0.0292471, 0.012985),
        c(0.440672, -0.0542638),
    ],
    [
        c(-0.00487616, 0.00349614),
        c(0.01, 0.0),
        c(-0.00331833, -0.00374015),
        c(0.00634402, -0.0135924),
    ],
    [
        c(-0.0292471, -0.012985),
        c(-0.00331833, 0.00374015),
        c(0.005, 0.0),
        c(-0.0225074, 0.00473484),
    ],
    [
        c(0.440672, 0.0542638),
        c(0.00634402, 0.0135924),
        c(-0.0225074, -0.00473484),
        c(0.416, 0.0),
    ],
];

/// The measured pair, verbatim. `rotated = true` gives the `phi+`-aligned version
/// (`phi+` fidelity 0.933172).
///
/// The tabulated rotated matrix equals `(S ⊗ X) rho (S ⊗ X)^†` applied to the raw
/// one, see [`apply_alignment`].
pub fn stephenson_pair(rotated: bool) -> DensityMatrix {
    let src = if rotated { &ROTATED } else { &UNROTATED };
    let data = src.iter().flatten().copied().collect();
    DensityMatrix::from_entries(2, data).expect("4x4 constant")
}

/// `(S ⊗ X) rho (S ⊗ X)^†`, the local rotation relating the two tabulated matrices.
pub fn apply_alignment(state: &DensityMatrix) -> crate::Result<DensityMatrix> {
    let mut out = state.clone();
    out.apply_single(&super::gates::PHASE_S, 0)?;
    out.apply_single(&super::gates::PAULI_X, 1)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unrotated_diagonal() {
        let s = stephenson_pair(false);
        let diag: Vec<f64> = (0..4).map(|i| s.get(i, i).re).collect();
        assert_eq!(diag, vec![0.01, 0.569, 0.416, 0.005]);
    }

    #[test]
    fn both_tables_are_states() {
        for rotated in [false, true] {
            let s = stephenson_pair(rotated);
            s.validate().unwrap();
            assert!(s.hermiticity_error() == 0.0);
            assert!(s.min_eigenvalue() > 0.0);
        }
    }

    #[test]
    fn alignment_maps_raw_to_rotated() {
        let aligned = apply_alignment(&stephenson_pair(false)).unwrap();
        assert!(aligned.max_abs_diff(&stephenson_pair(true)) < 1e-12);
    }
}
