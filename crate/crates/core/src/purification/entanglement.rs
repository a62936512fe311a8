use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::DensityMatrix;

/// Mutual information above this many bits marks two outputs as correlated.
pub const CORRELATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub first: usize,
    pub second: usize,
    /// `S(A) + S(B) - S(AB)` in bits.
    pub mutual_information: f64,
    /// Mutual information of computational-basis readouts, in bits.
    pub classical_mutual_information: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub correlations: Vec<PairCorrelation>,
}

impl EntanglementReport {
    pub fn any_flagged(&self) -> bool {
        self.correlations.iter().any(|c| c.flagged)
    }
}

/// Von Neumann entropy in bits.
pub fn entropy_bits(state: &DensityMatrix) -> f64 {
    state
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > 1e-14)
        .map(|l| -l * l.log2())
        .sum()
}

fn shannon_bits(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter()
        .filter(|&x| x > 1e-15)
        .map(|x| -x * x.log2())
        .sum()
}

/// Pairwise correlations between the output pairs of a multi-output protocol.
///
/// `pairs` lists the register qubits `(a, b)` of every output pair. A single
/// output pair yields an empty report.
pub fn marginal_entanglement_check(
    state: &DensityMatrix,
    pairs: &[(usize, usize)],
) -> Result<EntanglementReport> {
    let mut report = EntanglementReport::default();
    for (i, &(a1, b1)) in pairs.iter().enumerate() {
        for (j, &(a2, b2)) in pairs.iter().enumerate().skip(i + 1) {
            let mut joint_q = vec![a1, b1, a2, b2];
            joint_q.sort_unstable();
            joint_q.dedup();
            if joint_q.len() != 4 {
                return Err(Error::InvalidParameter(format!(
                    "output pairs {i} and {j} share a qubit"
                )));
            }
            let joint = state.partial_trace(&joint_q)?;
            let sorted = |x: usize, y: usize| if x < y { [x, y] } else { [y, x] };
            let first = state.partial_trace(&sorted(a1, b1))?;
            let second = state.partial_trace(&sorted(a2, b2))?;
            let mi = entropy_bits(&first) + entropy_bits(&second) - entropy_bits(&joint);

            // readout distribution over the four bits in sorted register order
            let pos = |q: usize| joint_q.iter().position(|&x| x == q).unwrap();
            let bits = |idx: usize, q: usize| idx >> (3 - pos(q)) & 1;
            let mut pj = [[0.0f64; 4]; 4];
            for idx in 0..16 {
                let u = 2 * bits(idx, a1) + bits(idx, b1);
                let v = 2 * bits(idx, a2) + bits(idx, b2);
                pj[u][v] += joint.get(idx, idx).re;
            }
            let pu = (0..4).map(|u| pj[u].iter().sum::<f64>());
            let pv = (0..4).map(|v| (0..4).map(|u| pj[u][v]).sum::<f64>());
            let cmi =
                shannon_bits(pu) + shannon_bits(pv) - shannon_bits(pj.iter().flatten().copied());

            report.correlations.push(PairCorrelation {
                first: i,
                second: j,
                mutual_information: mi.max(0.0),
                classical_mutual_information: cmi.max(0.0),
                flagged: mi > CORRELATION_THRESHOLD,
            });
        }
    }
    Ok(report)
}
