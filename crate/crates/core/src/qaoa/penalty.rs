use serde::{Deserialize, Serialize};

use super::{check_qubits, QaoaError};
use crate::bitstring::BitString;

/// Locality penalty relative to a reference assignment.
///
/// The penalty Hamiltonian is `−½ Σ_j A w_j (−1)^{ref_j} Z_j`. Its diagonal
/// satisfies `P(b) − P(ref) = A Σ_{j : b_j ≠ ref_j} w_j`, i.e. moving away
/// from the reference costs `A w_j` per flipped variable. Unit weights give
/// `A` times the Hamming distance; one-flip move values as weights bias the
/// circuit toward improving flips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub weights: Vec<f64>,
    pub reference: BitString,
    pub scale: f64,
}

impl PenaltySpec {
    pub fn new(weights: Vec<f64>, reference: BitString, scale: f64) -> Result<Self, QaoaError> {
        if weights.len() != reference.len() {
            return Err(QaoaError::PenaltyLength {
                expected: reference.len(),
                found: weights.len(),
            });
        }
        Ok(Self {
            weights,
            reference,
            scale,
        })
    }

    /// Unit weights: the penalty is `A` times the Hamming distance to `reference`.
    pub fn hamming(reference: BitString, scale: f64) -> Self {
        Self {
            weights: vec![1.0; reference.len()],
            reference,
            scale,
        }
    }

    pub fn k(&self) -> usize {
        self.reference.len()
    }
}

/// Diagonal of the penalty Hamiltonian over all `2^k` assignments.
pub fn penalty_diagonal(spec: &PenaltySpec) -> Result<Vec<f64>, QaoaError> {
    let k = spec.k();
    if spec.weights.len() != k {
        return Err(QaoaError::PenaltyLength {
            expected: k,
            found: spec.weights.len(),
        });
    }
    check_qubits(k)?;
    // coefficient of Z_j; Z_j is +1 on bit 0 and −1 on bit 1
    let coeff: Vec<f64> = (0..k)
        .map(|j| {
            let parity = if spec.reference.get(j) { -1.0 } else { 1.0 };
            -0.5 * spec.scale * spec.weights[j] * parity
        })
        .collect();
    let mut diag = vec![0.0; 1 << k];
    diag[0] = coeff.iter().sum();
    for (t, &c) in coeff.iter().enumerate() {
        let half = 1usize << t;
        let (done, rest) = diag.split_at_mut(half);
        for (slot, &v) in rest[..half].iter_mut().zip(done.iter()) {
            *slot = v - 2.0 * c;
        }
    }
    Ok(diag)
}
