use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Qubo;
use crate::bitstring::BitString;

/// Spin-glass form `Σ h_i s_i + Σ_{i<j} J_ij s_i s_j + offset` over `s ∈ {−1,+1}^n`.
///
/// Spins relate to bits through `x = (1 − s) / 2`: spin +1 is bit 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub h: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn n(&self) -> usize {
        self.h.len()
    }

    /// Spin value of bit `x_i`.
    #[inline]
    pub fn spin(bit: bool) -> f64 {
        if bit {
            -1.0
        } else {
            1.0
        }
    }

    pub fn spins(x: &BitString) -> Vec<f64> {
        x.iter().map(Self::spin).collect()
    }

    /// Energy of a spin configuration, excluding the constant offset.
    pub fn energy(&self, spins: &[f64]) -> f64 {
        assert_eq!(spins.len(), self.n(), "spin vector length");
        let field: f64 = self.h.iter().zip(spins).map(|(h, s)| h * s).sum();
        let pair: f64 = self
            .couplings
            .iter()
            .map(|(&(i, j), &c)| c * spins[i] * spins[j])
            .sum();
        field + pair
    }
}

impl Qubo {
    pub fn to_ising(&self) -> IsingModel {
        let n = self.n();
        let mut h = vec![0.0; n];
        let mut couplings = BTreeMap::new();
        let mut offset = self.offset();
        for (i, j, q) in self.terms() {
            if i == j {
                // q (1 − s)/2
                offset += q / 2.0;
                h[i] -= q / 2.0;
            } else {
                // q (1 − s_i)(1 − s_j)/4
                offset += q / 4.0;
                h[i] -= q / 4.0;
                h[j] -= q / 4.0;
                couplings.insert((i, j), q / 4.0);
            }
        }
        IsingModel {
            h,
            couplings,
            offset,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        let c = 3.5;
        let m = Qubo::from_terms(1, [(0, 0, c)]).unwrap().to_ising();
        assert_eq!(m.h, vec![-c / 2.0]);
        assert_eq!(m.offset, c / 2.0);
        assert!(m.couplings.is_empty());
    }

    #[test]
    fn zero_problem() {
        let m = Qubo::zero(3).to_ising();
        assert_eq!(m.h, vec![0.0; 3]);
        assert!(m.couplings.is_empty());
        assert_eq!(m.offset, 0.0);
    }

    #[test]
    fn small_exhaustive() {
        let q = Qubo::from_terms(2, [(0, 0, 2.0), (0, 1, -3.0), (1, 1, 1.0)]).unwrap();
        let m = q.to_ising();
        for b in 0..4 {
            let x = BitString::from_index(b, 2);
            let e = m.energy(&IsingModel::spins(&x)) + m.offset;
            assert_eq!(e, q.evaluate(&x).unwrap(), "x = {x}");
        }
    }
}
