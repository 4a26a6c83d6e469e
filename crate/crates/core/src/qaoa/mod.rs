//! Exact statevector simulation of depth-p QAOA on small problems.
//!
//! The state of `k` qubits is a dense vector of `2^k` amplitudes. Bit `j` of
//! an amplitude's index is the value of (sub)problem variable `j`, so index
//! `b` corresponds to [`BitString::from_index(b, k)`](BitString::from_index).
//! Qubit state |0⟩ is bit 0 (spin +1).
//!
//! Each layer `i` applies
//!
//! 1. the cost phase `exp(−i γ_i E(b))` with `E` the problem's objective,
//! 2. optionally the penalty phase `exp(−i γ_i P(b))` (see [`PenaltySpec`]),
//! 3. the mixer `exp(−i β_i X)` on every qubit,
//!
//! starting from the uniform superposition.

use std::sync::Arc;

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::qubo::{Qubo, SubProblem};

mod dump;
mod penalty;

pub use penalty::{penalty_diagonal, PenaltySpec};

/// Largest supported register (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QaoaError {
    #[error("{k} qubits requested, at most {max} supported")]
    TooManyQubits { k: usize, max: usize },
    #[error("{gammas} cost angles but {betas} mixer angles")]
    AngleCountMismatch { gammas: usize, betas: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("penalty covers {found} variables, problem has {expected}")]
    PenaltyLength { expected: usize, found: usize },
    #[error("number of samples must be at least 1")]
    ZeroSamples,
    #[error("state dump limited to {max} qubits, state has {k}")]
    DumpTooLarge { k: usize, max: usize },
    #[error("state dump failed: {0}")]
    Dump(String),
}

/// Angles for a depth-p circuit and an optional penalty layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    #[serde(default)]
    pub penalty: Option<PenaltySpec>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self, QaoaError> {
        let params = Self {
            gammas,
            betas,
            penalty: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Splits a flat angle vector laid out as `[γ_1..γ_p, β_1..β_p]`.
    pub fn from_flat(angles: &[f64]) -> Result<Self, QaoaError> {
        if !angles.len().is_multiple_of(2) {
            return Err(QaoaError::AngleCountMismatch {
                gammas: angles.len().div_ceil(2),
                betas: angles.len() / 2,
            });
        }
        let p = angles.len() / 2;
        Self::new(angles[..p].to_vec(), angles[p..].to_vec())
    }

    pub fn with_penalty(mut self, penalty: PenaltySpec) -> Self {
        self.penalty = Some(penalty);
        self
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    fn validate(&self) -> Result<(), QaoaError> {
        if self.gammas.len() != self.betas.len() {
            return Err(QaoaError::AngleCountMismatch {
                gammas: self.gammas.len(),
                betas: self.betas.len(),
            });
        }
        if self.gammas.is_empty() {
            return Err(QaoaError::ZeroDepth);
        }
        Ok(())
    }
}

fn check_qubits(k: usize) -> Result<(), QaoaError> {
    if k > MAX_QUBITS {
        return Err(QaoaError::TooManyQubits { k, max: MAX_QUBITS });
    }
    Ok(())
}

/// Objective value of every assignment of a problem with at most
/// [`MAX_QUBITS`] variables, indexed as described in the module docs.
pub fn diagonal_energies(q: &Qubo) -> Result<Vec<f64>, QaoaError> {
    let k = q.n();
    check_qubits(k)?;
    let mut energies = vec![0.0; 1 << k];
    energies[0] = q.offset();
    // Setting bit t on top of any lower-index assignment adds its linear term
    // plus couplings to the lower variables that are set.
    for t in 0..k {
        let half = 1usize << t;
        let lin = q.linear(t);
        let lower: Vec<(usize, f64)> = q
            .neighbors(t)
            .iter()
            .copied()
            .filter(|&(j, _)| j < t)
            .collect();
        let (done, rest) = energies.split_at_mut(half);
        for (b, slot) in rest[..half].iter_mut().enumerate() {
            let mut v = done[b] + lin;
            for &(j, c) in &lower {
                if (b >> j) & 1 == 1 {
                    v += c;
                }
            }
            *slot = v;
        }
    }
    Ok(energies)
}

/// Reusable simulator for one problem: the energy table (and penalty, when
/// configured) is computed once and shared by every evolution.
#[derive(Debug, Clone)]
pub struct QaoaSimulator {
    k: usize,
    energies: Arc<[f64]>,
    penalty: Option<Vec<f64>>,
}

impl QaoaSimulator {
    pub fn new(sub: &SubProblem) -> Result<Self, QaoaError> {
        Self::for_qubo(sub.reduced())
    }

    pub fn for_qubo(q: &Qubo) -> Result<Self, QaoaError> {
        let energies = diagonal_energies(q)?;
        Ok(Self {
            k: q.n(),
            energies: energies.into(),
            penalty: None,
        })
    }

    pub fn with_penalty(mut self, spec: &PenaltySpec) -> Result<Self, QaoaError> {
        if spec.weights.len() != self.k {
            return Err(QaoaError::PenaltyLength {
                expected: self.k,
                found: spec.weights.len(),
            });
        }
        self.penalty = Some(penalty_diagonal(spec)?);
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn energies(&self) -> &Arc<[f64]> {
        &self.energies
    }

    pub fn penalty(&self) -> Option<&[f64]> {
        self.penalty.as_deref()
    }

    /// The |+⟩^⊗k state.
    pub fn uniform_state(&self) -> QaoaState {
        QaoaState::uniform(self.energies.clone())
    }

    pub fn evolve(&self, gammas: &[f64], betas: &[f64]) -> Result<QaoaState, QaoaError> {
        if gammas.len() != betas.len() {
            return Err(QaoaError::AngleCountMismatch {
                gammas: gammas.len(),
                betas: betas.len(),
            });
        }
        if gammas.is_empty() {
            return Err(QaoaError::ZeroDepth);
        }
        let mut state = self.uniform_state();
        for (&gamma, &beta) in gammas.iter().zip(betas) {
            state.apply_layer(gamma, beta, self.penalty.as_deref());
        }
        Ok(state)
    }

    /// Evolves with a flat `[γ_1..γ_p, β_1..β_p]` angle vector.
    pub fn evolve_flat(&self, angles: &[f64]) -> Result<QaoaState, QaoaError> {
        let p = angles.len() / 2;
        if !angles.len().is_multiple_of(2) {
            return Err(QaoaError::AngleCountMismatch {
                gammas: p + 1,
                betas: p,
            });
        }
        self.evolve(&angles[..p], &angles[p..])
    }
}

/// Runs the full circuit described by `params` on a subproblem.
pub fn evolve(sub: &SubProblem, params: &QaoaParams) -> Result<QaoaState, QaoaError> {
    params.validate()?;
    let mut sim = QaoaSimulator::new(sub)?;
    if let Some(spec) = &params.penalty {
        sim = sim.with_penalty(spec)?;
    }
    sim.evolve(&params.gammas, &params.betas)
}

/// Amplitudes over all `2^k` assignments together with their energies.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaState {
    amplitudes: Vec<Complex64>,
    energies: Arc<[f64]>,
}

impl QaoaState {
    pub fn uniform(energies: Arc<[f64]>) -> Self {
        let dim = energies.len();
        assert!(dim.is_power_of_two(), "energy table length must be 2^k");
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
            energies,
        }
    }

    /// The computational basis state `|index⟩`.
    pub fn basis(index: usize, energies: Arc<[f64]>) -> Self {
        let dim = energies.len();
        assert!(dim.is_power_of_two(), "energy table length must be 2^k");
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            energies,
        }
    }

    /// Wraps arbitrary amplitudes; the caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, energies: Arc<[f64]>) -> Self {
        assert_eq!(amplitudes.len(), energies.len(), "amplitude/energy length");
        assert!(
            energies.len().is_power_of_two(),
            "energy table length must be 2^k"
        );
        Self {
            amplitudes,
            energies,
        }
    }

    pub fn k(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies amplitude `b` by `exp(−i γ diag[b])`.
    pub fn apply_phase(&mut self, gamma: f64, diag: &[f64]) {
        assert_eq!(diag.len(), self.amplitudes.len(), "diagonal length");
        for (a, &d) in self.amplitudes.iter_mut().zip(diag) {
            *a *= Complex64::from_polar(1.0, -gamma * d);
        }
    }

    /// Applies `exp(−i β X)` to every qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let minus_is = Complex64::new(0.0, -s);
        let dim = self.amplitudes.len();
        for q in 0..self.k() {
            let stride = 1usize << q;
            for block in (0..dim).step_by(stride << 1) {
                for lo in block..block + stride {
                    let hi = lo + stride;
                    let a0 = self.amplitudes[lo];
                    let a1 = self.amplitudes[hi];
                    self.amplitudes[lo] = a0 * c + a1 * minus_is;
                    self.amplitudes[hi] = a0 * minus_is + a1 * c;
                }
            }
        }
    }

    /// One QAOA layer: cost phase, optional penalty phase (same γ), mixer.
    pub fn apply_layer(&mut self, gamma: f64, beta: f64, penalty: Option<&[f64]>) {
        let energies = self.energies.clone();
        self.apply_phase(gamma, &energies);
        if let Some(p) = penalty {
            self.apply_phase(gamma, p);
        }
        self.apply_mixer(beta);
    }

    /// `Σ_b |a_b|² E(b)` over the (unpenalized) energies.
    pub fn exact_expectation(&self) -> f64 {
        self.amplitudes
            .iter()
            .zip(self.energies.iter())
            .map(|(a, e)| a.norm_sqr() * e)
            .sum()
    }

    /// Probability mass on assignments with energy strictly below `f_ref`.
    pub fn improvement_probability(&self, f_ref: f64) -> f64 {
        self.amplitudes
            .iter()
            .zip(self.energies.iter())
            .filter(|(_, &e)| e < f_ref)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }

    /// Draws `m` measurement outcomes as state indices.
    pub fn sample_indices<R: Rng + ?Sized>(
        &self,
        m: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>, QaoaError> {
        if m == 0 {
            return Err(QaoaError::ZeroSamples);
        }
        let dist = WeightedIndex::new(self.amplitudes.iter().map(|a| a.norm_sqr()))
            .expect("a normalized state has positive total weight");
        Ok((0..m).map(|_| dist.sample(rng)).collect())
    }

    /// Draws `m` measurement outcomes with their energies.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        m: usize,
        rng: &mut R,
    ) -> Result<Vec<(BitString, f64)>, QaoaError> {
        let k = self.k();
        Ok(self
            .sample_indices(m, rng)?
            .into_iter()
            .map(|b| (BitString::from_index(b, k), self.energies[b]))
            .collect())
    }

    /// Mean energy of `m` measurement outcomes.
    pub fn shot_expectation<R: Rng + ?Sized>(
        &self,
        m: usize,
        rng: &mut R,
    ) -> Result<f64, QaoaError> {
        let idx = self.sample_indices(m, rng)?;
        Ok(idx.iter().map(|&b| self.energies[b]).sum::<f64>() / m as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn single(c: f64) -> QaoaSimulator {
        QaoaSimulator::for_qubo(&Qubo::from_terms(1, [(0, 0, c)]).unwrap()).unwrap()
    }

    #[test]
    fn energies_single_variable() {
        let q = Qubo::from_terms(1, [(0, 0, -3.0)]).unwrap();
        assert_eq!(diagonal_energies(&q).unwrap(), vec![0.0, -3.0]);
    }

    #[test]
    fn energies_zero_problem() {
        let q = crate::QuboBuilder::new(3).offset(2.5).build();
        assert_eq!(diagonal_energies(&q).unwrap(), vec![2.5; 8]);
    }

    #[test]
    fn energies_match_evaluate() {
        let q = Qubo::from_terms(
            4,
            [
                (0, 0, 1.0),
                (0, 3, -2.0),
                (1, 2, 4.0),
                (2, 2, -1.5),
                (1, 3, 0.5),
                (3, 3, 2.0),
            ],
        )
        .unwrap();
        let e = diagonal_energies(&q).unwrap();
        for (b, &v) in e.iter().enumerate() {
            assert_eq!(v, q.evaluate(&BitString::from_index(b, 4)).unwrap());
        }
    }

    #[test]
    fn too_many_qubits() {
        let q = Qubo::zero(MAX_QUBITS + 1);
        assert_eq!(
            diagonal_energies(&q),
            Err(QaoaError::TooManyQubits { k: 25, max: 24 })
        );
    }

    #[test]
    fn identity_circuit_is_uniform() {
        let q = Qubo::from_terms(3, [(0, 1, 2.0), (2, 2, -1.0)]).unwrap();
        let sim = QaoaSimulator::for_qubo(&q).unwrap();
        let st = sim.evolve(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        for p in st.probabilities() {
            assert!((p - 0.125).abs() < 1e-15);
        }
        let mean = sim.energies().iter().sum::<f64>() / 8.0;
        assert!((st.exact_expectation() - mean).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_closed_form() {
        let c = 1.7;
        let (gamma, beta) = (0.4, 1.1);
        let st = single(c).evolve(&[gamma], &[beta]).unwrap();
        let p = st.probabilities();
        let z = p[0] - p[1];
        let expected = -(2.0 * beta).sin() * (gamma * c).sin();
        assert!((z - expected).abs() < 1e-12, "{z} vs {expected}");
    }

    #[test]
    fn basis_state_expectations_and_samples() {
        let sim = single(5.0);
        let st = QaoaState::basis(1, sim.energies().clone());
        assert_eq!(st.exact_expectation(), 5.0);
        let mut rng = seeded_rng(3, 0);
        assert_eq!(st.shot_expectation(17, &mut rng).unwrap(), 5.0);
        let samples = st.sample(10, &mut rng).unwrap();
        assert!(samples
            .iter()
            .all(|(b, e)| b.to_string() == "1" && *e == 5.0));
        assert_eq!(st.sample(0, &mut rng), Err(QaoaError::ZeroSamples));
    }

    #[test]
    fn sampling_is_seeded() {
        let q = Qubo::from_terms(3, [(0, 1, 2.0), (2, 2, -1.0), (0, 0, 1.0)]).unwrap();
        let st = QaoaSimulator::for_qubo(&q)
            .unwrap()
            .evolve(&[0.3], &[0.8])
            .unwrap();
        let a = st.shot_expectation(100, &mut seeded_rng(9, 0)).unwrap();
        let b = st.shot_expectation(100, &mut seeded_rng(9, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn params_validation() {
        assert_eq!(
            QaoaParams::new(vec![0.1], vec![]),
            Err(QaoaError::AngleCountMismatch {
                gammas: 1,
                betas: 0
            })
        );
        assert_eq!(QaoaParams::new(vec![], vec![]), Err(QaoaError::ZeroDepth));
        let p = QaoaParams::from_flat(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(p.gammas, vec![0.1, 0.2]);
        assert_eq!(p.betas, vec![0.3, 0.4]);
    }
}
