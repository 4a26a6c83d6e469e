//! Neighborhood samplers: given a clamped subproblem, propose the best
//! assignment of its free variables they can find.

use crate::angle_opt::OptError;
use crate::bitstring::BitString;
use crate::qaoa::{QaoaError, QaoaState};
use crate::qubo::{MoveTable, QuboError, SubProblem};
use crate::SearchRng;

mod anneal;
mod brute;
mod qaoa;

pub use anneal::{sa_best, sa_chain_bests, SaConfig, SimulatedAnnealing};
pub use brute::{brute_force_best, BruteForce};
pub use qaoa::{optimize_qaoa, qaoa_best, QaoaOutcome, QaoaRun, QaoaSampler, QaoaSamplerConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error(transparent)]
    Qaoa(#[from] QaoaError),
    #[error(transparent)]
    Optimizer(#[from] OptError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error("invalid sampler configuration: {0}")]
    Config(String),
}

/// What a sampler may know about the search state besides the subproblem,
/// restricted to the subproblem's variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerContext {
    /// Parent one-flip move values of the selected variables.
    pub deltas: Vec<f64>,
    /// Current solution restricted to the selected variables.
    pub reference: BitString,
}

impl SamplerContext {
    pub fn new(sub: &SubProblem, table: &MoveTable) -> Self {
        Self {
            deltas: table.select(sub.parent_indices()),
            reference: sub.reference(),
        }
    }

    /// Context without move information (zero weights).
    pub fn neutral(sub: &SubProblem) -> Self {
        Self {
            deltas: vec![0.0; sub.k()],
            reference: sub.reference(),
        }
    }
}

/// Proposes an assignment for the free variables of a subproblem.
///
/// Implementations must return a bit string of length `sub.k()` and must be
/// deterministic given the subproblem, context and RNG state.
pub trait NeighborhoodSampler {
    fn sample_best(
        &mut self,
        sub: &SubProblem,
        ctx: &SamplerContext,
        rng: &mut SearchRng,
    ) -> Result<BitString, SamplerError>;

    /// Short name used in reports.
    fn label(&self) -> String;
}

impl<S: NeighborhoodSampler + ?Sized> NeighborhoodSampler for Box<S> {
    fn sample_best(
        &mut self,
        sub: &SubProblem,
        ctx: &SamplerContext,
        rng: &mut SearchRng,
    ) -> Result<BitString, SamplerError> {
        (**self).sample_best(sub, ctx, rng)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// Probability that measuring `state` yields energy strictly below `f_ref`.
pub fn improvement_probability(state: &QaoaState, f_ref: f64) -> f64 {
    state.improvement_probability(f_ref)
}
