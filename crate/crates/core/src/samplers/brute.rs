use super::{NeighborhoodSampler, SamplerContext, SamplerError};
use crate::bitstring::BitString;
use crate::qaoa::{diagonal_energies, QaoaError};
use crate::qubo::SubProblem;
use crate::SearchRng;

/// Exhaustive minimum of the subproblem; ties go to the lowest state index.
pub fn brute_force_best(sub: &SubProblem) -> Result<BitString, QaoaError> {
    let energies = diagonal_energies(sub.reduced())?;
    let mut best = 0;
    for (b, &e) in energies.iter().enumerate() {
        if e < energies[best] {
            best = b;
        }
    }
    Ok(BitString::from_index(best, sub.k()))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForce;

impl NeighborhoodSampler for BruteForce {
    fn sample_best(
        &mut self,
        sub: &SubProblem,
        _ctx: &SamplerContext,
        _rng: &mut SearchRng,
    ) -> Result<BitString, SamplerError> {
        Ok(brute_force_best(sub)?)
    }

    fn label(&self) -> String {
        "brute-force".into()
    }
}
