use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{NeighborhoodSampler, SamplerContext, SamplerError};
use crate::bitstring::BitString;
use crate::qubo::{MoveTable, SubProblem};
use crate::SearchRng;

/// Fixed-temperature Metropolis chains, best of `restarts`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub temperature: f64,
    pub steps: usize,
    pub restarts: usize,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            temperature: 17.5,
            steps: 100,
            restarts: 1,
        }
    }
}

impl SaConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(SamplerError::Config(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.steps == 0 || self.restarts == 0 {
            return Err(SamplerError::Config(
                "steps and restarts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Best assignment seen by each chain, one entry per restart.
///
/// Each chain starts from a uniformly random assignment and proposes
/// single-bit flips sweeping the variables in order (step `t` proposes
/// variable `t mod k`), accepting with probability `min(1, exp(−Δ/T))`.
pub fn sa_chain_bests<R: Rng + ?Sized>(
    sub: &SubProblem,
    cfg: &SaConfig,
    rng: &mut R,
) -> Result<Vec<(BitString, f64)>, SamplerError> {
    cfg.validate()?;
    let q = sub.reduced();
    let k = q.n();
    let mut out = Vec::with_capacity(cfg.restarts);
    for _ in 0..cfg.restarts {
        let mut x: BitString = (0..k).map(|_| rng.gen::<bool>()).collect();
        let mut table = MoveTable::new(q, &x)?;
        let mut f = q.evaluate(&x)?;
        let mut best = (x.clone(), f);
        if k == 0 {
            out.push(best);
            continue;
        }
        for t in 0..cfg.steps {
            let i = t % k;
            let d = table.get(i);
            let accept = d <= 0.0 || rng.gen::<f64>() < (-d / cfg.temperature).exp();
            if accept {
                f += table.apply_flip(q, &mut x, i)?;
                if f < best.1 {
                    best = (x.clone(), f);
                }
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Lowest-energy assignment over all chains (first chain wins ties).
pub fn sa_best<R: Rng + ?Sized>(
    sub: &SubProblem,
    cfg: &SaConfig,
    rng: &mut R,
) -> Result<BitString, SamplerError> {
    let chains = sa_chain_bests(sub, cfg, rng)?;
    let mut best = &chains[0];
    for c in &chains[1..] {
        if c.1 < best.1 {
            best = c;
        }
    }
    Ok(best.0.clone())
}

#[derive(Debug, Clone)]
pub struct SimulatedAnnealing(pub SaConfig);

impl NeighborhoodSampler for SimulatedAnnealing {
    fn sample_best(
        &mut self,
        sub: &SubProblem,
        _ctx: &SamplerContext,
        rng: &mut SearchRng,
    ) -> Result<BitString, SamplerError> {
        sa_best(sub, &self.0, rng)
    }

    fn label(&self) -> String {
        format!(
            "sa-T{}-s{}-r{}",
            self.0.temperature, self.0.steps, self.0.restarts
        )
    }
}
