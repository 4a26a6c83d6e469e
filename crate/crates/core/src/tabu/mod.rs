//! Short-term-memory tabu search over one-bit-flip moves, and its variant
//! where a [`NeighborhoodSampler`](crate::samplers::NeighborhoodSampler)
//! proposes multi-bit moves on a clamped subproblem each iteration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;
use crate::qubo::{MoveTable, Qubo, QuboError};
use crate::samplers::SamplerError;

mod basic;
mod driven;
mod select;
mod trace;

pub use basic::basic_tabu_search;
pub use driven::sampler_tabu_search;
pub use select::select_variables;
pub use trace::{read_trace_csv, IterationRecord, RunTrace, Termination, TraceRow};

#[derive(Debug, thiserror::Error)]
pub enum TabuError {
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("iteration {iteration}: every variable is tabu and no move improves the best solution (tenure too large for {n} variables?)")]
    AllTabu { iteration: usize, n: usize },
    #[error("{available} non-tabu variables available, {k} requested")]
    TooFewCandidates { available: usize, k: usize },
    #[error("iteration {iteration}: sampler failed: {source}")]
    Sampler {
        iteration: usize,
        #[source]
        source: SamplerError,
    },
    #[error("iteration {iteration}: sampler returned {found} bits for a {k}-variable subproblem")]
    SamplerLength {
        iteration: usize,
        k: usize,
        found: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMode {
    /// The `k` non-tabu variables with the smallest move values.
    #[default]
    Greedy,
    /// `k` draws without replacement, weighted by move-value rank.
    WeightedRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabuParams {
    /// Tabu tenure `TT`.
    pub tenure: usize,
    /// Random tenure `rTT`; each tabu assignment adds a uniform draw from
    /// `1..=rTT`, or nothing when zero.
    pub rand_tenure: usize,
    pub max_iters: usize,
    /// Stop after this many consecutive iterations without a new best.
    #[serde(default)]
    pub improvement_cutoff: Option<usize>,
    /// Stop once the best value is at or below this (internal, minimized) value.
    #[serde(default)]
    pub target: Option<f64>,
    pub seed: u64,
    /// Subproblem size for the sampler-driven search.
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub selection: SelectionMode,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            tenure: 10,
            rand_tenure: 0,
            max_iters: 1000,
            improvement_cutoff: None,
            target: None,
            seed: 0,
            k: None,
            selection: SelectionMode::Greedy,
        }
    }
}

impl TabuParams {
    pub fn validate(&self, n: usize) -> Result<(), TabuError> {
        if self.max_iters == 0 {
            return Err(TabuError::Params("max_iters must be at least 1".into()));
        }
        if self.improvement_cutoff == Some(0) {
            return Err(TabuError::Params(
                "improvement cutoff must be positive".into(),
            ));
        }
        if let Some(k) = self.k {
            if k == 0 || k > n {
                return Err(TabuError::Params(format!(
                    "subproblem size {k} outside 1..={n}"
                )));
            }
        }
        if n == 0 {
            return Err(TabuError::Params("problem has no variables".into()));
        }
        Ok(())
    }
}

/// Mutable search state shared by both algorithms.
#[derive(Debug, Clone)]
pub struct TabuState {
    pub x_ts: BitString,
    pub x_best: BitString,
    pub f_ts: f64,
    pub f_best: f64,
    pub tabu: Vec<usize>,
    pub iteration: usize,
    pub moves: MoveTable,
    since_improvement: usize,
}

impl TabuState {
    pub fn new(q: &Qubo, x0: &BitString) -> Result<Self, TabuError> {
        let moves = MoveTable::new(q, x0)?;
        let f = q.evaluate(x0)?;
        Ok(Self {
            x_ts: x0.clone(),
            x_best: x0.clone(),
            f_ts: f,
            f_best: f,
            tabu: vec![0; q.n()],
            iteration: 0,
            moves,
            since_improvement: 0,
        })
    }

    pub fn non_tabu_count(&self) -> usize {
        self.tabu.iter().filter(|&&t| t == 0).count()
    }

    /// Why the search should stop before the next iteration, if it should.
    fn termination(&self, params: &TabuParams) -> Option<Termination> {
        if params.target.is_some_and(|t| self.f_best <= t) {
            Some(Termination::Target)
        } else if self.iteration >= params.max_iters {
            Some(Termination::MaxIters)
        } else if params
            .improvement_cutoff
            .is_some_and(|c| self.since_improvement >= c)
        {
            Some(Termination::Cutoff)
        } else {
            None
        }
    }

    /// Best admissible one-flip move: the non-tabu variable with the smallest
    /// move value (lowest index on ties). When every variable is tabu, a tabu
    /// move that would produce a new best solution is admitted instead.
    fn one_flip_move(&self) -> Result<usize, TabuError> {
        let deltas = self.moves.values();
        let argmin = |admit: &dyn Fn(usize) -> bool| {
            let mut best: Option<usize> = None;
            for (i, &d) in deltas.iter().enumerate() {
                if admit(i) && best.is_none_or(|b| d < deltas[b]) {
                    best = Some(i);
                }
            }
            best
        };
        argmin(&|i| self.tabu[i] == 0)
            .or_else(|| argmin(&|i| self.f_ts + deltas[i] < self.f_best))
            .ok_or(TabuError::AllTabu {
                iteration: self.iteration,
                n: deltas.len(),
            })
    }

    /// Flips `flips` one at a time, keeping the move table current.
    fn apply(&mut self, q: &Qubo, flips: &[usize]) -> Result<(), TabuError> {
        for &i in flips {
            self.f_ts += self.moves.apply_flip(q, &mut self.x_ts, i)?;
        }
        Ok(())
    }

    /// Best-solution bookkeeping and tabu update after the iteration's flips.
    fn commit<R: Rng>(&mut self, q: &Qubo, flips: &[usize], params: &TabuParams, rng: &mut R) {
        let aspiration = self.f_ts < self.f_best;
        if aspiration {
            // resync so f_best is exactly the objective of x_best
            self.f_ts = q.energy(&self.x_ts);
            self.f_best = self.f_ts;
            self.x_best = self.x_ts.clone();
            self.since_improvement = 0;
        } else {
            self.since_improvement += 1;
        }
        for t in self.tabu.iter_mut().filter(|t| **t > 0) {
            *t -= 1;
        }
        for &j in flips {
            self.tabu[j] = if aspiration {
                0
            } else {
                params.tenure + random_tenure(params.rand_tenure, rng)
            };
        }
    }

    fn record(
        &self,
        flipped: Vec<usize>,
        accepted: bool,
        candidate: Option<f64>,
    ) -> IterationRecord {
        IterationRecord {
            iteration: self.iteration,
            f_ts: self.f_ts,
            f_best: self.f_best,
            flipped,
            accepted,
            candidate,
        }
    }
}

/// Uniform draw from `1..=rtt`; zero when `rtt` is zero.
fn random_tenure<R: Rng>(rtt: usize, rng: &mut R) -> usize {
    if rtt == 0 {
        0
    } else {
        rng.gen_range(1..=rtt)
    }
}

/// Best solution found and the per-iteration trace.
#[derive(Debug, Clone)]
pub struct TabuOutcome {
    pub best: BitString,
    pub best_value: f64,
    pub trace: RunTrace,
}
