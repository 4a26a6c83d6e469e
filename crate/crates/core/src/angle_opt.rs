//! Budgeted derivative-free optimization of QAOA angles.
//!
//! The optimizer is a (μ/μ_w, λ) evolution strategy with self-adapted
//! per-coordinate step sizes. When a run stagnates it restarts, alternating
//! between a regime whose population doubles on every restart and a
//! small-population regime with reduced, randomized step sizes, choosing
//! whichever has consumed fewer evaluations so far. The objective is called
//! strictly sequentially and never more than `max_evals` times.
//!
//! Angles are laid out as `[γ_1..γ_p, β_1..β_p]` and are wrapped into the
//! initialization box before every evaluation, which for the default box
//! (`γ ∈ [0, 2π)`, `β ∈ [0, π)`) is the periodicity of the QAOA unitaries for
//! integer-valued energies.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::qaoa::{diagonal_energies, QaoaError};
use crate::qubo::SubProblem;
use crate::seeded_rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptError {
    #[error("objective returned {value} at angles {angles:?}")]
    NonFinite { angles: Vec<f64>, value: f64 },
    #[error("evaluation budget must be at least 1")]
    ZeroBudget,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("initialization box has {found} intervals, expected {expected}")]
    BoxLength { expected: usize, found: usize },
    #[error("interval {index} of the initialization box is empty or not finite")]
    BadInterval { index: usize },
    #[error("warm start has {found} angles, expected {expected}")]
    WarmStartLength { expected: usize, found: usize },
    #[error("history dump failed: {0}")]
    Dump(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestartStrategy {
    /// A single run; stops early if it stagnates.
    None,
    /// Restarts alternating between doubled and small populations.
    #[default]
    DoublingPopulation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptBudget {
    pub max_evals: usize,
    pub restarts: RestartStrategy,
    pub seed: u64,
    /// Per-angle `[lo, hi)` intervals; `None` means [`default_box`].
    #[serde(default)]
    pub init_box: Option<Vec<(f64, f64)>>,
    /// Mean of the first run, e.g. the best angles of a previous optimization.
    #[serde(default)]
    pub warm_start: Option<Vec<f64>>,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            restarts: RestartStrategy::DoublingPopulation,
            seed: 0,
            init_box: None,
            warm_start: None,
        }
    }
}

/// `γ ∈ [0, 2π)` for the first `p` angles, `β ∈ [0, π)` for the rest.
pub fn default_box(p: usize) -> Vec<(f64, f64)> {
    let mut b = vec![(0.0, 2.0 * PI); p];
    b.extend(std::iter::repeat_n((0.0, PI), p));
    b
}

/// Maps each angle into its `[lo, hi)` interval by periodicity.
pub fn wrap_angles(angles: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    angles
        .iter()
        .zip(bounds)
        .map(|(&a, &(lo, hi))| {
            let w = lo + (a - lo).rem_euclid(hi - lo);
            // rem_euclid may round up to the period itself
            if w >= hi {
                lo
            } else {
                w
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub angles: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_angles: Vec<f64>,
    pub best_value: f64,
    pub evals_used: usize,
    pub history: Vec<Evaluation>,
}

impl OptResult {
    /// Writes `eval,angle_0..angle_{2p-1},value` rows.
    pub fn write_history_csv<W: Write>(&self, writer: W) -> Result<(), OptError> {
        let err = |e: csv::Error| OptError::Dump(e.to_string());
        let mut w = csv::Writer::from_writer(writer);
        let dim = self.best_angles.len();
        let mut header = vec!["eval".to_string()];
        header.extend((0..dim).map(|i| format!("angle_{i}")));
        header.push("value".into());
        w.write_record(&header).map_err(err)?;
        for (i, e) in self.history.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(e.angles.iter().map(f64::to_string));
            row.push(e.value.to_string());
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| OptError::Dump(e.to_string()))
    }
}

/// Signals that the evaluation budget ran out mid-run.
struct Exhausted;

struct Evaluator<'a, F> {
    objective: &'a mut F,
    bounds: &'a [(f64, f64)],
    max_evals: usize,
    history: Vec<Evaluation>,
    best: usize,
}

impl<F: FnMut(&[f64]) -> f64> Evaluator<'_, F> {
    fn remaining(&self) -> usize {
        self.max_evals - self.history.len()
    }

    fn eval(&mut self, x: &[f64]) -> Result<Result<f64, Exhausted>, OptError> {
        if self.remaining() == 0 {
            return Ok(Err(Exhausted));
        }
        let angles = wrap_angles(x, self.bounds);
        let value = (self.objective)(&angles);
        if !value.is_finite() {
            return Err(OptError::NonFinite { angles, value });
        }
        if self.history.is_empty() || value < self.history[self.best].value {
            self.best = self.history.len();
        }
        self.history.push(Evaluation { angles, value });
        Ok(Ok(value))
    }

    fn best_value(&self) -> f64 {
        self.history[self.best].value
    }
}

/// One evolution-strategy run from `mean` with initial relative step `step`.
fn run_es<F, R>(
    ev: &mut Evaluator<'_, F>,
    rng: &mut R,
    mut mean: Vec<f64>,
    lambda: usize,
    step: f64,
) -> Result<Result<(), Exhausted>, OptError>
where
    F: FnMut(&[f64]) -> f64,
    R: Rng,
{
    let dim = mean.len();
    let widths: Vec<f64> = ev.bounds.iter().map(|(lo, hi)| hi - lo).collect();
    let mut sigma: Vec<f64> = widths.iter().map(|w| w * step).collect();
    let mu = (lambda / 2).max(1);
    let raw: Vec<f64> = (0..mu)
        .map(|i| ((mu as f64 + 0.5).ln() - ((i + 1) as f64).ln()).max(0.0))
        .collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let tau_global = 1.0 / (2.0 * dim as f64).sqrt();
    let tau_local = 1.0 / (2.0 * (dim as f64).sqrt()).sqrt();
    let stall_limit = 10 + (30.0 * dim as f64 / lambda as f64).ceil() as usize;

    let mut run_best = f64::INFINITY;
    let mut stalled = 0;
    loop {
        let mut offspring: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(lambda);
        for _ in 0..lambda {
            let global: f64 = rng.sample(StandardNormal);
            let steps: Vec<f64> = sigma
                .iter()
                .map(|s| {
                    let local: f64 = rng.sample(StandardNormal);
                    s * (tau_global * global + tau_local * local).exp()
                })
                .collect();
            let x: Vec<f64> = mean
                .iter()
                .zip(&steps)
                .map(|(m, s)| {
                    let z: f64 = rng.sample(StandardNormal);
                    m + s * z
                })
                .collect();
            let value = match ev.eval(&x)? {
                Ok(v) => v,
                Err(Exhausted) => return Ok(Err(Exhausted)),
            };
            offspring.push((value, x, steps));
        }
        offspring.sort_by(|a, b| a.0.total_cmp(&b.0));

        for d in 0..dim {
            mean[d] = offspring[..mu]
                .iter()
                .zip(&weights)
                .map(|((_, x, _), w)| w * x[d])
                .sum();
            sigma[d] = offspring[..mu]
                .iter()
                .zip(&weights)
                .map(|((_, _, s), w)| w * s[d].ln())
                .sum::<f64>()
                .exp()
                // a step wider than the period carries no information
                .min(widths[d]);
        }
        mean = wrap_angles(&mean, ev.bounds);

        let gen_best = offspring[0].0;
        if gen_best < run_best {
            run_best = gen_best;
            stalled = 0;
        } else {
            stalled += 1;
        }
        let collapsed = sigma.iter().zip(&widths).all(|(s, w)| s / w < 1e-9);
        let flat = offspring[lambda - 1].0 - offspring[0].0 <= 1e-12 * run_best.abs().max(1.0);
        if stalled >= stall_limit || collapsed || (flat && stalled > 0) {
            return Ok(Ok(()));
        }
    }
}

/// Minimizes `objective` over `2p` angles using at most `budget.max_evals`
/// evaluations. The first evaluation is always at all-zero angles.
pub fn optimize_angles<F>(
    mut objective: F,
    p: usize,
    budget: &OptBudget,
) -> Result<OptResult, OptError>
where
    F: FnMut(&[f64]) -> f64,
{
    if p == 0 {
        return Err(OptError::ZeroDepth);
    }
    if budget.max_evals == 0 {
        return Err(OptError::ZeroBudget);
    }
    let dim = 2 * p;
    let bounds = budget.init_box.clone().unwrap_or_else(|| default_box(p));
    if bounds.len() != dim {
        return Err(OptError::BoxLength {
            expected: dim,
            found: bounds.len(),
        });
    }
    for (index, &(lo, hi)) in bounds.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(OptError::BadInterval { index });
        }
    }
    if let Some(w) = &budget.warm_start {
        if w.len() != dim {
            return Err(OptError::WarmStartLength {
                expected: dim,
                found: w.len(),
            });
        }
    }

    let mut rng = seeded_rng(budget.seed, 0);
    let mut ev = Evaluator {
        objective: &mut objective,
        bounds: &bounds,
        max_evals: budget.max_evals,
        history: Vec::with_capacity(budget.max_evals.min(1 << 16)),
        best: 0,
    };

    let random_point = |rng: &mut crate::SearchRng| -> Vec<f64> {
        bounds
            .iter()
            .map(|&(lo, hi)| rng.gen_range(lo..hi))
            .collect()
    };

    'search: {
        if ev.eval(&vec![0.0; dim])?.is_err() {
            break 'search;
        }
        let base_lambda = 4 + (3.0 * (dim as f64).ln()).floor() as usize;
        let base_step = 0.25;
        let first_mean = budget
            .warm_start
            .clone()
            .unwrap_or_else(|| random_point(&mut rng));
        let start = ev.history.len();
        if run_es(&mut ev, &mut rng, first_mean, base_lambda, base_step)?.is_err() {
            break 'search;
        }
        if budget.restarts == RestartStrategy::None {
            break 'search;
        }

        let mut large_evals = ev.history.len() - start;
        let mut small_evals = 0;
        let mut large_restarts = 0u32;
        while ev.remaining() > 0 {
            let before = ev.history.len();
            let large = large_evals <= small_evals;
            let (lambda, step) = if large {
                large_restarts += 1;
                (base_lambda << large_restarts, base_step)
            } else {
                let u: f64 = rng.gen();
                let ratio = (base_lambda << large_restarts) as f64 / (2.0 * base_lambda as f64);
                let lambda = ((base_lambda as f64) * ratio.max(1.0).powf(u * u)).floor() as usize;
                let v: f64 = rng.gen();
                (lambda.max(2), base_step * 10f64.powf(-2.0 * v))
            };
            let mean = random_point(&mut rng);
            let outcome = run_es(&mut ev, &mut rng, mean, lambda, step)?;
            let used = ev.history.len() - before;
            if large {
                large_evals += used;
            } else {
                small_evals += used;
            }
            if outcome.is_err() {
                break;
            }
        }
    }

    let best = &ev.history[ev.best];
    Ok(OptResult {
        best_angles: best.angles.clone(),
        best_value: ev.best_value(),
        evals_used: ev.history.len(),
        history: ev.history,
    })
}

/// Quality of an energy `value` on `sub` relative to the subproblem optimum,
/// as an evaluation-over-optimum ratio in `(0, 1]` where 1 means optimal.
///
/// Energies are first shifted so that every one of them is strictly
/// negative: the origin is moved to `E_max + (E_max − E_min)`. The ratio of
/// shifted value to shifted optimum is then `(M − v) / (M − E_min)` with
/// `M = 2·E_max − E_min`, which lies in `[1/2, 1]` for any `v` in the
/// spectrum. When every energy is equal the ratio is defined as 1.
///
/// `value` may be a sampled energy or an expectation such as
/// [`OptResult::best_value`].
pub fn subproblem_quality_ratio(sub: &SubProblem, value: f64) -> Result<f64, QaoaError> {
    let energies = diagonal_energies(sub.reduced())?;
    let (lo, hi) = energies
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
            (lo.min(e), hi.max(e))
        });
    let span = hi - lo;
    if span <= 0.0 {
        return Ok(1.0);
    }
    let origin = hi + span;
    Ok((origin - value) / (origin - lo))
}
