use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{NeighborhoodSampler, SamplerContext, SamplerError};
use crate::angle_opt::{optimize_angles, OptBudget, OptResult};
use crate::bitstring::BitString;
use crate::qaoa::{PenaltySpec, QaoaSimulator, QaoaState};
use crate::qubo::SubProblem;
use crate::SearchRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QaoaSamplerConfig {
    /// Circuit depth.
    pub p: usize,
    /// Add the move-value penalty layer.
    pub penalized: bool,
    /// Penalty scale `A`.
    pub penalty_scale: f64,
    /// Measurements drawn from the optimized state to pick a candidate.
    pub samples: usize,
    /// Also consider every outcome measured during angle optimization.
    pub use_optimizer_history: bool,
    /// Measurements per expectation estimate during optimization.
    pub shots: usize,
    pub budget: OptBudget,
    /// Start each optimization from the previous call's best angles.
    #[serde(default)]
    pub warm_start: bool,
}

impl Default for QaoaSamplerConfig {
    fn default() -> Self {
        Self {
            p: 1,
            penalized: false,
            penalty_scale: 1.0,
            samples: 10,
            use_optimizer_history: false,
            shots: 1000,
            budget: OptBudget::default(),
            warm_start: false,
        }
    }
}

impl QaoaSamplerConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.p == 0 {
            return Err(SamplerError::Config("depth must be at least 1".into()));
        }
        if self.samples == 0 || self.shots == 0 {
            return Err(SamplerError::Config(
                "samples and shots must be at least 1".into(),
            ));
        }
        if !self.penalty_scale.is_finite() {
            return Err(SamplerError::Config("penalty scale must be finite".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!(
            "qaoa-p{}{}-m{}{}",
            self.p,
            if self.penalized {
                format!("-pen{}", self.penalty_scale)
            } else {
                String::new()
            },
            self.samples,
            if self.use_optimizer_history {
                "-hist"
            } else {
                ""
            },
        )
    }
}

/// Result of optimizing the angles for one subproblem.
#[derive(Debug, Clone)]
pub struct QaoaRun {
    pub optimization: OptResult,
    /// State at the best angles found.
    pub state: QaoaState,
    /// Lowest-energy state index measured during optimization, if any.
    pub history_best: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct QaoaOutcome {
    pub bits: BitString,
    pub energy: f64,
    pub run: QaoaRun,
}

fn better(energies: &[f64], candidate: usize, incumbent: Option<usize>) -> bool {
    match incumbent {
        None => true,
        Some(b) => (energies[candidate], candidate) < (energies[b], b),
    }
}

/// Optimizes the angles against the shot-estimated expectation and returns
/// the state at the best angles.
pub fn optimize_qaoa<R: Rng + ?Sized>(
    sub: &SubProblem,
    cfg: &QaoaSamplerConfig,
    ctx: &SamplerContext,
    warm_start: Option<Vec<f64>>,
    rng: &mut R,
) -> Result<QaoaRun, SamplerError> {
    cfg.validate()?;
    let mut sim = QaoaSimulator::new(sub)?;
    if cfg.penalized {
        let spec = PenaltySpec::new(ctx.deltas.clone(), ctx.reference.clone(), cfg.penalty_scale)?;
        sim = sim.with_penalty(&spec)?;
    }
    let budget = OptBudget {
        seed: rng.gen(),
        warm_start: warm_start.or_else(|| cfg.budget.warm_start.clone()),
        ..cfg.budget.clone()
    };

    let energies = sim.energies().clone();
    let mut history_best: Option<usize> = None;
    let mut failure = None;
    let objective = |angles: &[f64]| -> f64 {
        let outcome = sim
            .evolve_flat(angles)
            .and_then(|st| st.sample_indices(cfg.shots, rng));
        match outcome {
            Ok(idx) => {
                let mut total = 0.0;
                for b in idx {
                    total += energies[b];
                    if better(&energies, b, history_best) {
                        history_best = Some(b);
                    }
                }
                total / cfg.shots as f64
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let optimization = optimize_angles(objective, cfg.p, &budget);
    if let Some(e) = failure {
        return Err(e.into());
    }
    let optimization = optimization?;
    let state = sim.evolve_flat(&optimization.best_angles)?;
    Ok(QaoaRun {
        optimization,
        state,
        history_best,
    })
}

/// Optimizes a QAOA circuit on `sub`, then returns the lowest-energy of
/// `cfg.samples` measurements (or of everything ever measured, with
/// `use_optimizer_history`). Candidates are ranked by their exact energy.
pub fn qaoa_best<R: Rng + ?Sized>(
    sub: &SubProblem,
    cfg: &QaoaSamplerConfig,
    ctx: &SamplerContext,
    rng: &mut R,
) -> Result<QaoaOutcome, SamplerError> {
    qaoa_best_from(sub, cfg, ctx, None, rng)
}

fn qaoa_best_from<R: Rng + ?Sized>(
    sub: &SubProblem,
    cfg: &QaoaSamplerConfig,
    ctx: &SamplerContext,
    warm_start: Option<Vec<f64>>,
    rng: &mut R,
) -> Result<QaoaOutcome, SamplerError> {
    let run = optimize_qaoa(sub, cfg, ctx, warm_start, rng)?;
    let energies = run.state.energies();
    let mut best: Option<usize> = None;
    for b in run.state.sample_indices(cfg.samples, rng)? {
        if better(energies, b, best) {
            best = Some(b);
        }
    }
    if cfg.use_optimizer_history {
        if let Some(h) = run.history_best {
            if better(energies, h, best) {
                best = Some(h);
            }
        }
    }
    let best = best.expect("at least one sample is drawn");
    Ok(QaoaOutcome {
        bits: BitString::from_index(best, sub.k()),
        energy: energies[best],
        run,
    })
}

/// QAOA neighborhood sampler; remembers its last best angles for warm starts.
#[derive(Debug, Clone)]
pub struct QaoaSampler {
    pub config: QaoaSamplerConfig,
    last_angles: Option<Vec<f64>>,
}

impl QaoaSampler {
    pub fn new(config: QaoaSamplerConfig) -> Self {
        Self {
            config,
            last_angles: None,
        }
    }
}

impl NeighborhoodSampler for QaoaSampler {
    fn sample_best(
        &mut self,
        sub: &SubProblem,
        ctx: &SamplerContext,
        rng: &mut SearchRng,
    ) -> Result<BitString, SamplerError> {
        let warm = if self.config.warm_start {
            self.last_angles.clone()
        } else {
            None
        };
        let out = qaoa_best_from(sub, &self.config, ctx, warm, rng)?;
        self.last_angles = Some(out.run.optimization.best_angles.clone());
        Ok(out.bits)
    }

    fn label(&self) -> String {
        self.config.label()
    }
}
