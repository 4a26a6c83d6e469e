use rand::seq::index::sample;

use super::BenchError;
use crate::bitstring::BitString;
use crate::qubo::{Qubo, SubProblem};
use crate::seeded_rng;
use crate::tabu::{basic_tabu_search, TabuParams};

#[derive(Debug, Clone, PartialEq)]
pub struct ReduceConfig {
    pub per_instance: usize,
    pub size: usize,
    /// Parameters of the one-flip search that produces the clamping solution.
    /// Its seed is replaced by one derived from the suite seed.
    pub solver: TabuParams,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        Self {
            per_instance: 5,
            size: 20,
            solver: TabuParams {
                tenure: 5,
                max_iters: 1000,
                ..TabuParams::default()
            },
        }
    }
}

/// A reduced problem and where it came from.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    /// Position of the parent in the input list.
    pub source: usize,
    pub replicate: usize,
    /// Objective of the clamping solution on the parent.
    pub source_value: f64,
    pub sub: SubProblem,
    /// The reduced problem, carrying the parent's sense.
    pub qubo: Qubo,
}

impl ReducedInstance {
    pub fn name(&self) -> String {
        format!("r{}-{}", self.source, self.replicate)
    }
}

/// For every instance, solves it with one-flip tabu search from the all-zero
/// assignment, then `per_instance` times draws `size` variables uniformly
/// without replacement and clamps the rest to that solution.
pub fn make_reduced_suite(
    instances: &[Qubo],
    seed: u64,
    cfg: &ReduceConfig,
) -> Result<Vec<ReducedInstance>, BenchError> {
    if cfg.size == 0 {
        return Err(BenchError::Precondition(
            "reduced size must be positive".into(),
        ));
    }
    let mut out = Vec::with_capacity(instances.len() * cfg.per_instance);
    for (source, q) in instances.iter().enumerate() {
        if q.n() < cfg.size {
            return Err(BenchError::Precondition(format!(
                "instance {source} has {} variables, fewer than the reduced size {}",
                q.n(),
                cfg.size
            )));
        }
        let params = TabuParams {
            seed: seed.wrapping_add(source as u64),
            k: None,
            ..cfg.solver.clone()
        };
        let solved = basic_tabu_search(q, &BitString::zeros(q.n()), &params)?;
        let mut rng = seeded_rng(seed, 1000 + source as u64);
        for replicate in 0..cfg.per_instance {
            let mut selected = sample(&mut rng, q.n(), cfg.size).into_vec();
            selected.sort_unstable();
            let sub = q.clamp(&solved.best, &selected)?;
            let qubo = sub.reduced().clone().with_sense(q.sense());
            out.push(ReducedInstance {
                source,
                replicate,
                source_value: solved.best_value,
                sub,
                qubo,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::bench::random_qubo;

    #[test]
    fn cardinality_and_embedding() {
        let instances: Vec<Qubo> = (0..3).map(|s| random_qubo(25, 0.4, 20, s)).collect();
        let cfg = ReduceConfig {
            per_instance: 2,
            size: 8,
            ..Default::default()
        };
        let suite = make_reduced_suite(&instances, 11, &cfg).unwrap();
        assert_eq!(suite.len(), 6);
        let mut rng = seeded_rng(0, 0);
        for r in &suite {
            assert_eq!(r.qubo.n(), 8);
            let parent = &instances[r.source];
            for _ in 0..20 {
                let y: BitString = (0..8).map(|_| rng.gen::<bool>()).collect();
                let direct = parent.evaluate(&r.sub.embed(&y).unwrap()).unwrap();
                let reduced = r.qubo.evaluate(&y).unwrap();
                assert!((direct - reduced).abs() <= 1e-9 * direct.abs().max(1.0));
            }
        }
        let again = make_reduced_suite(&instances, 11, &cfg).unwrap();
        for (a, b) in suite.iter().zip(&again) {
            assert_eq!(a.qubo, b.qubo);
        }
    }

    #[test]
    fn full_size_is_identity() {
        let q = random_qubo(10, 0.5, 5, 2);
        let cfg = ReduceConfig {
            per_instance: 1,
            size: 10,
            ..Default::default()
        };
        let suite = make_reduced_suite(std::slice::from_ref(&q), 0, &cfg).unwrap();
        assert_eq!(suite[0].qubo, q);
    }

    #[test]
    fn too_small_instance() {
        let q = random_qubo(5, 0.5, 5, 2);
        let err = make_reduced_suite(&[q], 0, &ReduceConfig::default());
        assert!(matches!(err, Err(BenchError::Precondition(_))));
    }
}
