use std::io::Write;

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::bitstring::BitString;
use crate::qubo::SubProblem;
use crate::samplers::{optimize_qaoa, sa_chain_bests, QaoaSamplerConfig, SaConfig, SamplerContext};
use crate::SearchRng;

/// Largest subproblem for which per-outcome probabilities are exported.
const EXACT_MAX_QUBITS: usize = 20;

/// One measured (or SA chain-best) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub source: String,
    pub index: usize,
    pub energy: f64,
    /// Hamming distance to the reference assignment of the subproblem.
    pub hamming: usize,
}

/// Probability of one outcome in an optimized QAOA state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRow {
    pub source: String,
    pub index: usize,
    pub energy: f64,
    pub hamming: usize,
    pub probability: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyDataset {
    pub samples: Vec<EnergyRow>,
    /// Empty when the subproblem exceeds 20 variables.
    pub exact: Vec<ExactRow>,
    /// Per QAOA config: probability of measuring an energy strictly below the
    /// reference assignment's.
    pub improvement: Vec<(String, f64)>,
}

impl EnergyDataset {
    pub fn write_samples_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        write_rows(writer, &self.samples)
    }

    pub fn write_exact_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        write_rows(writer, &self.exact)
    }
}

fn write_rows<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Energy distributions of the given QAOA configurations and of SA on one
/// subproblem.
///
/// Each QAOA config is optimized as the sampler would optimize it, then
/// measured `draws` times. SA contributes the best energy of each restart
/// chain.
pub fn energy_distribution_export(
    sub: &SubProblem,
    configs: &[QaoaSamplerConfig],
    sa: Option<&SaConfig>,
    draws: usize,
    ctx: &SamplerContext,
    rng: &mut SearchRng,
) -> Result<EnergyDataset, BenchError> {
    if draws == 0 {
        return Err(BenchError::Precondition("draws must be at least 1".into()));
    }
    let reference = &ctx.reference;
    let reference_index = reference.to_index();
    let hamming = |b: usize| (b ^ reference_index).count_ones() as usize;
    let mut out = EnergyDataset::default();

    for cfg in configs {
        let label = cfg.label();
        let run = optimize_qaoa(sub, cfg, ctx, None, rng)?;
        let state = run.state;
        let energies = state.energies();
        for b in state
            .sample_indices(draws, rng)
            .map_err(crate::samplers::SamplerError::from)?
        {
            out.samples.push(EnergyRow {
                source: label.clone(),
                index: b,
                energy: energies[b],
                hamming: hamming(b),
            });
        }
        if sub.k() <= EXACT_MAX_QUBITS {
            for (b, p) in state.probabilities().into_iter().enumerate() {
                out.exact.push(ExactRow {
                    source: label.clone(),
                    index: b,
                    energy: energies[b],
                    hamming: hamming(b),
                    probability: p,
                });
            }
        }
        out.improvement.push((
            label,
            state.improvement_probability(energies[reference_index]),
        ));
    }

    if let Some(sa) = sa {
        let label = format!("sa-T{}-s{}", sa.temperature, sa.steps);
        for (x, e) in sa_chain_bests(sub, sa, rng)? {
            out.samples.push(EnergyRow {
                source: label.clone(),
                index: x.to_index(),
                energy: e,
                hamming: x.hamming(reference),
            });
        }
    }
    Ok(out)
}

/// Local assignment with the given state index.
pub fn outcome_bits(sub: &SubProblem, index: usize) -> BitString {
    BitString::from_index(index, sub.k())
}
