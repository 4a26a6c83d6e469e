//! Experiment harness: reduced-instance suites, ECDF aggregation, energy
//! distribution datasets and seeded experiment matrices.

mod best_known;
mod ecdf;
mod energy;
mod experiment;
mod reduce;
mod synthetic;

pub use best_known::{best_known, bqpgka_index, bqpgka_name, BQPGKA_BEST_KNOWN, BQPGKA_SETS};
pub use ecdf::{compute_ecdf, EcdfReport, EcdfRun, ProblemTargets};
pub use energy::{energy_distribution_export, outcome_bits, EnergyDataset, EnergyRow, ExactRow};
pub use experiment::{
    run_experiment, AlgorithmSpec, CellSpec, ExperimentResult, ExperimentSpec, InstanceRef,
    Manifest, SummaryRow, TargetSource, MANIFEST_SCHEMA_VERSION,
};
pub use reduce::{make_reduced_suite, ReduceConfig, ReducedInstance};
pub use synthetic::{random_qubo, synthetic_suite};

use crate::qubo::orlib::OrlibError;
use crate::qubo::QuboError;
use crate::samplers::SamplerError;
use crate::tabu::TabuError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Tabu(#[from] TabuError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Orlib(#[from] OrlibError),
    #[error("{0}")]
    Precondition(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
