use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{best_known, BenchError};
use crate::bitstring::BitString;
use crate::qubo::orlib::read_orlib_file;
use crate::qubo::Qubo;
use crate::samplers::{
    BruteForce, NeighborhoodSampler, QaoaSampler, QaoaSamplerConfig, SaConfig, SimulatedAnnealing,
};
use crate::tabu::{
    basic_tabu_search, sampler_tabu_search, RunTrace, SelectionMode, TabuError, TabuOutcome,
    TabuParams, Termination,
};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// An instance inside an OR-Library file, addressed by zero-based position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRef {
    pub path: PathBuf,
    pub index: usize,
    /// Name used in reports and for best-known lookups.
    #[serde(default)]
    pub name: Option<String>,
}

impl InstanceRef {
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => {
                let stem = self
                    .path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                format!("{stem}#{}", self.index)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    /// One-flip tabu search.
    Basic,
    BruteForce,
    Sa(SaConfig),
    Qaoa(QaoaSamplerConfig),
}

impl AlgorithmSpec {
    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::Basic => "basic".into(),
            AlgorithmSpec::BruteForce => BruteForce.label(),
            AlgorithmSpec::Sa(c) => SimulatedAnnealing(*c).label(),
            AlgorithmSpec::Qaoa(c) => c.label(),
        }
    }

    pub fn uses_sampler(&self) -> bool {
        !matches!(self, AlgorithmSpec::Basic)
    }

    fn sampler(&self) -> Option<Box<dyn NeighborhoodSampler>> {
        match self {
            AlgorithmSpec::Basic => None,
            AlgorithmSpec::BruteForce => Some(Box::new(BruteForce)),
            AlgorithmSpec::Sa(c) => Some(Box::new(SimulatedAnnealing(*c))),
            AlgorithmSpec::Qaoa(c) => Some(Box::new(QaoaSampler::new(c.clone()))),
        }
    }

    /// Runs this algorithm from `x0`; sampler algorithms need `params.k`.
    pub fn run(
        &self,
        q: &Qubo,
        x0: &BitString,
        params: &TabuParams,
    ) -> Result<TabuOutcome, TabuError> {
        match self.sampler() {
            None => basic_tabu_search(q, x0, params),
            Some(mut s) => sampler_tabu_search(q, x0, params, &mut s),
        }
    }
}

/// Where stop targets come from. Values are in the instance's reported
/// sense (maxima for OR-Library instances).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSource {
    #[default]
    None,
    /// The built-in `bqpgka` table, looked up by instance name.
    BestKnown,
    Values {
        values: BTreeMap<String, f64>,
    },
}

impl TargetSource {
    pub fn lookup(&self, name: &str) -> Option<f64> {
        match self {
            TargetSource::None => None,
            TargetSource::BestKnown => best_known(name),
            TargetSource::Values { values } => values.get(name).copied(),
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instances: Vec<InstanceRef>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub tenures: Vec<usize>,
    #[serde(default)]
    pub rand_tenure: usize,
    /// Subproblem sizes; used by sampler algorithms only.
    #[serde(default)]
    pub ks: Vec<usize>,
    pub seeds: Vec<u64>,
    pub max_iters: usize,
    #[serde(default)]
    pub improvement_cutoff: Option<usize>,
    #[serde(default)]
    pub selection: SelectionMode,
    #[serde(default)]
    pub targets: TargetSource,
    /// Stop a run once it reaches its target.
    #[serde(default = "yes")]
    pub stop_at_target: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Precondition(m.into()));
        if self.instances.is_empty() {
            return bad("no instances");
        }
        if self.seeds.is_empty() {
            return bad("no seeds");
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms");
        }
        if self.tenures.is_empty() {
            return bad("no tabu tenures");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if self.ks.is_empty() && self.algorithms.iter().any(AlgorithmSpec::uses_sampler) {
            return bad("sampler algorithms need at least one subproblem size");
        }
        Ok(())
    }

    /// The matrix in execution order: instance, algorithm, tenure, k, seed.
    pub fn cells(&self) -> Vec<CellSpec> {
        let mut cells = Vec::new();
        for (ii, inst) in self.instances.iter().enumerate() {
            for (ai, alg) in self.algorithms.iter().enumerate() {
                let ks: Vec<Option<usize>> = if alg.uses_sampler() {
                    self.ks.iter().copied().map(Some).collect()
                } else {
                    vec![None]
                };
                for &tenure in &self.tenures {
                    for &k in &ks {
                        for &seed in &self.seeds {
                            let label = alg.label();
                            let k_part = k.map(|k| format!("_k{k}")).unwrap_or_default();
                            cells.push(CellSpec {
                                id: format!(
                                    "{}_{}_{label}_tt{tenure}{k_part}_s{seed}",
                                    cells.len(),
                                    inst.label()
                                ),
                                instance: ii,
                                algorithm: ai,
                                tenure,
                                k,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub id: String,
    /// Position in `ExperimentSpec::instances`.
    pub instance: usize,
    /// Position in `ExperimentSpec::algorithms`.
    pub algorithm: usize,
    pub tenure: usize,
    pub k: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub toolkit: String,
    pub toolkit_version: String,
    pub spec: ExperimentSpec,
    pub cells: Vec<CellSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: String,
    pub instance: String,
    pub algorithm: String,
    pub tenure: usize,
    pub k: Option<usize>,
    pub seed: u64,
    /// Best objective in the instance's reported sense.
    pub best_value: Option<f64>,
    pub target: Option<f64>,
    pub first_iteration_to_target: Option<usize>,
    pub iterations: Option<usize>,
    pub termination: Option<Termination>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub manifest: Manifest,
    pub summary: Vec<SummaryRow>,
    /// One entry per cell; `None` where the cell failed.
    pub traces: Vec<Option<RunTrace>>,
}

impl ExperimentResult {
    pub fn failed_cells(&self) -> usize {
        self.summary.iter().filter(|r| r.error.is_some()).count()
    }

    /// Writes `manifest.json`, `summary.json` and `traces/<cell>.csv`.
    pub fn write(&self, dir: &Path) -> Result<(), BenchError> {
        let traces = dir.join("traces");
        fs::create_dir_all(&traces).map_err(|e| BenchError::io(&traces, e))?;
        write_json(&dir.join("manifest.json"), &self.manifest)?;
        write_json(&dir.join("summary.json"), &self.summary)?;
        for (row, trace) in self.summary.iter().zip(&self.traces) {
            if let Some(t) = trace {
                let path = traces.join(format!("{}.csv", row.cell));
                let file = fs::File::create(&path).map_err(|e| BenchError::io(&path, e))?;
                t.write_csv(std::io::BufWriter::new(file))?;
            }
        }
        Ok(())
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), BenchError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

/// Runs every cell of the matrix from the all-zero assignment. Failures
/// (unreadable files, bad indices, invalid parameters, sampler errors) are
/// recorded in the cell's summary row and do not stop the matrix.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult, BenchError> {
    spec.validate()?;
    let mut files: BTreeMap<&Path, Result<Vec<Qubo>, String>> = BTreeMap::new();
    for inst in &spec.instances {
        files
            .entry(inst.path.as_path())
            .or_insert_with(|| read_orlib_file(&inst.path).map_err(|e| e.to_string()));
    }
    let load = |inst: &InstanceRef| -> Result<&Qubo, String> {
        let all = files[inst.path.as_path()].as_ref().map_err(Clone::clone)?;
        all.get(inst.index).ok_or_else(|| {
            format!(
                "{} holds {} instances, index {} requested",
                inst.path.display(),
                all.len(),
                inst.index
            )
        })
    };

    let cells = spec.cells();
    let mut summary = Vec::with_capacity(cells.len());
    let mut traces = Vec::with_capacity(cells.len());
    for cell in &cells {
        let inst = &spec.instances[cell.instance];
        let alg = &spec.algorithms[cell.algorithm];
        let name = inst.label();
        let target = spec.targets.lookup(&name);
        let mut row = SummaryRow {
            cell: cell.id.clone(),
            instance: name,
            algorithm: alg.label(),
            tenure: cell.tenure,
            k: cell.k,
            seed: cell.seed,
            best_value: None,
            target,
            first_iteration_to_target: None,
            iterations: None,
            termination: None,
            error: None,
        };
        let outcome = load(inst).and_then(|q| {
            let internal_target = target.map(|t| q.sense().internal(t));
            let params = TabuParams {
                tenure: cell.tenure,
                rand_tenure: spec.rand_tenure,
                max_iters: spec.max_iters,
                improvement_cutoff: spec.improvement_cutoff,
                target: internal_target.filter(|_| spec.stop_at_target),
                seed: cell.seed,
                k: cell.k,
                selection: spec.selection,
            };
            alg.run(q, &BitString::zeros(q.n()), &params)
                .map(|o| (q.sense(), internal_target, o))
                .map_err(|e| e.to_string())
        });
        match outcome {
            Ok((sense, internal_target, o)) => {
                row.best_value = Some(sense.report(o.best_value));
                row.first_iteration_to_target =
                    internal_target.and_then(|t| o.trace.first_reaching(t));
                row.iterations = Some(o.trace.iterations());
                row.termination = Some(o.trace.termination);
                traces.push(Some(o.trace));
            }
            Err(e) => {
                row.error = Some(e);
                traces.push(None);
            }
        }
        summary.push(row);
    }
    Ok(ExperimentResult {
        manifest: Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            toolkit: env!("CARGO_PKG_NAME").into(),
            toolkit_version: env!("CARGO_PKG_VERSION").into(),
            spec: spec.clone(),
            cells,
        },
        summary,
        traces,
    })
}
