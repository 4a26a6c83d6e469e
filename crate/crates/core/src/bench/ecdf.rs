use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::BenchError;

/// Best-so-far series of one run (index = iteration, entry 0 = start).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfRun {
    pub problem: String,
    pub best: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemTargets {
    pub problem: String,
    /// Targets from the lowest observed value up to the highest.
    pub targets: Vec<f64>,
    /// `targets` divided by the problem's optimum.
    pub normalized: Vec<f64>,
    pub optimum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfReport {
    pub target_count: usize,
    pub problems: Vec<ProblemTargets>,
    /// `hits[r][t]`: first iteration at which run `r` met target `t`.
    pub hits: Vec<Vec<Option<usize>>>,
    /// Proportion of (run, target) pairs met by each iteration.
    pub curve: Vec<f64>,
}

impl EcdfReport {
    /// Writes `iteration,proportion` rows.
    pub fn write_curve_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["iteration", "proportion"])?;
        for (t, p) in self.curve.iter().enumerate() {
            w.write_record([t.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fixed-target ECDF over runs grouped by problem.
///
/// Per problem, `target_count` evenly spaced targets are laid between the
/// smallest and largest value seen in any of its runs. A run meets a target
/// at the first iteration its best value is at or below it; runs shorter
/// than the longest keep their final value. Optima missing from `optima` fall
/// back to the best observed value.
pub fn compute_ecdf(
    runs: &[EcdfRun],
    optima: &BTreeMap<String, f64>,
    target_count: usize,
) -> Result<EcdfReport, BenchError> {
    if target_count < 2 {
        return Err(BenchError::Precondition(
            "at least two targets are required".into(),
        ));
    }
    if runs.is_empty() || runs.iter().any(|r| r.best.is_empty()) {
        return Err(BenchError::Precondition("no traces to aggregate".into()));
    }

    let mut ranges: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for r in runs {
        let e = ranges
            .entry(r.problem.as_str())
            .or_insert((f64::INFINITY, f64::NEG_INFINITY));
        for &v in &r.best {
            e.0 = e.0.min(v);
            e.1 = e.1.max(v);
        }
    }
    let problems: Vec<ProblemTargets> = ranges
        .iter()
        .map(|(&name, &(lo, hi))| {
            let targets: Vec<f64> = (0..target_count)
                .map(|t| {
                    if t + 1 == target_count {
                        hi
                    } else {
                        lo + (hi - lo) * t as f64 / (target_count - 1) as f64
                    }
                })
                .collect();
            let optimum = optima.get(name).copied().unwrap_or(lo);
            ProblemTargets {
                problem: name.to_string(),
                normalized: targets.iter().map(|t| t / optimum).collect(),
                targets,
                optimum,
            }
        })
        .collect();

    let horizon = runs.iter().map(|r| r.best.len()).max().unwrap_or(0);
    let mut counts = vec![0usize; horizon];
    let mut hits = Vec::with_capacity(runs.len());
    for r in runs {
        let p = problems
            .iter()
            .find(|p| p.problem == r.problem)
            .expect("every problem has targets");
        let row: Vec<Option<usize>> = p
            .targets
            .iter()
            .map(|&target| r.best.iter().position(|&v| v <= target))
            .collect();
        for &h in row.iter().flatten() {
            counts[h] += 1;
        }
        hits.push(row);
    }
    let pairs = (runs.len() * target_count) as f64;
    let mut met = 0usize;
    let curve = counts
        .into_iter()
        .map(|c| {
            met += c;
            met as f64 / pairs
        })
        .collect();
    Ok(EcdfReport {
        target_count,
        problems,
        hits,
        curve,
    })
}
