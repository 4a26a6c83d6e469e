use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Target,
    MaxIters,
    Cutoff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub f_ts: f64,
    pub f_best: f64,
    /// Variables flipped this iteration.
    pub flipped: Vec<usize>,
    /// The sampler's candidate was taken over the one-flip move.
    pub accepted: bool,
    /// Objective of the sampler's candidate, when a sampler ran.
    pub candidate: Option<f64>,
}

/// Per-iteration history of a search. Record 0 is the initial solution, so
/// record `t` describes the state after iteration `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
}

/// One line of the trace CSV: `iteration,f_ts,f_best,n_flipped,accepted`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub f_ts: f64,
    pub f_best: f64,
    pub n_flipped: usize,
    pub accepted: bool,
}

impl RunTrace {
    /// Number of iterations performed.
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    /// Best value after each iteration, starting with the initial solution.
    pub fn best_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.f_best).collect()
    }

    /// First iteration whose best value is at or below `target`.
    pub fn first_reaching(&self, target: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.f_best <= target)
            .map(|r| r.iteration)
    }

    pub fn rows(&self) -> impl Iterator<Item = TraceRow> + '_ {
        self.records.iter().map(|r| TraceRow {
            iteration: r.iteration,
            f_ts: r.f_ts,
            f_best: r.f_best,
            n_flipped: r.flipped.len(),
            accepted: r.accepted,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        for row in self.rows() {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn read_trace_csv<R: Read>(reader: R) -> Result<Vec<TraceRow>, csv::Error> {
    csv::Reader::from_reader(reader).deserialize().collect()
}
