//! QUBO data model.
//!
//! A [`Qubo`] stores an upper-triangular coefficient matrix `Q` plus a
//! constant offset and represents the objective
//!
//! ```text
//! f(x) = offset + Σ_{i ≤ j} x_i Q[i][j] x_j,   x ∈ {0,1}^n
//! ```
//!
//! which the rest of the crate always minimizes. Instances stated as
//! maximization problems are negated on ingest and carry
//! [`Sense::MaximizeNegated`] so reporting layers can undo the negation.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::bitstring::BitString;

mod clamp;
mod ising;
mod moves;
pub mod orlib;

pub use clamp::SubProblem;
pub use ising::IsingModel;
pub use moves::MoveTable;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuboError {
    #[error("bit string has length {found}, problem has {expected} variables")]
    LengthMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("coefficient for ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("variable selection is empty")]
    EmptySelection,
    #[error("variable {0} selected more than once")]
    DuplicateIndex(usize),
    #[error("move table belongs to a different problem")]
    ForeignMoveTable,
}

/// Optimization sense the coefficients were ingested with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// Coefficients are used as stated.
    #[default]
    Minimize,
    /// The source stated a maximization problem; coefficients were negated.
    MaximizeNegated,
}

impl Sense {
    /// Maps an internal (minimized) objective value back to the source's sense.
    pub fn report(self, value: f64) -> f64 {
        match self {
            Sense::Minimize => value,
            Sense::MaximizeNegated => -value,
        }
    }

    /// Maps a value stated in the source's sense to the internal objective.
    pub fn internal(self, value: f64) -> f64 {
        self.report(value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    n: usize,
    linear: Vec<f64>,
    /// Off-diagonal couplings, stored in both directions and sorted by neighbor.
    adjacency: Vec<Vec<(usize, f64)>>,
    offset: f64,
    sense: Sense,
    fingerprint: u64,
}

/// Accumulates coefficients before freezing them into a [`Qubo`].
#[derive(Debug, Clone)]
pub struct QuboBuilder {
    n: usize,
    terms: BTreeMap<(usize, usize), f64>,
    offset: f64,
    sense: Sense,
}

impl QuboBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
            offset: 0.0,
            sense: Sense::Minimize,
        }
    }

    /// Adds `value` to `Q[min(i,j)][max(i,j)]`. Repeated entries accumulate.
    pub fn add(&mut self, i: usize, j: usize, value: f64) -> Result<&mut Self, QuboError> {
        for index in [i, j] {
            if index >= self.n {
                return Err(QuboError::IndexOutOfRange { index, n: self.n });
            }
        }
        if !value.is_finite() {
            return Err(QuboError::NonFinite { i, j });
        }
        let key = (i.min(j), i.max(j));
        *self.terms.entry(key).or_insert(0.0) += value;
        Ok(self)
    }

    pub fn offset(&mut self, offset: f64) -> &mut Self {
        self.offset = offset;
        self
    }

    pub fn sense(&mut self, sense: Sense) -> &mut Self {
        self.sense = sense;
        self
    }

    pub fn build(&self) -> Qubo {
        let mut linear = vec![0.0; self.n];
        let mut adjacency = vec![Vec::new(); self.n];
        for (&(i, j), &v) in &self.terms {
            if v == 0.0 {
                continue;
            }
            if i == j {
                linear[i] = v;
            } else {
                adjacency[i].push((j, v));
                adjacency[j].push((i, v));
            }
        }
        for row in &mut adjacency {
            row.sort_unstable_by_key(|&(j, _)| j);
        }
        Qubo::from_parts(self.n, linear, adjacency, self.offset, self.sense)
    }
}

impl Qubo {
    fn from_parts(
        n: usize,
        linear: Vec<f64>,
        adjacency: Vec<Vec<(usize, f64)>>,
        offset: f64,
        sense: Sense,
    ) -> Self {
        let mut q = Qubo {
            n,
            linear,
            adjacency,
            offset,
            sense,
            fingerprint: 0,
        };
        let mut hasher = DefaultHasher::new();
        n.hash(&mut hasher);
        offset.to_bits().hash(&mut hasher);
        for (i, j, v) in q.terms() {
            (i, j, v.to_bits()).hash(&mut hasher);
        }
        q.fingerprint = hasher.finish();
        q
    }

    /// The all-zero objective over `n` variables.
    pub fn zero(n: usize) -> Self {
        QuboBuilder::new(n).build()
    }

    /// Builds a problem from `(i, j, value)` triples; see [`QuboBuilder::add`].
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self, QuboError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut b = QuboBuilder::new(n);
        for (i, j, v) in terms {
            b.add(i, j, v)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Copy of this problem with a different sense flag.
    pub fn with_sense(&self, sense: Sense) -> Qubo {
        let mut q = self.clone();
        q.sense = sense;
        q
    }

    #[inline]
    pub fn linear(&self, i: usize) -> f64 {
        self.linear[i]
    }

    /// Nonzero couplings of variable `i` as `(neighbor, Q)` pairs, sorted by neighbor.
    #[inline]
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    /// `Q[min(i,j)][max(i,j)]`, zero when absent.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.linear[i];
        }
        let row = &self.adjacency[i];
        match row.binary_search_by_key(&j, |&(k, _)| k) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Stored coefficients `(i, j, Q[i][j])` with `i <= j`, in row-major order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let diag = (self.linear[i] != 0.0).then_some((i, i, self.linear[i]));
            diag.into_iter().chain(
                self.adjacency[i]
                    .iter()
                    .filter(move |&&(j, _)| j > i)
                    .map(move |&(j, v)| (i, j, v)),
            )
        })
    }

    /// Number of stored (nonzero) coefficients.
    pub fn nnz(&self) -> usize {
        self.linear.iter().filter(|&&v| v != 0.0).count()
            + self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Fraction of variable pairs with a nonzero coupling.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let pairs = self.n * (self.n - 1) / 2;
        let couplings = self.adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        couplings as f64 / pairs as f64
    }

    pub fn evaluate(&self, x: &BitString) -> Result<f64, QuboError> {
        self.check_len(x)?;
        Ok(self.energy(x))
    }

    /// [`Qubo::evaluate`] without the length check.
    pub(crate) fn energy(&self, x: &BitString) -> f64 {
        let mut total = self.offset;
        for i in 0..self.n {
            if !x.get(i) {
                continue;
            }
            let mut row = self.linear[i];
            for &(j, v) in &self.adjacency[i] {
                if j > i && x.get(j) {
                    row += v;
                }
            }
            total += row;
        }
        total
    }

    pub(crate) fn check_len(&self, x: &BitString) -> Result<(), QuboError> {
        if x.len() != self.n {
            return Err(QuboError::LengthMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<(), QuboError> {
        if index >= self.n {
            return Err(QuboError::IndexOutOfRange { index, n: self.n });
        }
        Ok(())
    }
}
