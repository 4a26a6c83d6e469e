use std::collections::HashMap;

use super::{Qubo, QuboBuilder, QuboError};
use crate::bitstring::BitString;

/// A problem restricted to a subset of variables, with every other variable
/// fixed to its value in a reference assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct SubProblem {
    parent_indices: Vec<usize>,
    reduced: Qubo,
    base: BitString,
}

impl SubProblem {
    /// Variables of the parent problem, ascending; local variable `j` is
    /// `parent_indices()[j]`.
    pub fn parent_indices(&self) -> &[usize] {
        &self.parent_indices
    }

    pub fn reduced(&self) -> &Qubo {
        &self.reduced
    }

    /// The full parent assignment the clamped values were taken from.
    pub fn base(&self) -> &BitString {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.parent_indices.len()
    }

    /// Values of the selected variables in the reference assignment.
    pub fn reference(&self) -> BitString {
        self.base.select(&self.parent_indices)
    }

    /// Places a local assignment into a copy of the reference assignment.
    pub fn embed(&self, y: &BitString) -> Result<BitString, QuboError> {
        self.reduced.check_len(y)?;
        let mut x = self.base.clone();
        for (local, &parent) in self.parent_indices.iter().enumerate() {
            x.set(parent, y.get(local));
        }
        Ok(x)
    }
}

impl Qubo {
    /// Fixes every variable outside `selected` to its value in `reference`.
    ///
    /// The reduced problem's variables follow ascending parent index.
    /// Couplings to clamped variables fold into linear terms, and terms among
    /// clamped variables fold into the offset.
    pub fn clamp(
        &self,
        reference: &BitString,
        selected: &[usize],
    ) -> Result<SubProblem, QuboError> {
        self.check_len(reference)?;
        if selected.is_empty() {
            return Err(QuboError::EmptySelection);
        }
        let mut indices = selected.to_vec();
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(QuboError::DuplicateIndex(w[0]));
            }
        }
        for &i in &indices {
            self.check_index(i)?;
        }

        let local: HashMap<usize, usize> =
            indices.iter().enumerate().map(|(l, &p)| (p, l)).collect();

        // f(reference with the selected bits zeroed) is exactly the part of the
        // objective that does not depend on the free variables.
        let mut zeroed = reference.clone();
        for &i in &indices {
            zeroed.set(i, false);
        }
        let offset = self.energy(&zeroed);

        let mut b = QuboBuilder::new(indices.len());
        b.offset(offset).sense(self.sense());
        for (li, &pi) in indices.iter().enumerate() {
            let mut lin = self.linear(pi);
            for &(pj, v) in self.neighbors(pi) {
                match local.get(&pj) {
                    Some(&lj) if lj > li => {
                        b.add(li, lj, v)?;
                    }
                    Some(_) => {}
                    None => {
                        if reference.get(pj) {
                            lin += v;
                        }
                    }
                }
            }
            b.add(li, li, lin)?;
        }

        Ok(SubProblem {
            parent_indices: indices,
            reduced: b.build(),
            base: reference.clone(),
        })
    }
}
