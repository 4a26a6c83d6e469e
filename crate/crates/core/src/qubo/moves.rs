use super::{Qubo, QuboError};
use crate::bitstring::BitString;

/// One-bit-flip move values `Δ(i) = f(flip(x, i)) − f(x)` for a fixed problem
/// and a current assignment, kept up to date as bits are flipped.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveTable {
    delta: Vec<f64>,
    owner: u64,
}

#[inline]
fn sign(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

impl MoveTable {
    /// Computes every move value from scratch in `O(nnz)`.
    pub fn new(q: &Qubo, x: &BitString) -> Result<Self, QuboError> {
        q.check_len(x)?;
        let delta = (0..q.n())
            .map(|i| {
                let field: f64 = q
                    .neighbors(i)
                    .iter()
                    .filter(|&&(j, _)| x.get(j))
                    .map(|&(_, v)| v)
                    .sum();
                sign(x.get(i)) * (q.linear(i) + field)
            })
            .collect();
        Ok(Self {
            delta,
            owner: q.fingerprint(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.delta
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.delta[i]
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }

    /// Flips bit `i` of `x` and updates the table in `O(deg(i))`.
    ///
    /// Returns the objective change of the flip. With `σ_k = 1 − 2 x_k`
    /// taken before the flip, `Δ'(i) = −Δ(i)` and
    /// `Δ'(j) = Δ(j) + σ_i σ_j Q[i][j]` for every neighbor `j`.
    pub fn apply_flip(&mut self, q: &Qubo, x: &mut BitString, i: usize) -> Result<f64, QuboError> {
        if self.owner != q.fingerprint() || self.delta.len() != q.n() {
            return Err(QuboError::ForeignMoveTable);
        }
        q.check_len(x)?;
        q.check_index(i)?;
        let gain = self.delta[i];
        let sigma_i = sign(x.get(i));
        for &(j, v) in q.neighbors(i) {
            self.delta[j] += sigma_i * sign(x.get(j)) * v;
        }
        self.delta[i] = -gain;
        x.flip(i);
        Ok(gain)
    }

    /// Non-mutating form of [`MoveTable::apply_flip`].
    pub fn flipped(
        &self,
        q: &Qubo,
        x: &BitString,
        i: usize,
    ) -> Result<(BitString, MoveTable), QuboError> {
        let mut x = x.clone();
        let mut table = self.clone();
        table.apply_flip(q, &mut x, i)?;
        Ok((x, table))
    }

    /// Move values restricted to `indices`, in the order given.
    pub fn select(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().map(|&i| self.delta[i]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Qubo {
        Qubo::from_terms(2, [(0, 0, 2.0), (0, 1, -3.0), (1, 1, 1.0)]).unwrap()
    }

    #[test]
    fn init_from_zero() {
        let t = MoveTable::new(&small(), &BitString::zeros(2)).unwrap();
        assert_eq!(t.values(), &[2.0, 1.0]);
    }

    #[test]
    fn init_from_one_zero() {
        let t = MoveTable::new(&small(), &"10".parse().unwrap()).unwrap();
        assert_eq!(t.values(), &[-2.0, -2.0]);
    }

    #[test]
    fn zero_problem_has_zero_moves() {
        let q = Qubo::zero(4);
        let t = MoveTable::new(&q, &"1011".parse().unwrap()).unwrap();
        assert!(t.values().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn flip_matches_fresh_table() {
        let q = small();
        let x = BitString::zeros(2);
        let t = MoveTable::new(&q, &x).unwrap();
        let (x1, t1) = t.flipped(&q, &x, 0).unwrap();
        assert_eq!(x1.to_string(), "10");
        assert_eq!(t1.values(), &[-2.0, -2.0]);
        assert_eq!(t1, MoveTable::new(&q, &x1).unwrap());
    }

    #[test]
    fn flip_is_involution() {
        let q = small();
        let x: BitString = "01".parse().unwrap();
        let t = MoveTable::new(&q, &x).unwrap();
        let (x1, t1) = t.flipped(&q, &x, 1).unwrap();
        let (x2, t2) = t1.flipped(&q, &x1, 1).unwrap();
        assert_eq!((x2, t2), (x, t));
    }

    #[test]
    fn flip_errors() {
        let q = small();
        let mut x = BitString::zeros(2);
        let mut t = MoveTable::new(&q, &x).unwrap();
        assert_eq!(
            t.apply_flip(&q, &mut x, 2),
            Err(QuboError::IndexOutOfRange { index: 2, n: 2 })
        );
        let other = Qubo::zero(2);
        assert_eq!(
            t.apply_flip(&other, &mut x, 0),
            Err(QuboError::ForeignMoveTable)
        );
        assert!(MoveTable::new(&q, &BitString::zeros(1)).is_err());
    }
}
