//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use qubo_tabu::{BitString, Qubo};

/// Dense upper-triangular coefficient matrix with its own evaluator.
#[derive(Debug, Clone)]
pub struct Dense {
    pub n: usize,
    pub m: Vec<Vec<f64>>,
    pub offset: f64,
}

impl Dense {
    /// Each upper-triangular entry (diagonal included) is present with
    /// probability `density`; values are integers in [-range, range] when
    /// `integer`, else reals in the same interval.
    pub fn random(n: usize, density: f64, range: f64, integer: bool, seed: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut m = vec![vec![0.0; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for v in row.iter_mut().skip(i) {
                if rng.gen::<f64>() < density {
                    *v = if integer {
                        rng.gen_range(-(range as i64)..=range as i64) as f64
                    } else {
                        rng.gen_range(-range..=range)
                    };
                }
            }
        }
        Self { n, m, offset: 0.0 }
    }

    pub fn eval(&self, x: &[bool]) -> f64 {
        let mut total = self.offset;
        for i in 0..self.n {
            for j in i..self.n {
                if x[i] && x[j] {
                    total += self.m[i][j];
                }
            }
        }
        total
    }

    pub fn qubo(&self) -> Qubo {
        let mut terms = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                if self.m[i][j] != 0.0 {
                    terms.push((i, j, self.m[i][j]));
                }
            }
        }
        Qubo::from_terms(self.n, terms).unwrap()
    }
}

/// Bits of `b`, least significant first.
pub fn bits(b: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| (b >> j) & 1 == 1).collect()
}

pub fn bitstring(v: &[bool]) -> BitString {
    v.iter().copied().collect()
}

pub fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<bool> {
    (0..n).map(|_| rng.gen::<bool>()).collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Minimum over all assignments by direct enumeration; lowest index wins ties.
pub fn enumerate_min(f: impl Fn(&[bool]) -> f64, n: usize) -> (usize, f64) {
    let mut best = (0, f(&bits(0, n)));
    for b in 1..1usize << n {
        let v = f(&bits(b, n));
        if v < best.1 {
            best = (b, v);
        }
    }
    best
}
