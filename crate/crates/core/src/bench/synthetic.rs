use rand::Rng;

use crate::qubo::{Qubo, QuboBuilder, Sense};
use crate::seeded_rng;

/// Random problem with integer coefficients uniform in `[-range, range]`,
/// every linear term present and each coupling present with probability
/// `density`.
pub fn random_qubo(n: usize, density: f64, range: i64, seed: u64) -> Qubo {
    let mut rng = seeded_rng(seed, 7);
    let mut b = QuboBuilder::new(n);
    for i in 0..n {
        for j in i..n {
            if i == j || rng.gen::<f64>() < density {
                let v = rng.gen_range(-range..=range) as f64;
                b.add(i, j, v).expect("indices in range");
            }
        }
    }
    b.build()
}

/// Eight maximization-style instances of 30 to 100 variables with
/// densities from 0.1 to 0.8, negated like OR-Library input.
pub fn synthetic_suite(seed: u64) -> Vec<Qubo> {
    (0..8)
        .map(|i| {
            let n = 30 + 10 * i;
            let density = 0.1 * (i + 1) as f64;
            let q = random_qubo(
                n,
                density,
                100,
                seed.wrapping_mul(1000).wrapping_add(i as u64),
            );
            q.with_sense(Sense::MaximizeNegated)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_sized() {
        let a = random_qubo(12, 0.5, 10, 3);
        assert_eq!(a, random_qubo(12, 0.5, 10, 3));
        assert_ne!(a, random_qubo(12, 0.5, 10, 4));
        let suite = synthetic_suite(0);
        assert_eq!(suite.len(), 8);
        assert_eq!(suite[0].n(), 30);
        assert_eq!(suite[7].n(), 100);
    }
}
