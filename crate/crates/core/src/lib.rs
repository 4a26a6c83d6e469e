//! Tabu search for QUBO problems with pluggable neighborhood samplers.
//!
//! The crate is organized bottom-up:
//!
//! - [`qubo`]: the problem model, OR-Library ingestion, incremental move
//!   values and clamping to subproblems.
//! - [`qaoa`]: an exact statevector simulator for depth-p QAOA on a
//!   subproblem, with an optional locality penalty layer.
//! - [`angle_opt`]: a budgeted derivative-free optimizer for QAOA angles.
//! - [`samplers`]: the [`samplers::NeighborhoodSampler`] contract and its
//!   brute-force, simulated-annealing and QAOA implementations.
//! - [`tabu`]: one-flip tabu search and the sampler-driven variant.
//! - [`bench`]: experiment harness pieces (reduced suites, ECDFs, energy
//!   distributions, experiment matrices).

pub mod angle_opt;
pub mod bench;
pub mod bitstring;
pub mod qaoa;
pub mod qubo;
pub mod samplers;
pub mod tabu;

pub use bitstring::BitString;
pub use qubo::{IsingModel, MoveTable, Qubo, QuboBuilder, QuboError, Sense, SubProblem};

/// RNG used for every seeded stream in the crate.
pub type SearchRng = rand_chacha::ChaCha8Rng;

/// Seeds a [`SearchRng`] on a given stream so that independent consumers
/// derived from one seed never share random numbers.
pub fn seeded_rng(seed: u64, stream: u64) -> SearchRng {
    use rand::SeedableRng;
    let mut rng = SearchRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
