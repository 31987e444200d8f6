//! Multi-objective search over finite categorical design spaces.
//!
//! The engine couples an elitist Pareto archive with a signed novelty score
//! computed in a normalized descriptor space (Pareto dominance-based novelty
//! search, "PDNS"), and ships an NSGA-II baseline, tabular benchmark
//! ingestion with simulated cost accounting, IGD+/hypervolume indicators and
//! a multi-seed experiment harness.
//!
//! All randomness flows through [`rand_chacha::ChaCha8Rng`] seeded from a
//! `u64`, so a run is a pure function of benchmark, configuration and seed.

pub mod archive;
pub mod error;
pub mod evaluator;
pub mod evolution;
pub mod experiments;
pub mod indicators;
pub mod novelty;
pub mod space;

pub use archive::{ArchiveEntry, EliteArchive, InsertOutcome};
pub use error::{Error, Result};
pub use space::{
    canonicalize, dominates, euclidean_distance, DescriptorSet, Direction, Genotype, MetricRole, MetricSpec,
    ObjectiveVector, SearchSpace, Transform,
};

/// The generator used for every stochastic decision in the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Builds the crate's generator from a plain integer seed.
pub fn seeded_rng(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
