//! Variation operators, the novelty-driven generational loop and the
//! NSGA-II baseline.

mod nsga2;
mod pdns;
mod variation;

use serde::{Deserialize, Serialize};

use crate::archive::{ArchiveEntry, EliteArchive};
use crate::error::{Error, Result};
use crate::evaluator::{EvalLedger, Evaluator};
use crate::novelty::NoveltyScore;
use crate::space::{canonicalize, DescriptorSet, Genotype, ObjectiveVector};

pub use nsga2::{crowding_distance, fast_nondominated_sort, run_moenas, MAX_MATING_ROUNDS};
pub use pdns::{run_pdns, select_by_novelty};
pub use variation::{
    crossover_at, polynomial_integer_mutation, random_genotype, two_point_crossover, uniform_mutation, Crossover,
    Mutation, VariationConfig, DEFAULT_POLYNOMIAL_ETA,
};

pub const DEFAULT_POPULATION: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub descriptors: DescriptorSet,
    pub objectives: ObjectiveVector,
    pub score: Option<NoveltyScore>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub population_size: usize,
    pub generations: usize,
    pub variation: VariationConfig,
    /// NSGA-II only: drop offspring that repeat a genotype already in the
    /// population or the brood, re-mating up to [`MAX_MATING_ROUNDS`] times.
    #[serde(default)]
    pub eliminate_duplicates: bool,
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 || !self.population_size.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "population size must be even and >= 2, got {}",
                self.population_size
            )));
        }
        self.variation.validate()
    }
}

/// State of a run after initialization (generation 0) or a generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSnapshot {
    pub generation: usize,
    pub ledger: EvalLedger,
    /// Archive members in insertion order.
    pub archive: Vec<Genotype>,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub archive: EliteArchive,
    pub history: Vec<GenerationSnapshot>,
}

/// Evaluates `g`, offers it to the archive and wraps it as an individual.
pub(crate) fn evaluate_into(
    g: Genotype,
    evaluator: &mut Evaluator<'_>,
    archive: &mut EliteArchive,
) -> Result<Individual> {
    let descriptors = evaluator.evaluate(&g)?;
    let objectives = canonicalize(&descriptors, evaluator.specs())?;
    archive.try_insert(ArchiveEntry {
        genotype: g.clone(),
        descriptors: descriptors.clone(),
        objectives: objectives.clone(),
        seq: 0,
    });
    Ok(Individual {
        genotype: g,
        descriptors,
        objectives,
        score: None,
    })
}

pub(crate) fn snapshot(generation: usize, evaluator: &Evaluator<'_>, archive: &EliteArchive) -> GenerationSnapshot {
    GenerationSnapshot {
        generation,
        ledger: evaluator.ledger(),
        archive: archive.genotypes().cloned().collect(),
    }
}
