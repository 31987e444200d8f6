//! Unbounded elitist archive of mutually non-dominated evaluated candidates.
//!
//! The archive is the search's only memory: PDNS measures novelty against it
//! and both algorithms report it as their approximation front. Candidates
//! whose objective vector equals a current member's are rejected (first in
//! wins), so no two members ever share an objective vector.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::space::{canonicalize, compare, DescriptorSet, Dominance, Genotype, MetricSpec, ObjectiveVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub genotype: Genotype,
    pub descriptors: DescriptorSet,
    pub objectives: ObjectiveVector,
    /// Position in the archive's insertion sequence.
    #[serde(default)]
    pub seq: u64,
}

impl ArchiveEntry {
    pub fn new(genotype: Genotype, descriptors: DescriptorSet, specs: &[MetricSpec]) -> Result<Self> {
        let objectives = canonicalize(&descriptors, specs)?;
        Ok(ArchiveEntry {
            genotype,
            descriptors,
            objectives,
            seq: 0,
        })
    }

    /// Entry whose descriptors already are minimization objectives.
    pub fn from_objectives(genotype: Genotype, objectives: Vec<f64>) -> Self {
        ArchiveEntry {
            genotype,
            descriptors: DescriptorSet::new(objectives.clone()),
            objectives: ObjectiveVector::new(objectives),
            seq: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InsertOutcome {
    pub accepted: bool,
    pub evicted: Vec<ArchiveEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct EliteArchive {
    // kept in insertion order; eviction uses order-preserving removal
    entries: Vec<ArchiveEntry>,
    members: HashSet<Genotype>,
    insertion_counter: u64,
}

impl EliteArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn insertion_counter(&self) -> u64 {
        self.insertion_counter
    }

    pub fn try_insert(&mut self, mut candidate: ArchiveEntry) -> InsertOutcome {
        let cand = candidate.objectives.values();
        let mut dominated_members = Vec::new();
        for (i, entry) in self.entries.iter().enumerate() {
            match compare(entry.objectives.values(), cand) {
                Dominance::Dominates | Dominance::Equal => return InsertOutcome::default(),
                Dominance::DominatedBy => dominated_members.push(i),
                Dominance::Incomparable => {}
            }
        }

        let mut evicted = Vec::with_capacity(dominated_members.len());
        if !dominated_members.is_empty() {
            let mut next = dominated_members.iter().peekable();
            let mut kept = Vec::with_capacity(self.entries.len() - dominated_members.len() + 1);
            for (i, entry) in std::mem::take(&mut self.entries).into_iter().enumerate() {
                if next.peek() == Some(&&i) {
                    next.next();
                    self.members.remove(&entry.genotype);
                    evicted.push(entry);
                } else {
                    kept.push(entry);
                }
            }
            self.entries = kept;
        }

        candidate.seq = self.insertion_counter;
        self.insertion_counter += 1;
        self.members.insert(candidate.genotype.clone());
        self.entries.push(candidate);
        InsertOutcome {
            accepted: true,
            evicted,
        }
    }

    pub fn contains_genotype(&self, g: &Genotype) -> bool {
        self.members.contains(g)
    }

    /// Copy of the current members in insertion order.
    pub fn snapshot_front(&self) -> Vec<ArchiveEntry> {
        self.entries.clone()
    }

    pub fn genotypes(&self) -> impl Iterator<Item = &Genotype> {
        self.entries.iter().map(|e| &e.genotype)
    }
}
