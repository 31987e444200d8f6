//! Tabular benchmarks, memoized evaluation with simulated cost accounting,
//! exhaustive reference fronts and a synthetic landscape generator.

mod format;
mod pareto;
mod synthetic;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{DescriptorSet, Direction, Genotype, MetricRole, MetricSpec, SearchSpace};

pub use format::{LoadOptions, RepairReport};
pub use pareto::{exhaustive_pareto, ENUMERATION_LIMIT};
pub use synthetic::{generate_synthetic, spearman, synthetic_jsonl, SYNTHETIC_LIMIT};

/// A ground-truth column such as test accuracy. Never consulted during search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalColumn {
    pub name: String,
    #[serde(default = "default_eval_direction")]
    pub direction: Direction,
}

fn default_eval_direction() -> Direction {
    Direction::Maximize
}

impl EvalColumn {
    pub fn new(name: impl Into<String>, direction: Direction) -> Self {
        EvalColumn {
            name: name.into(),
            direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    /// One value per benchmark metric, after repair and transform.
    pub metrics: Vec<f64>,
    /// Per-metric evaluation cost in seconds; zero for metrics without a cost field.
    pub costs: Vec<f64>,
    pub evaluations: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TabularBenchmark {
    space: SearchSpace,
    specs: Vec<MetricSpec>,
    evaluation_columns: Vec<EvalColumn>,
    records: BTreeMap<Genotype, Record>,
    repairs: RepairReport,
    fingerprint: String,
}

impl TabularBenchmark {
    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn specs(&self) -> &[MetricSpec] {
        &self.specs
    }

    pub fn evaluation_columns(&self) -> &[EvalColumn] {
        &self.evaluation_columns
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in genotype index order.
    pub fn records(&self) -> impl Iterator<Item = (&Genotype, &Record)> {
        self.records.iter()
    }

    pub fn record(&self, g: &Genotype) -> Result<&Record> {
        self.records.get(g).ok_or_else(|| Error::MissingGenotype(g.key()))
    }

    pub fn repairs(&self) -> &RepairReport {
        &self.repairs
    }

    /// SHA-256 of the source text, used to match summaries to a benchmark.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn metric_index(&self, name: &str) -> Result<usize> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownMetric(name.to_string()))
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.evaluation_columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Resolves the descriptor metrics for a run: at least one performance
    /// metric and exactly one complexity metric, no repeats.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<MetricSelection> {
        let mut indices = Vec::with_capacity(names.len());
        for name in names {
            let idx = self.metric_index(name.as_ref())?;
            if indices.contains(&idx) {
                return Err(Error::Selection(format!("metric `{}` selected twice", name.as_ref())));
            }
            indices.push(idx);
        }
        let specs: Vec<MetricSpec> = indices.iter().map(|&i| self.specs[i].clone()).collect();
        let perf = specs.iter().filter(|s| s.role == MetricRole::Performance).count();
        let complexity = specs.iter().filter(|s| s.role == MetricRole::Complexity).count();
        if perf == 0 {
            return Err(Error::Selection("no performance metric selected".into()));
        }
        if complexity != 1 {
            return Err(Error::Selection(format!(
                "exactly one complexity metric required, {complexity} selected"
            )));
        }
        Ok(MetricSelection { indices, specs })
    }

    /// Stored ground-truth value; free of charge, touches no ledger.
    pub fn ground_truth(&self, g: &Genotype, column: &str) -> Result<f64> {
        let idx = self.column_index(column)?;
        Ok(self.record(g)?.evaluations[idx])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSelection {
    indices: Vec<usize>,
    specs: Vec<MetricSpec>,
}

impl MetricSelection {
    pub fn specs(&self) -> &[MetricSpec] {
        &self.specs
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Index within the selection of the complexity metric.
    pub fn complexity_position(&self) -> usize {
        self.specs
            .iter()
            .position(|s| s.role == MetricRole::Complexity)
            .expect("validated selection has a complexity metric")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// Each distinct genotype is charged once per run.
    #[default]
    Dedup,
    /// Every evaluation call is charged.
    EveryCall,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalLedger {
    pub unique_evaluations: u64,
    pub total_evaluations: u64,
    pub simulated_cost_seconds: f64,
}

/// Per-run view of a benchmark: memoized lookups plus the cost ledger.
#[derive(Debug)]
pub struct Evaluator<'b> {
    bench: &'b TabularBenchmark,
    selection: MetricSelection,
    mode: CostMode,
    cache: HashMap<Genotype, DescriptorSet>,
    first_seen: Vec<Genotype>,
    ledger: EvalLedger,
}

impl<'b> Evaluator<'b> {
    pub fn new(bench: &'b TabularBenchmark, selection: MetricSelection, mode: CostMode) -> Self {
        Evaluator {
            bench,
            selection,
            mode,
            cache: HashMap::new(),
            first_seen: Vec::new(),
            ledger: EvalLedger::default(),
        }
    }

    pub fn benchmark(&self) -> &'b TabularBenchmark {
        self.bench
    }

    pub fn selection(&self) -> &MetricSelection {
        &self.selection
    }

    pub fn specs(&self) -> &[MetricSpec] {
        self.selection.specs()
    }

    pub fn ledger(&self) -> EvalLedger {
        self.ledger
    }

    pub fn evaluate(&mut self, g: &Genotype) -> Result<DescriptorSet> {
        if let Some(d) = self.cache.get(g) {
            self.ledger.total_evaluations += 1;
            if self.mode == CostMode::EveryCall {
                self.ledger.simulated_cost_seconds += self.cost_of(self.bench.record(g)?);
            }
            return Ok(d.clone());
        }
        let record = self.bench.record(g)?;
        let d = DescriptorSet::new(self.selection.indices.iter().map(|&i| record.metrics[i]).collect());
        self.ledger.total_evaluations += 1;
        self.ledger.unique_evaluations += 1;
        self.ledger.simulated_cost_seconds += self.cost_of(record);
        self.cache.insert(g.clone(), d.clone());
        self.first_seen.push(g.clone());
        Ok(d)
    }

    /// Distinct genotypes in order of first evaluation.
    pub fn evaluated(&self) -> &[Genotype] {
        &self.first_seen
    }

    fn cost_of(&self, record: &Record) -> f64 {
        self.selection.indices.iter().map(|&i| record.costs[i]).sum()
    }

    pub fn ground_truth(&self, g: &Genotype, column: &str) -> Result<f64> {
        self.bench.ground_truth(g, column)
    }
}
