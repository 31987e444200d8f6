use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{exhaustive_pareto, TabularBenchmark};
use crate::indicators::{hypervolume_2d, igd_plus, normalize_front, Bounds, FrontSet, RunIndicators};
use crate::space::Genotype;

/// Everything that fixes how fronts are scored: the two ground-truth
/// objectives, the normalization bounds and the reference point. Runs and
/// summaries are only comparable when their settings are equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSettings {
    /// Evaluation column, then complexity metric.
    pub objectives: [String; 2],
    pub bounds: Bounds,
    pub reference_point: [f64; 2],
}

/// Scores archive snapshots against the exhaustive ground-truth front of a
/// benchmark, in normalized minimization units.
#[derive(Debug, Clone)]
pub struct IndicatorContext {
    settings: IndicatorSettings,
    column: usize,
    column_sign: f64,
    metric: usize,
    metric_sign: f64,
    /// Ground-truth front in raw minimization units.
    true_front: FrontSet,
    /// The same front, normalized.
    reference: FrontSet,
}

impl IndicatorContext {
    pub fn new(bench: &TabularBenchmark, column: &str, complexity: &str, reference_point: [f64; 2]) -> Result<Self> {
        let column_idx = bench.column_index(column)?;
        let metric_idx = bench.metric_index(complexity)?;
        let front = exhaustive_pareto(bench, &[column, complexity])?;
        let true_front = FrontSet::labelled(front.into_iter().map(|(g, v)| (v.into_inner(), g.key())).collect());

        let column_sign = bench.evaluation_columns()[column_idx].direction.sign();
        let metric_sign = bench.specs()[metric_idx].direction.sign();
        let mut bounds = Bounds::of(&true_front)?;
        if bounds.is_degenerate() {
            // widen flat objectives to the range over the whole table, then to unit width
            let all = FrontSet::new(
                bench
                    .records()
                    .map(|(_, r)| {
                        vec![
                            column_sign * r.evaluations[column_idx],
                            metric_sign * r.metrics[metric_idx],
                        ]
                    })
                    .collect(),
            );
            let pooled = Bounds::of(&all)?;
            for k in 0..2 {
                if bounds.upper[k] <= bounds.lower[k] {
                    bounds.lower[k] = pooled.lower[k];
                    bounds.upper[k] = pooled.upper[k];
                }
                if bounds.upper[k] <= bounds.lower[k] {
                    bounds.upper[k] = bounds.lower[k] + 1.0;
                }
            }
        }
        let reference = normalize_front(&true_front, &bounds)?;
        Ok(IndicatorContext {
            settings: IndicatorSettings {
                objectives: [column.to_string(), complexity.to_string()],
                bounds,
                reference_point,
            },
            column: column_idx,
            column_sign,
            metric: metric_idx,
            metric_sign,
            true_front,
            reference,
        })
    }

    pub fn settings(&self) -> &IndicatorSettings {
        &self.settings
    }

    /// Ground-truth Pareto front in raw minimization units, labelled by key.
    pub fn true_front(&self) -> &FrontSet {
        &self.true_front
    }

    /// Ground-truth front in normalized units.
    pub fn reference_front(&self) -> &FrontSet {
        &self.reference
    }

    /// Hypervolume of the ground-truth front itself.
    pub fn oracle_hypervolume(&self) -> Result<f64> {
        hypervolume_2d(&self.reference, &self.settings.reference_point)
    }

    /// Raw minimization objectives of one genotype.
    pub fn objectives_of(&self, bench: &TabularBenchmark, g: &Genotype) -> Result<[f64; 2]> {
        let r = bench.record(g)?;
        Ok([
            self.column_sign * r.evaluations[self.column],
            self.metric_sign * r.metrics[self.metric],
        ])
    }

    /// The two ground-truth values of a genotype as stored in the table.
    pub fn table_values_of(&self, bench: &TabularBenchmark, g: &Genotype) -> Result<[f64; 2]> {
        let r = bench.record(g)?;
        Ok([r.evaluations[self.column], r.metrics[self.metric]])
    }

    /// Normalized ground-truth images of a set of genotypes.
    pub fn front_of<'g>(
        &self,
        bench: &TabularBenchmark,
        genotypes: impl IntoIterator<Item = &'g Genotype>,
    ) -> Result<FrontSet> {
        let raw = genotypes
            .into_iter()
            .map(|g| Ok((self.objectives_of(bench, g)?.to_vec(), g.key())))
            .collect::<Result<Vec<_>>>()?;
        normalize_front(&FrontSet::labelled(raw), &self.settings.bounds)
    }

    pub fn measure<'g>(
        &self,
        bench: &TabularBenchmark,
        genotypes: impl IntoIterator<Item = &'g Genotype>,
    ) -> Result<RunIndicators> {
        let front = self.front_of(bench, genotypes)?;
        if front.is_empty() {
            return Err(Error::contract("cannot score an empty archive"));
        }
        Ok(RunIndicators {
            igd_plus: igd_plus(&front, &self.reference)?,
            hypervolume: hypervolume_2d(&front, &self.settings.reference_point)?,
        })
    }
}
