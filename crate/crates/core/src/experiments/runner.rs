use std::fmt::Write as _;
use std::path::Path;

use super::config::{Algorithm, RunConfig};
use super::context::IndicatorContext;
use super::files::{
    write_atomic, ExperimentSummary, FrontFile, FrontPoint, MeanStd, RunMeta, RunRecord, RunTrace, TraceRow,
    SUMMARY_TAG,
};
use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, LoadOptions, MetricSelection, TabularBenchmark};
use crate::evolution::{run_moenas, run_pdns, SearchConfig, SearchOutcome};
use crate::indicators::mean_std;
use crate::seeded_rng;

/// Environment variable holding the number of parallel runs.
pub const WORKERS_ENV: &str = "PDNS_WORKERS";

/// A configuration bound to a loaded benchmark, ready to run seeds.
#[derive(Debug)]
pub struct Experiment<'b> {
    config: RunConfig,
    bench: &'b TabularBenchmark,
    selection: MetricSelection,
    search: SearchConfig,
    context: IndicatorContext,
    label: String,
}

/// Everything one seed produced.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub index: usize,
    pub seed: u64,
    pub outcome: SearchOutcome,
    pub trace: RunTrace,
    pub front: FrontFile,
}

impl RunResult {
    pub fn final_row(&self) -> &TraceRow {
        self.trace.last().expect("a trace has at least the initial row")
    }

    pub fn igd_plus(&self) -> f64 {
        self.final_row().igd_plus.expect("last row carries indicators")
    }

    pub fn hypervolume(&self) -> f64 {
        self.final_row().hypervolume.expect("last row carries indicators")
    }

    /// One JSON line per generation listing the archive keys.
    pub fn snapshots_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.outcome.history {
            let keys: Vec<String> = s.archive.iter().map(|g| g.key()).collect();
            let line = serde_json::json!({ "generation": s.generation, "archive": keys });
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
        }
        Ok(out)
    }
}

impl<'b> Experiment<'b> {
    pub fn new(config: RunConfig, bench: &'b TabularBenchmark) -> Result<Self> {
        config.validate()?;
        let selection = bench.select(&config.metrics)?;
        let complexity = selection.specs()[selection.complexity_position()].name.clone();
        let context = IndicatorContext::new(bench, &config.evaluation_column, &complexity, config.reference_point)?;
        let search = config.search_config(bench.space());
        search.validate()?;
        let label = config.label_for(&selection);
        Ok(Experiment {
            config,
            bench,
            selection,
            search,
            context,
            label,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn search_config(&self) -> &SearchConfig {
        &self.search
    }

    pub fn context(&self) -> &IndicatorContext {
        &self.context
    }

    pub fn benchmark(&self) -> &'b TabularBenchmark {
        self.bench
    }

    pub fn seed_for(&self, index: usize) -> u64 {
        self.config.seed.wrapping_add(index as u64)
    }

    fn meta(&self, seed: u64) -> RunMeta {
        RunMeta {
            label: self.label.clone(),
            seed,
            benchmark: self.bench.fingerprint().to_string(),
            indicators: self.context.settings().clone(),
        }
    }

    /// Runs repeat `index` with seed `base + index`.
    pub fn run(&self, index: usize) -> Result<RunResult> {
        let seed = self.seed_for(index);
        self.run_seed(index, seed).map_err(|e| Error::Run {
            index,
            seed,
            source: Box::new(e),
        })
    }

    fn run_seed(&self, index: usize, seed: u64) -> Result<RunResult> {
        let mut evaluator = Evaluator::new(self.bench, self.selection.clone(), self.config.cost_mode);
        let mut rng = seeded_rng(seed);
        let outcome = match self.config.algorithm {
            Algorithm::Pdns => run_pdns(&self.search, &mut evaluator, &mut rng)?,
            Algorithm::Moenas => run_moenas(&self.search, &mut evaluator, &mut rng)?,
        };

        let last = outcome.history.len() - 1;
        let stride = self.config.indicator_stride;
        let rows = outcome
            .history
            .iter()
            .enumerate()
            .map(|(i, snap)| {
                let measured = if i % stride == 0 || i == last {
                    Some(self.context.measure(self.bench, &snap.archive)?)
                } else {
                    None
                };
                Ok(TraceRow {
                    generation: snap.generation,
                    cost_seconds: snap.ledger.simulated_cost_seconds,
                    unique_evaluations: snap.ledger.unique_evaluations,
                    total_evaluations: snap.ledger.total_evaluations,
                    archive_size: snap.archive.len(),
                    igd_plus: measured.map(|m| m.igd_plus),
                    hypervolume: measured.map(|m| m.hypervolume),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let points = outcome
            .archive
            .entries()
            .iter()
            .map(|e| {
                Ok(FrontPoint {
                    key: e.genotype.key(),
                    descriptors: e.descriptors.values().to_vec(),
                    truth: self.context.table_values_of(self.bench, &e.genotype)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(RunResult {
            index,
            seed,
            trace: RunTrace {
                meta: self.meta(seed),
                rows,
            },
            front: FrontFile {
                meta: self.meta(seed),
                descriptor_names: self.selection.specs().iter().map(|s| s.name.clone()).collect(),
                points,
            },
            outcome,
        })
    }

    /// Runs every repeat, in parallel when enabled, in index order.
    pub fn run_all(&self) -> Result<Vec<RunResult>> {
        let results = map_indices(self.config.repeats, |i| self.run(i))?;
        results.into_iter().collect()
    }

    /// Builds the summary from finished runs without touching the disk.
    pub fn summarize(&self, runs: &[RunResult]) -> Result<ExperimentSummary> {
        if runs.is_empty() {
            return Err(Error::contract("no runs to summarize"));
        }
        let stat = |f: &dyn Fn(&RunResult) -> f64| {
            let (mean, std) = mean_std(&runs.iter().map(f).collect::<Vec<_>>());
            MeanStd { mean, std }
        };
        Ok(ExperimentSummary {
            format: SUMMARY_TAG.to_string(),
            label: self.label.clone(),
            algorithm: self.config.algorithm,
            metrics: self.selection.specs().iter().map(|s| s.name.clone()).collect(),
            benchmark: self.bench.fingerprint().to_string(),
            population_size: self.search.population_size,
            generations: self.search.generations,
            base_seed: self.config.seed,
            indicators: self.context.settings().clone(),
            oracle_hypervolume: self.context.oracle_hypervolume()?,
            igd_plus: stat(&|r| r.igd_plus()),
            hypervolume: stat(&|r| r.hypervolume()),
            cost_seconds: stat(&|r| r.final_row().cost_seconds),
            runs: runs
                .iter()
                .map(|r| RunRecord {
                    index: r.index,
                    seed: r.seed,
                    igd_plus: r.igd_plus(),
                    hypervolume: r.hypervolume(),
                    cost_seconds: r.final_row().cost_seconds,
                    unique_evaluations: r.final_row().unique_evaluations,
                    archive_size: r.final_row().archive_size,
                    trace: file_name(r.index, "trace.tsv"),
                    front: file_name(r.index, "front.tsv"),
                    snapshots: file_name(r.index, "snapshots.jsonl"),
                })
                .collect(),
        })
    }

    /// Writes per-run trace, front and snapshot files, then `summary.json`.
    pub fn write(&self, dir: &Path, runs: &[RunResult]) -> Result<ExperimentSummary> {
        let summary = self.summarize(runs)?;
        map_indices(runs.len(), |i| -> Result<()> {
            let r = &runs[i];
            write_atomic(&dir.join(file_name(r.index, "trace.tsv")), &r.trace.to_tsv())?;
            write_atomic(&dir.join(file_name(r.index, "front.tsv")), &r.front.to_tsv())?;
            write_atomic(&dir.join(file_name(r.index, "snapshots.jsonl")), &r.snapshots_jsonl()?)
        })?
        .into_iter()
        .collect::<Result<()>>()?;
        write_atomic(&dir.join("summary.json"), &summary.to_json()?)?;
        Ok(summary)
    }
}

fn file_name(index: usize, suffix: &str) -> String {
    format!("run-{index:03}.{suffix}")
}

/// Loads the benchmark, runs every repeat and writes all files under the
/// configured output directory.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let bench = TabularBenchmark::load(
        &config.benchmark,
        &LoadOptions {
            allow_partial: config.allow_partial,
            ..LoadOptions::default()
        },
    )?;
    let experiment = Experiment::new(config.clone(), &bench)?;
    let runs = experiment.run_all()?;
    experiment.write(&config.output_dir, &runs)
}

/// Worker count from the environment; `None` means one per core.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{WORKERS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

#[cfg(feature = "parallel")]
fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    let workers = workers_from_env()?;
    if workers == Some(1) {
        return Ok((0..n).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Result<Vec<T>> {
    workers_from_env()?;
    Ok((0..n).map(f).collect())
}

/// Plain-text one-line summary of an experiment.
pub fn describe(summary: &ExperimentSummary) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "{}: {} runs, IGD+ {:.4} ± {:.4}, HV {:.4} ± {:.4} (oracle {:.4}), cost {:.1} s",
        summary.label,
        summary.runs.len(),
        summary.igd_plus.mean,
        summary.igd_plus.std,
        summary.hypervolume.mean,
        summary.hypervolume.std,
        summary.oracle_hypervolume,
        summary.cost_seconds.mean
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::generate_synthetic;
    use crate::space::SearchSpace;

    fn config(algorithm: Algorithm, generations: usize) -> RunConfig {
        let mut c = RunConfig::new(
            algorithm,
            "unused",
            ["synflow", "jacov", "snip", "flops"].map(String::from).to_vec(),
        );
        c.generations = Some(generations);
        c.population_size = 6;
        c.repeats = 3;
        c
    }

    #[test]
    fn zero_generations_gives_one_row() {
        let bench = generate_synthetic(&SearchSpace::uniform(3, 3).unwrap(), 5, 0.8).unwrap();
        let e = Experiment::new(config(Algorithm::Pdns, 0), &bench).unwrap();
        let r = e.run(0).unwrap();
        assert_eq!(r.trace.rows.len(), 1);
        assert!(r.trace.rows[0].hypervolume.is_some());
        assert_eq!(e.label(), "MTF-PDNS");
    }

    #[test]
    fn stride_keeps_last_row() {
        let bench = generate_synthetic(&SearchSpace::uniform(3, 3).unwrap(), 5, 0.8).unwrap();
        let mut c = config(Algorithm::Moenas, 5);
        c.indicator_stride = 2;
        let e = Experiment::new(c, &bench).unwrap();
        let r = e.run(1).unwrap();
        let measured: Vec<bool> = r.trace.rows.iter().map(|row| row.igd_plus.is_some()).collect();
        assert_eq!(measured, vec![true, false, true, false, true, true]);
        assert_eq!(r.seed, 1);
    }

    #[test]
    fn runs_are_independent_of_order() {
        let bench = generate_synthetic(&SearchSpace::uniform(4, 3).unwrap(), 2, 0.8).unwrap();
        let e = Experiment::new(config(Algorithm::Pdns, 4), &bench).unwrap();
        let all = e.run_all().unwrap();
        let again = e.run(2).unwrap();
        assert_eq!(all[2].trace, again.trace);
        assert_eq!(all[2].front, again.front);
    }

    #[test]
    fn bad_metric_is_rejected() {
        let bench = generate_synthetic(&SearchSpace::uniform(2, 2).unwrap(), 2, 0.8).unwrap();
        let mut c = config(Algorithm::Pdns, 1);
        c.metrics = vec!["synflow".into(), "params".into()];
        assert!(Experiment::new(c, &bench).is_err());
    }
}
