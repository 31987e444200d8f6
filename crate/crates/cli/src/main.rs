use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pdns_core::evaluator::{exhaustive_pareto, synthetic_jsonl, CostMode, LoadOptions, TabularBenchmark};
use pdns_core::evolution::Mutation;
use pdns_core::experiments::{
    compare_experiments, describe, emit_plot_data, run_experiment, write_atomic, Algorithm, ExperimentSummary,
    IndicatorContext, RunConfig, RunTrace,
};
use pdns_core::indicators::DEFAULT_REFERENCE;
use pdns_core::SearchSpace;

#[derive(Parser)]
#[command(
    name = "pdns",
    version,
    about = "Pareto dominance-based novelty search over tabular benchmarks"
)]
#[command(after_help = "Parallel repeats use the worker count in PDNS_WORKERS (default: one per core).")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write traces, fronts and a summary.
    Run(Box<RunArgs>),
    /// Tabulate summaries with rank-sum significance marks.
    Compare(CompareArgs),
    /// Aggregate trace files into cost-indexed mean/std curves.
    PlotData(PlotArgs),
    /// Print the exhaustive Pareto front of a benchmark.
    Oracle(OracleArgs),
    /// Check a benchmark file and report repairs.
    Validate(ValidateArgs),
    /// Generate a synthetic benchmark file.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment file; flags override its fields.
    config: Option<PathBuf>,
    #[arg(long)]
    algorithm: Option<Algorithm>,
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Descriptor metrics, comma separated (performance metrics plus one complexity metric).
    #[arg(long, value_delimiter = ',')]
    metrics: Option<Vec<String>>,
    #[arg(long)]
    evaluation_column: Option<String>,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    /// uniform | polynomial-integer
    #[arg(long, value_parser = parse_mutation)]
    mutation: Option<Mutation>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    polynomial_eta: Option<f64>,
    /// NSGA-II offspring duplicate elimination (true | false).
    #[arg(long)]
    eliminate_duplicates: Option<bool>,
    /// Charge every evaluation call instead of each distinct genotype once.
    #[arg(long, conflicts_with = "dedup_cost")]
    no_dedup_cost: bool,
    #[arg(long)]
    dedup_cost: bool,
    #[arg(long)]
    indicator_stride: Option<usize>,
    /// Two comma-separated values in normalized objective space.
    #[arg(long, value_parser = parse_pair)]
    reference_point: Option<[f64; 2]>,
    #[arg(long)]
    allow_partial: bool,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Summary files, or directories containing summary.json.
    #[arg(required = true, num_args = 2..)]
    summaries: Vec<PathBuf>,
    /// Emit the comparison as JSON.
    #[arg(long)]
    json: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Trace files, or directories whose *.trace.tsv files are all used.
    #[arg(required = true)]
    traces: Vec<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    benchmark: PathBuf,
    /// Objective columns, comma separated; metric or evaluation column names.
    #[arg(long, value_delimiter = ',', default_value = "test_acc,flops")]
    objectives: Vec<String>,
    #[arg(long)]
    allow_partial: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    benchmark: PathBuf,
    /// Metrics that must be present, comma separated.
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    #[arg(long)]
    allow_partial: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Choices per position, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["positions", "choices"])]
    cardinalities: Option<Vec<u32>>,
    #[arg(long, default_value_t = 6)]
    positions: usize,
    #[arg(long, default_value_t = 5)]
    choices: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target Spearman correlation of each proxy with the ground truth.
    #[arg(long, default_value_t = 0.8)]
    correlation: f64,
    #[arg(short, long)]
    output: PathBuf,
}

fn parse_mutation(s: &str) -> std::result::Result<Mutation, String> {
    match s {
        "uniform" => Ok(Mutation::Uniform),
        "polynomial-integer" | "polynomial" => Ok(Mutation::PolynomialInteger),
        other => Err(format!("unknown mutation `{other}` (uniform | polynomial-integer)")),
    }
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [a, b] => Ok([
            a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?,
            b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?,
        ]),
        _ => Err(format!("expected two comma-separated numbers, got `{s}`")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(*a),
        Command::Compare(a) => cmd_compare(a),
        Command::PlotData(a) => cmd_plot(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn build_config(a: &RunArgs) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(path) => RunConfig::load(path)?,
        None => {
            let (Some(algorithm), Some(benchmark), Some(metrics)) = (a.algorithm, &a.benchmark, &a.metrics) else {
                bail!("without a config file, --algorithm, --benchmark and --metrics are required");
            };
            RunConfig::new(algorithm, benchmark, metrics.clone())
        }
    };
    if let Some(v) = a.algorithm {
        c.algorithm = v;
    }
    if let Some(v) = &a.benchmark {
        c.benchmark = v.clone();
    }
    if let Some(v) = &a.metrics {
        c.metrics = v.clone();
    }
    if let Some(v) = &a.evaluation_column {
        c.evaluation_column = v.clone();
    }
    if let Some(v) = a.population_size {
        c.population_size = v;
    }
    if let Some(v) = a.generations {
        c.generations = Some(v);
    }
    if let Some(v) = a.seed {
        c.seed = v;
    }
    if let Some(v) = a.repeats {
        c.repeats = v;
    }
    if let Some(v) = a.mutation {
        c.mutation = Some(v);
    }
    if let Some(v) = a.mutation_rate {
        c.mutation_rate = Some(v);
    }
    if let Some(v) = a.polynomial_eta {
        c.polynomial_eta = v;
    }
    if let Some(v) = a.eliminate_duplicates {
        c.eliminate_duplicates = Some(v);
    }
    if a.no_dedup_cost {
        c.cost_mode = CostMode::EveryCall;
    }
    if a.dedup_cost {
        c.cost_mode = CostMode::Dedup;
    }
    if let Some(v) = a.indicator_stride {
        c.indicator_stride = v;
    }
    if let Some(v) = &a.reference_point {
        c.reference_point = *v;
    }
    if a.allow_partial {
        c.allow_partial = true;
    }
    if let Some(v) = &a.output_dir {
        c.output_dir = v.clone();
    }
    if let Some(v) = &a.label {
        c.label = Some(v.clone());
    }
    c.validate()?;
    Ok(c)
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let config = build_config(&a)?;
    if a.print_config {
        print!("{}", config.to_toml()?);
        return Ok(());
    }
    let summary = run_experiment(&config)?;
    println!("{}", describe(&summary));
    println!("wrote {}", config.output_dir.join("summary.json").display());
    Ok(())
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary_path(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("summary.json")
    } else {
        p.to_path_buf()
    }
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let summaries = a
        .summaries
        .iter()
        .map(|p| ExperimentSummary::load(summary_path(p)))
        .collect::<pdns_core::Result<Vec<_>>>()?;
    let comparison = compare_experiments(&summaries)?;
    let text = if a.json {
        serde_json::to_string_pretty(&comparison)? + "\n"
    } else {
        comparison.render()
    };
    emit(&a.output, &text)
}

fn trace_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .with_context(|| format!("reading {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.to_string_lossy().ends_with(".trace.tsv"))
                .collect();
            if found.is_empty() {
                bail!("no *.trace.tsv files in {}", p.display());
            }
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn cmd_plot(a: PlotArgs) -> Result<()> {
    let traces = trace_files(&a.traces)?
        .iter()
        .map(RunTrace::load)
        .collect::<pdns_core::Result<Vec<_>>>()?;
    let data = emit_plot_data(&traces)?;
    emit(&a.output, &data.to_tsv())
}

fn raw_value(bench: &TabularBenchmark, record: &pdns_core::evaluator::Record, name: &str) -> Result<f64> {
    if let Ok(i) = bench.column_index(name) {
        return Ok(record.evaluations[i]);
    }
    Ok(record.metrics[bench.metric_index(name)?])
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let bench = TabularBenchmark::load(
        &a.benchmark,
        &LoadOptions {
            allow_partial: a.allow_partial,
            ..LoadOptions::default()
        },
    )?;
    let front = exhaustive_pareto(&bench, &a.objectives)?;
    let mut out = format!("# exhaustive front: {} of {} genotypes\n", front.len(), bench.len());
    if let [column, complexity] = a.objectives.as_slice() {
        if let Ok(ctx) = IndicatorContext::new(&bench, column, complexity, DEFAULT_REFERENCE) {
            out.push_str(&format!("# hypervolume: {}\n", ctx.oracle_hypervolume()?));
        }
    }
    out.push_str("key");
    for name in &a.objectives {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (g, _) in &front {
        out.push_str(&g.key());
        let record = bench.record(g)?;
        for name in &a.objectives {
            out.push_str(&format!("\t{}", raw_value(&bench, record, name)?));
        }
        out.push('\n');
    }
    emit(&a.output, &out)
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let bench = TabularBenchmark::load(
        &a.benchmark,
        &LoadOptions {
            selection: a.metrics.clone(),
            allow_partial: a.allow_partial,
        },
    )?;
    let space = bench.space();
    let size = space.size()?;
    println!("benchmark: {}", a.benchmark.display());
    println!("fingerprint: {}", bench.fingerprint());
    println!(
        "space: {} positions, cardinalities {:?}, {} genotypes",
        space.len(),
        space.cardinalities(),
        size
    );
    println!(
        "records: {} ({:.2}% coverage)",
        bench.len(),
        100.0 * bench.len() as f64 / size as f64
    );
    for spec in bench.specs() {
        println!(
            "metric {}: {:?}, {:?}, cost {}",
            spec.name,
            spec.direction,
            spec.role,
            spec.cost_field.as_deref().unwrap_or("none")
        );
    }
    for c in bench.evaluation_columns() {
        println!("evaluation column {}: {:?}", c.name, c.direction);
    }
    println!("repairs: {} non-finite values", bench.repairs().total());
    for (name, n) in &bench.repairs().per_metric {
        if *n > 0 {
            println!("  {name}: {n}");
        }
    }
    if !a.metrics.is_empty() {
        bench.select(&a.metrics)?;
        println!("selection ok: {}", a.metrics.join(","));
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let space = match a.cardinalities {
        Some(c) => SearchSpace::new(c)?,
        None => SearchSpace::uniform(a.positions, a.choices)?,
    };
    let text = synthetic_jsonl(&space, a.seed, a.correlation)?;
    write_atomic(&a.output, &text)?;
    println!("wrote {} genotypes to {}", space.size()?, a.output.display());
    Ok(())
}
