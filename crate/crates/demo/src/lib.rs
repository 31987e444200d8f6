//! Browser demo: three JSON-in, JSON-out operations over the search engine.
//!
//! * [`run_search`] generates a synthetic benchmark, runs one seed of PDNS or
//!   NSGA-II and returns the archive's ground-truth image per generation.
//! * [`novelty_field`] scores every cell of a grid against a hand-placed
//!   two-objective archive.
//! * [`indicators`] measures a hand-placed front with IGD+ and hypervolume.
//!
//! All coordinates returned to the page are normalized minimization
//! objectives in `[0, 1]`.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use pdns_core::evaluator::generate_synthetic;
use pdns_core::experiments::{Algorithm, Experiment, RunConfig};
use pdns_core::indicators::{hypervolume_2d, igd_plus, FrontSet, DEFAULT_REFERENCE};
use pdns_core::novelty::score_population;
use pdns_core::{ArchiveEntry, EliteArchive, Genotype, SearchSpace};

/// Largest synthetic space the page may request.
pub const MAX_GENOTYPES: u64 = 20_000;
pub const MAX_GRID: usize = 128;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    pub algorithm: String,
    pub positions: usize,
    pub choices: u32,
    #[serde(default)]
    pub bench_seed: u64,
    #[serde(default = "default_correlation")]
    pub correlation: f64,
    pub metrics: Vec<String>,
    #[serde(default = "default_population")]
    pub population: usize,
    pub generations: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_correlation() -> f64 {
    0.8
}

fn default_population() -> usize {
    20
}

#[derive(Debug, Clone, Serialize)]
pub struct GenerationView {
    pub generation: usize,
    pub cost_seconds: f64,
    pub igd_plus: f64,
    pub hypervolume: f64,
    pub archive: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchView {
    pub label: String,
    pub genotypes: usize,
    pub true_front: Vec<[f64; 2]>,
    pub reference_point: [f64; 2],
    pub oracle_hypervolume: f64,
    pub generations: Vec<GenerationView>,
}

fn pair(p: &[f64]) -> [f64; 2] {
    [p[0], p[1]]
}

pub fn search(req: &SearchRequest) -> Result<SearchView, String> {
    let err = |e: pdns_core::Error| e.to_string();
    let algorithm: Algorithm = req.algorithm.parse().map_err(err)?;
    let space = SearchSpace::uniform(req.positions, req.choices).map_err(err)?;
    let size = space.size().map_err(err)?;
    if size > MAX_GENOTYPES {
        return Err(format!(
            "{size} genotypes is too many for the demo (limit {MAX_GENOTYPES})"
        ));
    }
    let bench = generate_synthetic(&space, req.bench_seed, req.correlation).map_err(err)?;
    let mut config = RunConfig::new(algorithm, "synthetic", req.metrics.clone());
    config.population_size = req.population;
    config.generations = Some(req.generations);
    config.seed = req.seed;
    let experiment = Experiment::new(config, &bench).map_err(err)?;
    let run = experiment.run(0).map_err(err)?;
    let ctx = experiment.context();

    let mut generations = Vec::with_capacity(run.outcome.history.len());
    for (snap, row) in run.outcome.history.iter().zip(&run.trace.rows) {
        let front = ctx.front_of(&bench, &snap.archive).map_err(err)?;
        generations.push(GenerationView {
            generation: snap.generation,
            cost_seconds: row.cost_seconds,
            igd_plus: row.igd_plus.unwrap_or(f64::NAN),
            hypervolume: row.hypervolume.unwrap_or(f64::NAN),
            archive: front.iter().map(pair).collect(),
        });
    }
    Ok(SearchView {
        label: experiment.label().to_string(),
        genotypes: bench.len(),
        true_front: ctx.reference_front().iter().map(pair).collect(),
        reference_point: ctx.settings().reference_point,
        oracle_hypervolume: ctx.oracle_hypervolume().map_err(err)?,
        generations,
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRequest {
    /// Points offered to the archive in order.
    pub points: Vec<[f64; 2]>,
    pub resolution: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldView {
    pub members: Vec<[f64; 2]>,
    /// Points dominated on arrival or evicted later.
    pub rejected: Vec<[f64; 2]>,
    /// Row-major signed novelty of a candidate at each cell centre, row 0 at y = 0.
    pub field: Vec<Vec<f64>>,
    pub min: f64,
    pub max: f64,
}

fn entry(i: usize, p: [f64; 2]) -> ArchiveEntry {
    ArchiveEntry::from_objectives(Genotype::new(vec![i as u32]), p.to_vec())
}

/// Each cell's value is the score a candidate placed there would receive
/// after being offered to the archive, exactly as in a search generation.
pub fn field(req: &FieldRequest) -> Result<FieldView, String> {
    if req.points.is_empty() {
        return Err("place at least one point".into());
    }
    if !(1..=MAX_GRID).contains(&req.resolution) {
        return Err(format!("resolution must be within 1..={MAX_GRID}"));
    }
    if req.points.iter().flatten().any(|v| !v.is_finite()) {
        return Err("points must be finite".into());
    }
    let mut archive = EliteArchive::new();
    for (i, &p) in req.points.iter().enumerate() {
        archive.try_insert(entry(i, p));
    }
    let probe = req.points.len();
    let n = req.resolution;
    let mut out = Vec::with_capacity(n);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in 0..n {
        let y = (row as f64 + 0.5) / n as f64;
        let mut cells = Vec::with_capacity(n);
        for col in 0..n {
            let x = (col as f64 + 0.5) / n as f64;
            let mut trial = archive.clone();
            let candidate = entry(probe, [x, y]);
            let (g, d) = (candidate.genotype.clone(), candidate.descriptors.clone());
            trial.try_insert(candidate);
            let score = score_population([(&g, &d)], &trial).map_err(|e| e.to_string())?[0].value;
            min = min.min(score);
            max = max.max(score);
            cells.push(score);
        }
        out.push(cells);
    }
    let rejected = req
        .points
        .iter()
        .enumerate()
        .filter(|(i, _)| !archive.contains_genotype(&Genotype::new(vec![*i as u32])))
        .map(|(_, p)| *p)
        .collect();
    Ok(FieldView {
        members: archive.entries().iter().map(|e| pair(e.objectives.values())).collect(),
        rejected,
        field: out,
        min,
        max,
    })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndicatorRequest {
    pub front: Vec<[f64; 2]>,
    pub reference_front: Vec<[f64; 2]>,
    #[serde(default = "default_reference")]
    pub reference_point: [f64; 2],
}

fn default_reference() -> [f64; 2] {
    DEFAULT_REFERENCE
}

#[derive(Debug, Clone, Serialize)]
pub struct IndicatorView {
    pub igd_plus: f64,
    pub hypervolume: f64,
    pub reference_hypervolume: f64,
    /// The non-dominated subset of the submitted front.
    pub nondominated: Vec<[f64; 2]>,
}

pub fn measure(req: &IndicatorRequest) -> Result<IndicatorView, String> {
    if req.front.is_empty() || req.reference_front.is_empty() {
        return Err("both fronts need at least one point".into());
    }
    let err = |e: pdns_core::Error| e.to_string();
    let front = FrontSet::new(req.front.iter().map(|p| p.to_vec()).collect());
    let reference = FrontSet::new(req.reference_front.iter().map(|p| p.to_vec()).collect());
    let mut archive = EliteArchive::new();
    for (i, &p) in req.front.iter().enumerate() {
        archive.try_insert(entry(i, p));
    }
    Ok(IndicatorView {
        igd_plus: igd_plus(&front, &reference).map_err(err)?,
        hypervolume: hypervolume_2d(&front, &req.reference_point).map_err(err)?,
        reference_hypervolume: hypervolume_2d(&reference, &req.reference_point).map_err(err)?,
        nondominated: archive.entries().iter().map(|e| pair(e.objectives.values())).collect(),
    })
}

fn json_call<Req, Resp>(request: &str, f: impl FnOnce(&Req) -> Result<Resp, String>) -> Result<String, String>
where
    Req: for<'de> Deserialize<'de>,
    Resp: Serialize,
{
    let req: Req = serde_json::from_str(request).map_err(|e| format!("bad request: {e}"))?;
    let resp = f(&req)?;
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

pub fn run_search_json(request: &str) -> Result<String, String> {
    json_call(request, search)
}

pub fn novelty_field_json(request: &str) -> Result<String, String> {
    json_call(request, field)
}

pub fn indicators_json(request: &str) -> Result<String, String> {
    json_call(request, measure)
}

#[wasm_bindgen]
pub fn run_search(request: &str) -> Result<String, JsValue> {
    run_search_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn novelty_field(request: &str) -> Result<String, JsValue> {
    novelty_field_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn indicators(request: &str) -> Result<String, JsValue> {
    indicators_json(request).map_err(|e| JsValue::from_str(&e))
}
