use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{CostMode, MetricSelection};
use crate::evolution::{Mutation, SearchConfig, VariationConfig, DEFAULT_POLYNOMIAL_ETA, DEFAULT_POPULATION};
use crate::indicators::DEFAULT_REFERENCE;
use crate::space::{MetricRole, SearchSpace};

/// Spaces at least this large get the long generation budget by default.
pub const LARGE_SPACE: u64 = 100_000;
pub const GENERATIONS_LARGE: usize = 150;
pub const GENERATIONS_SMALL: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Pdns,
    Moenas,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pdns => "PDNS",
            Algorithm::Moenas => "MOENAS",
        }
    }

    /// Uniform resampling for novelty search, polynomial mutation for NSGA-II.
    pub fn default_mutation(self) -> Mutation {
        match self {
            Algorithm::Pdns => Mutation::Uniform,
            Algorithm::Moenas => Mutation::PolynomialInteger,
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pdns" => Ok(Algorithm::Pdns),
            "moenas" | "nsga2" | "nsga-ii" => Ok(Algorithm::Moenas),
            other => Err(Error::Config(format!("unknown algorithm `{other}` (pdns | moenas)"))),
        }
    }
}

fn default_population() -> usize {
    DEFAULT_POPULATION
}

fn default_repeats() -> usize {
    1
}

fn default_eta() -> f64 {
    DEFAULT_POLYNOMIAL_ETA
}

fn default_stride() -> usize {
    1
}

fn default_reference() -> [f64; 2] {
    DEFAULT_REFERENCE
}

fn default_column() -> String {
    "test_acc".to_string()
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// One experiment: an algorithm, its descriptors, a benchmark and a seed
/// range. Read from TOML; every field can be overridden on the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub benchmark: PathBuf,
    /// Descriptor metric names: performance metrics plus one complexity metric.
    pub metrics: Vec<String>,
    #[serde(default = "default_column")]
    pub evaluation_column: String,
    #[serde(default = "default_population")]
    pub population_size: usize,
    /// `None` picks 150 for spaces of 100,000 genotypes or more, else 50.
    #[serde(default)]
    pub generations: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// `None` picks the algorithm's default operator.
    #[serde(default)]
    pub mutation: Option<Mutation>,
    #[serde(default)]
    pub mutation_rate: Option<f64>,
    #[serde(default = "default_eta")]
    pub polynomial_eta: f64,
    /// NSGA-II offspring duplicate elimination; `None` enables it for MOENAS.
    #[serde(default)]
    pub eliminate_duplicates: Option<bool>,
    #[serde(default)]
    pub cost_mode: CostMode,
    /// Indicators are computed every `indicator_stride` generations and at the last one.
    #[serde(default = "default_stride")]
    pub indicator_stride: usize,
    #[serde(default = "default_reference")]
    pub reference_point: [f64; 2],
    #[serde(default)]
    pub allow_partial: bool,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Method name in summaries and tables; derived from the algorithm and
    /// descriptors when absent.
    #[serde(default)]
    pub label: Option<String>,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, benchmark: impl Into<PathBuf>, metrics: Vec<String>) -> Self {
        RunConfig {
            algorithm,
            benchmark: benchmark.into(),
            metrics,
            evaluation_column: default_column(),
            population_size: DEFAULT_POPULATION,
            generations: None,
            seed: 0,
            repeats: 1,
            mutation: None,
            mutation_rate: None,
            polynomial_eta: DEFAULT_POLYNOMIAL_ETA,
            eliminate_duplicates: None,
            cost_mode: CostMode::Dedup,
            indicator_stride: 1,
            reference_point: DEFAULT_REFERENCE,
            allow_partial: false,
            output_dir: default_output(),
            label: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(config)
    }

    /// Reads a TOML config. A relative `benchmark` path is resolved against
    /// the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let mut config = toml::from_str::<RunConfig>(&text).map_err(|e| Error::parse(path, e.to_string()))?;
        if config.benchmark.is_relative() {
            if let Some(dir) = path.parent() {
                config.benchmark = dir.join(&config.benchmark);
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks everything that does not need the benchmark.
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::Config("no descriptor metrics given".into()));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be at least 1".into()));
        }
        if self.indicator_stride == 0 {
            return Err(Error::Config("indicator_stride must be at least 1".into()));
        }
        if self.reference_point.iter().any(|r| !r.is_finite()) {
            return Err(Error::Config("reference_point must be finite".into()));
        }
        self.search_config_with(self.generations.unwrap_or(0)).validate()
    }

    pub fn variation(&self) -> VariationConfig {
        VariationConfig {
            mutation: self.mutation.unwrap_or_else(|| self.algorithm.default_mutation()),
            mutation_rate: self.mutation_rate,
            polynomial_eta: self.polynomial_eta,
            ..VariationConfig::uniform()
        }
    }

    pub fn generations_for(&self, space: &SearchSpace) -> usize {
        self.generations.unwrap_or_else(|| default_generations(space))
    }

    pub fn search_config(&self, space: &SearchSpace) -> SearchConfig {
        self.search_config_with(self.generations_for(space))
    }

    fn search_config_with(&self, generations: usize) -> SearchConfig {
        SearchConfig {
            population_size: self.population_size,
            generations,
            variation: self.variation(),
            eliminate_duplicates: self.eliminate_duplicates.unwrap_or(self.algorithm == Algorithm::Moenas),
        }
    }

    /// The configured label, or one built from the algorithm and descriptors:
    /// `MTF-PDNS` for several performance metrics, `PDNS-synflow` for one.
    pub fn label_for(&self, selection: &MetricSelection) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        let performance: Vec<&str> = selection
            .specs()
            .iter()
            .filter(|s| s.role == MetricRole::Performance)
            .map(|s| s.name.as_str())
            .collect();
        match performance.as_slice() {
            [one] => format!("{}-{}", self.algorithm.name(), one),
            _ => format!("MTF-{}", self.algorithm.name()),
        }
    }
}

pub fn default_generations(space: &SearchSpace) -> usize {
    match space.size() {
        Ok(n) if n < LARGE_SPACE => GENERATIONS_SMALL,
        _ => GENERATIONS_LARGE,
    }
}
