//! Per-run output files. Traces and fronts are tab-separated with `#`
//! metadata lines; summaries are JSON. Floats are written in Rust's shortest
//! round-trip form so identical runs give identical bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::context::IndicatorSettings;
use crate::error::{Error, Result};
use crate::indicators::Bounds;

pub const TRACE_TAG: &str = "pdns-trace/1";
pub const FRONT_TAG: &str = "pdns-front/1";
pub const SUMMARY_TAG: &str = "pdns-summary/1";

const MISSING: &str = "NA";

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| Error::file(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::file(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::file(path, e))
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn split_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad number `{v}`: {e}")))
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |v| v.to_string())
}

fn parse_opt(s: &str) -> std::result::Result<Option<f64>, String> {
    if s == MISSING {
        Ok(None)
    } else {
        s.parse().map(Some).map_err(|e| format!("bad number `{s}`: {e}"))
    }
}

/// Identifies the run a trace or front belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub label: String,
    pub seed: u64,
    pub benchmark: String,
    pub indicators: IndicatorSettings,
}

impl RunMeta {
    fn write_header(&self, out: &mut String, tag: &str) {
        let s = &self.indicators;
        let _ = writeln!(out, "# {tag}");
        let _ = writeln!(out, "# label\t{}", self.label);
        let _ = writeln!(out, "# seed\t{}", self.seed);
        let _ = writeln!(out, "# benchmark\t{}", self.benchmark);
        let _ = writeln!(out, "# objectives\t{},{}", s.objectives[0], s.objectives[1]);
        let _ = writeln!(out, "# bounds_lower\t{}", join(&s.bounds.lower));
        let _ = writeln!(out, "# bounds_upper\t{}", join(&s.bounds.upper));
        let _ = writeln!(out, "# reference_point\t{}", join(&s.reference_point));
    }

    /// Splits `text` into the metadata block and the remaining table lines.
    fn read_header<'t>(text: &'t str, tag: &str) -> std::result::Result<(Self, Vec<&'t str>), String> {
        let mut lines = text.lines();
        match lines.next() {
            Some(l) if l.trim_start_matches('#').trim() == tag => {}
            _ => return Err(format!("missing `# {tag}` first line")),
        }
        let mut fields = std::collections::HashMap::new();
        let mut rest = Vec::new();
        for line in lines {
            if let Some(meta) = line.strip_prefix("# ") {
                let (k, v) = meta
                    .split_once('\t')
                    .ok_or_else(|| format!("bad metadata line `{line}`"))?;
                fields.insert(k.to_string(), v.to_string());
            } else if !line.is_empty() {
                rest.push(line);
            }
        }
        let get = |k: &str| fields.get(k).cloned().ok_or_else(|| format!("missing `{k}` metadata"));
        let objectives = get("objectives")?;
        let (a, b) = objectives
            .split_once(',')
            .ok_or_else(|| format!("bad objectives `{objectives}`"))?;
        let reference = split_floats(&get("reference_point")?)?;
        if reference.len() != 2 {
            return Err("reference_point needs two values".into());
        }
        let meta = RunMeta {
            label: get("label")?,
            seed: get("seed")?.parse().map_err(|e| format!("bad seed: {e}"))?,
            benchmark: get("benchmark")?,
            indicators: IndicatorSettings {
                objectives: [a.to_string(), b.to_string()],
                bounds: Bounds {
                    lower: split_floats(&get("bounds_lower")?)?,
                    upper: split_floats(&get("bounds_upper")?)?,
                },
                reference_point: [reference[0], reference[1]],
            },
        };
        Ok((meta, rest))
    }
}

/// One row per generation, generation 0 being the initial population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub generation: usize,
    pub cost_seconds: f64,
    pub unique_evaluations: u64,
    pub total_evaluations: u64,
    pub archive_size: usize,
    pub igd_plus: Option<f64>,
    pub hypervolume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub meta: RunMeta,
    pub rows: Vec<TraceRow>,
}

const TRACE_COLUMNS: &str =
    "generation\tcost_seconds\tunique_evaluations\ttotal_evaluations\tarchive_size\tigd_plus\thypervolume";

impl RunTrace {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        self.meta.write_header(&mut out, TRACE_TAG);
        out.push_str(TRACE_COLUMNS);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.generation,
                r.cost_seconds,
                r.unique_evaluations,
                r.total_evaluations,
                r.archive_size,
                opt(r.igd_plus),
                opt(r.hypervolume)
            );
        }
        out
    }

    pub fn parse_tsv(text: &str) -> std::result::Result<Self, String> {
        let (meta, lines) = RunMeta::read_header(text, TRACE_TAG)?;
        let mut lines = lines.into_iter();
        if lines.next() != Some(TRACE_COLUMNS) {
            return Err("unexpected trace columns".into());
        }
        let rows = lines
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                if f.len() != 7 {
                    return Err(format!("expected 7 fields, got {} in `{line}`", f.len()));
                }
                let int = |s: &str| s.parse::<u64>().map_err(|e| format!("bad integer `{s}`: {e}"));
                Ok(TraceRow {
                    generation: int(f[0])? as usize,
                    cost_seconds: f[1].parse().map_err(|e| format!("bad cost `{}`: {e}", f[1]))?,
                    unique_evaluations: int(f[2])?,
                    total_evaluations: int(f[3])?,
                    archive_size: int(f[4])? as usize,
                    igd_plus: parse_opt(f[5])?,
                    hypervolume: parse_opt(f[6])?,
                })
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        Ok(RunTrace { meta, rows })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse_tsv(&read(path)?).map_err(|m| Error::parse(path, m))
    }

    /// Last row, which always carries both indicators.
    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }
}

/// One member of a final archive: its descriptors and ground-truth images.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontPoint {
    pub key: String,
    pub descriptors: Vec<f64>,
    /// Raw ground-truth objectives (evaluation column value, complexity value).
    pub truth: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontFile {
    pub meta: RunMeta,
    pub descriptor_names: Vec<String>,
    pub points: Vec<FrontPoint>,
}

impl FrontFile {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        self.meta.write_header(&mut out, FRONT_TAG);
        let [col, cx] = &self.meta.indicators.objectives;
        let _ = writeln!(
            out,
            "key\t{}\ttruth:{col}\ttruth:{cx}",
            self.descriptor_names.join("\t")
        );
        for p in &self.points {
            out.push_str(&p.key);
            for v in p.descriptors.iter().chain(&p.truth) {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_tsv(text: &str) -> std::result::Result<Self, String> {
        let (meta, lines) = RunMeta::read_header(text, FRONT_TAG)?;
        let mut lines = lines.into_iter();
        let columns: Vec<&str> = lines.next().ok_or("missing column line")?.split('\t').collect();
        if columns.len() < 3 || columns[0] != "key" {
            return Err("unexpected front columns".into());
        }
        let descriptor_names: Vec<String> = columns[1..columns.len() - 2].iter().map(|s| s.to_string()).collect();
        let points = lines
            .map(|line| {
                let f: Vec<&str> = line.split('\t').collect();
                if f.len() != columns.len() {
                    return Err(format!("expected {} fields in `{line}`", columns.len()));
                }
                let nums = f[1..]
                    .iter()
                    .map(|s| s.parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}")))
                    .collect::<std::result::Result<Vec<_>, String>>()?;
                let k = nums.len();
                Ok(FrontPoint {
                    key: f[0].to_string(),
                    descriptors: nums[..k - 2].to_vec(),
                    truth: [nums[k - 2], nums[k - 1]],
                })
            })
            .collect::<std::result::Result<Vec<_>, String>>()?;
        Ok(FrontFile {
            meta,
            descriptor_names,
            points,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse_tsv(&read(path)?).map_err(|m| Error::parse(path, m))
    }
}

/// Final numbers of one run, as listed in a summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub index: usize,
    pub seed: u64,
    pub igd_plus: f64,
    pub hypervolume: f64,
    pub cost_seconds: f64,
    pub unique_evaluations: u64,
    pub archive_size: usize,
    /// File names relative to the summary's directory.
    pub trace: String,
    pub front: String,
    pub snapshots: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub format: String,
    pub label: String,
    pub algorithm: super::Algorithm,
    pub metrics: Vec<String>,
    pub benchmark: String,
    pub population_size: usize,
    pub generations: usize,
    pub base_seed: u64,
    pub indicators: IndicatorSettings,
    /// Hypervolume of the exhaustive ground-truth front.
    pub oracle_hypervolume: f64,
    pub igd_plus: MeanStd,
    pub hypervolume: MeanStd,
    pub cost_seconds: MeanStd,
    pub runs: Vec<RunRecord>,
}

impl ExperimentSummary {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let summary: ExperimentSummary =
            serde_json::from_str(&read(path)?).map_err(|e| Error::parse(path, e.to_string()))?;
        if summary.format != SUMMARY_TAG {
            return Err(Error::parse(
                path,
                format!("unknown summary format `{}`", summary.format),
            ));
        }
        Ok(summary)
    }
}
