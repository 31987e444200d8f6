//! Line-oriented benchmark files.
//!
//! Line 1 is a JSON header object:
//!
//! ```text
//! {"cardinalities":[5,5,5,5,5,5],
//!  "metrics":[{"name":"synflow","direction":"maximize","role":"performance",
//!              "cost_field":"synflow_time","transform":"log"}, ...],
//!  "evaluation_columns":[{"name":"test_acc","direction":"maximize"}]}
//! ```
//!
//! and every following non-blank line is one record keyed by the `-`-joined
//! genotype:
//!
//! ```text
//! {"key":"0-4-1-2-0-3","values":{"synflow":3.1e5,"synflow_time":0.41,"test_acc":0.9428}}
//! ```
//!
//! Values are JSON numbers; the strings `nan`, `inf`, `+inf`, `-inf`
//! (any case, also `infinity`) stand for non-finite metric values, which are
//! repaired at load time to the worst finite value of their column.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{EvalColumn, Record, TabularBenchmark};
use crate::error::{Error, Result};
use crate::space::{Direction, Genotype, MetricSpec, SearchSpace};

pub const FORMAT_TAG: &str = "pdns-benchmark/1";

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Metric names that must exist in the file. Empty accepts any header.
    pub selection: Vec<String>,
    /// Accept files that do not cover every genotype of the space.
    pub allow_partial: bool,
}

/// Count of repaired non-finite values, per metric in header order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairReport {
    pub per_metric: Vec<(String, usize)>,
}

impl RepairReport {
    pub fn total(&self) -> usize {
        self.per_metric.iter().map(|(_, n)| n).sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Header {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub cardinalities: Vec<u32>,
    pub metrics: Vec<MetricSpec>,
    #[serde(default)]
    pub evaluation_columns: Vec<EvalColumn>,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    key: String,
    values: HashMap<String, serde_json::Value>,
}

fn parse_value(v: &serde_json::Value) -> Option<f64> {
    match v {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "nan" => Some(f64::NAN),
            "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
            "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
            _ => None,
        },
        _ => None,
    }
}

impl TabularBenchmark {
    pub fn load(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::parse(&text, opts)
    }

    pub fn parse(text: &str, opts: &LoadOptions) -> Result<Self> {
        let fingerprint = hex_digest(text.as_bytes());
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header_line) = lines.next().ok_or(Error::Malformed {
            line: 1,
            message: "empty file".into(),
        })?;
        let header: Header = serde_json::from_str(header_line).map_err(|e| Error::Malformed {
            line: 1,
            message: format!("header: {e}"),
        })?;
        let space = SearchSpace::new(header.cardinalities.clone()).map_err(|e| Error::Malformed {
            line: 1,
            message: e.to_string(),
        })?;
        check_header(&header)?;
        for name in &opts.selection {
            if !header.metrics.iter().any(|m| &m.name == name) {
                return Err(Error::UnknownMetric(name.clone()));
            }
        }

        let mut records = BTreeMap::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let malformed = |message: String| Error::Malformed { line: lineno, message };
            let raw: RawRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
            let g: Genotype = raw
                .key
                .parse()
                .map_err(|_| malformed(format!("bad genotype key `{}`", raw.key)))?;
            if !space.contains(&g) {
                return Err(malformed(format!("genotype `{}` is outside the search space", raw.key)));
            }
            let field = |name: &str| -> Result<f64> {
                let v = raw
                    .values
                    .get(name)
                    .ok_or_else(|| malformed(format!("record `{}` lacks field `{name}`", raw.key)))?;
                parse_value(v).ok_or_else(|| malformed(format!("record `{}`: `{name}` is not a number", raw.key)))
            };
            let finite = |name: &str| -> Result<f64> {
                let v = field(name)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(malformed(format!("record `{}`: `{name}` must be finite", raw.key)))
                }
            };
            let metrics = header
                .metrics
                .iter()
                .map(|m| field(&m.name))
                .collect::<Result<Vec<_>>>()?;
            let costs = header
                .metrics
                .iter()
                .map(|m| match &m.cost_field {
                    Some(c) => finite(c).and_then(|v| {
                        if v < 0.0 {
                            Err(malformed(format!("record `{}`: negative cost `{c}`", raw.key)))
                        } else {
                            Ok(v)
                        }
                    }),
                    None => Ok(0.0),
                })
                .collect::<Result<Vec<_>>>()?;
            let evaluations = header
                .evaluation_columns
                .iter()
                .map(|c| finite(&c.name))
                .collect::<Result<Vec<_>>>()?;
            let record = Record {
                metrics,
                costs,
                evaluations,
            };
            if records.insert(g, record).is_some() {
                return Err(malformed(format!("duplicate record `{}`", raw.key)));
            }
        }

        if !opts.allow_partial {
            let size = space.size()?;
            if (records.len() as u64) < size {
                let missing = (0..size)
                    .map(|i| space.genotype_at(i).expect("index within size"))
                    .find(|g| !records.contains_key(g))
                    .expect("fewer records than genotypes");
                return Err(Error::MissingGenotype(missing.key()));
            }
        }

        let repairs = repair(&header.metrics, &mut records)?;
        for (j, spec) in header.metrics.iter().enumerate() {
            for r in records.values_mut() {
                r.metrics[j] = spec.transform.apply(r.metrics[j]);
            }
        }

        Ok(TabularBenchmark {
            space,
            specs: header.metrics,
            evaluation_columns: header.evaluation_columns,
            records,
            repairs,
            fingerprint,
        })
    }
}

fn check_header(header: &Header) -> Result<()> {
    let mut seen: Vec<&str> = Vec::new();
    let names = header
        .metrics
        .iter()
        .map(|m| m.name.as_str())
        .chain(header.evaluation_columns.iter().map(|c| c.name.as_str()));
    for name in names {
        if seen.contains(&name) {
            return Err(Error::Malformed {
                line: 1,
                message: format!("column `{name}` declared twice"),
            });
        }
        seen.push(name);
    }
    if header.metrics.is_empty() {
        return Err(Error::Malformed {
            line: 1,
            message: "no metrics declared".into(),
        });
    }
    Ok(())
}

/// Replaces non-finite metric values with the worst finite value of their
/// column: NaN and the "bad" infinity go to the worst end, the "good"
/// infinity to the best end.
fn repair(specs: &[MetricSpec], records: &mut BTreeMap<Genotype, Record>) -> Result<RepairReport> {
    let mut report = RepairReport::default();
    for (j, spec) in specs.iter().enumerate() {
        let finite = records.values().map(|r| r.metrics[j]).filter(|v| v.is_finite());
        let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let mut count = 0;
        for (g, r) in records.iter_mut() {
            let v = r.metrics[j];
            if v.is_finite() {
                continue;
            }
            if lo > hi {
                return Err(Error::Malformed {
                    line: 0,
                    message: format!("metric `{}` has no finite value (first at `{}`)", spec.name, g.key()),
                });
            }
            let (worst, best) = match spec.direction {
                Direction::Maximize => (lo, hi),
                Direction::Minimize => (hi, lo),
            };
            let good_inf = match spec.direction {
                Direction::Maximize => f64::INFINITY,
                Direction::Minimize => f64::NEG_INFINITY,
            };
            r.metrics[j] = if v == good_inf { best } else { worst };
            count += 1;
        }
        report.per_metric.push((spec.name.clone(), count));
    }
    Ok(report)
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Serializes a header plus records (in the given order) to the file format.
pub(crate) fn write_jsonl<'a>(
    header: &Header,
    rows: impl Iterator<Item = (String, Vec<(&'a str, f64)>)>,
) -> Result<String> {
    let mut out = serde_json::to_string(header)?;
    out.push('\n');
    for (key, values) in rows {
        let map: serde_json::Map<String, serde_json::Value> = values
            .into_iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::from(v)))
            .collect();
        let line = serde_json::json!({ "key": key, "values": map });
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = r#"{"cardinalities":[2],"metrics":[{"name":"synflow","direction":"maximize","role":"performance"},{"name":"flops","direction":"minimize","role":"complexity"}],"evaluation_columns":[{"name":"test_acc"}]}"#;

    fn file(records: &[&str]) -> String {
        let mut s = HEADER.to_string();
        for r in records {
            s.push('\n');
            s.push_str(r);
        }
        s
    }

    #[test]
    fn minimal_file_loads() {
        let text = file(&[
            r#"{"key":"0","values":{"synflow":1,"flops":2,"test_acc":0.5}}"#,
            r#"{"key":"1","values":{"synflow":3,"flops":4,"test_acc":0.7}}"#,
        ]);
        let b = TabularBenchmark::parse(&text, &LoadOptions::default()).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.repairs().total(), 0);
        assert_eq!(b.fingerprint().len(), 64);
    }

    #[test]
    fn missing_genotype_named() {
        let text = file(&[r#"{"key":"1","values":{"synflow":3,"flops":4,"test_acc":0.7}}"#]);
        let err = TabularBenchmark::parse(&text, &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingGenotype(ref k) if k == "0"), "{err}");
        let opts = LoadOptions {
            allow_partial: true,
            ..Default::default()
        };
        assert_eq!(TabularBenchmark::parse(&text, &opts).unwrap().len(), 1);
    }

    #[test]
    fn neg_inf_maximize_repaired_to_column_min() {
        let text = file(&[
            r#"{"key":"0","values":{"synflow":"-inf","flops":2,"test_acc":0.5}}"#,
            r#"{"key":"1","values":{"synflow":3,"flops":4,"test_acc":0.7}}"#,
        ]);
        let b = TabularBenchmark::parse(&text, &LoadOptions::default()).unwrap();
        assert_eq!(b.repairs().total(), 1);
        assert_eq!(b.record(&Genotype::new(vec![0])).unwrap().metrics[0], 3.0);
    }

    #[test]
    fn nan_minimize_repaired_to_column_max() {
        let text = file(&[
            r#"{"key":"0","values":{"synflow":1,"flops":"NaN","test_acc":0.5}}"#,
            r#"{"key":"1","values":{"synflow":3,"flops":4,"test_acc":0.7}}"#,
        ]);
        let b = TabularBenchmark::parse(&text, &LoadOptions::default()).unwrap();
        assert_eq!(b.record(&Genotype::new(vec![0])).unwrap().metrics[1], 4.0);
        assert_eq!(b.repairs().per_metric[1], ("flops".to_string(), 1));
    }

    #[test]
    fn unknown_selection_rejected() {
        let text = file(&[]);
        let opts = LoadOptions {
            selection: vec!["jacov".into()],
            allow_partial: true,
        };
        assert!(matches!(TabularBenchmark::parse(&text, &opts), Err(Error::UnknownMetric(ref m)) if m == "jacov"));
    }

    #[test]
    fn malformed_records_name_the_offender() {
        let cases = [
            r#"{"key":"0","values":{"synflow":1,"test_acc":0.5}}"#,
            r#"{"key":"7","values":{"synflow":1,"flops":2,"test_acc":0.5}}"#,
            r#"{"key":"0","values":{"synflow":"abc","flops":2,"test_acc":0.5}}"#,
            r#"{"key":"0","values":{"synflow":1,"flops":2,"test_acc":"nan"}}"#,
            "not json",
        ];
        for case in cases {
            let err = TabularBenchmark::parse(&file(&[case]), &LoadOptions::default()).unwrap_err();
            assert!(matches!(err, Error::Malformed { line: 2, .. }), "{case}: {err}");
        }
        let dup = file(&[
            r#"{"key":"0","values":{"synflow":1,"flops":2,"test_acc":0.5}}"#,
            r#"{"key":"0","values":{"synflow":1,"flops":2,"test_acc":0.5}}"#,
        ]);
        assert!(matches!(
            TabularBenchmark::parse(&dup, &LoadOptions::default()),
            Err(Error::Malformed { line: 3, .. })
        ));
    }

    #[test]
    fn log_transform_applied() {
        let header = HEADER.replace(r#""role":"performance"}"#, r#""role":"performance","transform":"log"}"#);
        let text = format!(
            "{header}\n{}\n{}",
            r#"{"key":"0","values":{"synflow":0,"flops":2,"test_acc":0.5}}"#,
            r#"{"key":"1","values":{"synflow":1e6,"flops":4,"test_acc":0.7}}"#
        );
        let b = TabularBenchmark::parse(&text, &LoadOptions::default()).unwrap();
        let v = b.record(&Genotype::new(vec![1])).unwrap().metrics[0];
        assert!((v - 1e6f64.ln_1p()).abs() < 1e-12);
    }
}
