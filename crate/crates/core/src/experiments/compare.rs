use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::Algorithm;
use super::files::ExperimentSummary;
use crate::error::{Error, Result};
use crate::indicators::{compare_methods, rank_sum_test, ComparisonTable, MethodRuns, RunIndicators, SIGNIFICANCE};

/// PDNS against MOENAS on the same descriptors. A winner is named only when
/// the difference is significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub metrics: Vec<String>,
    pub pdns: String,
    pub moenas: String,
    pub igd_plus_p: f64,
    pub hypervolume_p: f64,
    pub igd_plus_winner: Option<String>,
    pub hypervolume_winner: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentComparison {
    pub benchmark: String,
    pub table: ComparisonTable,
    pub pairs: Vec<PairedComparison>,
}

fn runs_of(s: &ExperimentSummary) -> MethodRuns {
    MethodRuns {
        name: s.label.clone(),
        runs: s
            .runs
            .iter()
            .map(|r| RunIndicators {
                igd_plus: r.igd_plus,
                hypervolume: r.hypervolume,
            })
            .collect(),
    }
}

fn winner(p: f64, a: (&str, f64), b: (&str, f64), lower_is_better: bool) -> Option<String> {
    if p >= SIGNIFICANCE || a.1 == b.1 {
        return None;
    }
    let a_wins = (a.1 < b.1) == lower_is_better;
    Some(if a_wins { a.0 } else { b.0 }.to_string())
}

/// Mean and std table with significance marks, plus paired same-descriptor
/// comparisons. Every summary must come from the same benchmark and use the
/// same indicator settings.
pub fn compare_experiments(summaries: &[ExperimentSummary]) -> Result<ExperimentComparison> {
    if summaries.len() < 2 {
        return Err(Error::contract(format!(
            "need at least 2 summaries to compare, got {}",
            summaries.len()
        )));
    }
    let first = &summaries[0];
    for s in &summaries[1..] {
        if s.benchmark != first.benchmark {
            return Err(Error::Mismatch(format!(
                "`{}` ran on benchmark {} but `{}` on {}",
                first.label, first.benchmark, s.label, s.benchmark
            )));
        }
        if s.indicators != first.indicators {
            return Err(Error::Mismatch(format!(
                "`{}` and `{}` use different indicator settings",
                first.label, s.label
            )));
        }
    }

    let methods: Vec<MethodRuns> = summaries.iter().map(runs_of).collect();
    let table = compare_methods(&methods)?;

    let mut pairs = Vec::new();
    for p in summaries.iter().filter(|s| s.algorithm == Algorithm::Pdns) {
        for m in summaries
            .iter()
            .filter(|s| s.algorithm == Algorithm::Moenas && s.metrics == p.metrics)
        {
            let (pr, mr) = (runs_of(p), runs_of(m));
            let pi: Vec<f64> = pr.runs.iter().map(|r| r.igd_plus).collect();
            let mi: Vec<f64> = mr.runs.iter().map(|r| r.igd_plus).collect();
            let ph: Vec<f64> = pr.runs.iter().map(|r| r.hypervolume).collect();
            let mh: Vec<f64> = mr.runs.iter().map(|r| r.hypervolume).collect();
            let igd_p = rank_sum_test(&pi, &mi)?;
            let hv_p = rank_sum_test(&ph, &mh)?;
            pairs.push(PairedComparison {
                metrics: p.metrics.clone(),
                pdns: p.label.clone(),
                moenas: m.label.clone(),
                igd_plus_p: igd_p,
                hypervolume_p: hv_p,
                igd_plus_winner: winner(igd_p, (&p.label, p.igd_plus.mean), (&m.label, m.igd_plus.mean), true),
                hypervolume_winner: winner(
                    hv_p,
                    (&p.label, p.hypervolume.mean),
                    (&m.label, m.hypervolume.mean),
                    false,
                ),
            });
        }
    }

    Ok(ExperimentComparison {
        benchmark: first.benchmark.clone(),
        table,
        pairs,
    })
}

impl ExperimentComparison {
    fn underlined(&self, label: &str, hv: bool) -> bool {
        self.pairs.iter().any(|p| {
            let w = if hv { &p.hypervolume_winner } else { &p.igd_plus_winner };
            w.as_deref() == Some(label)
        })
    }

    /// Plain-text table. Cells that win their same-descriptor pairing are
    /// wrapped in underscores.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let width = self
            .table
            .rows
            .iter()
            .map(|r| r.name.chars().count())
            .max()
            .unwrap_or(6)
            .max(6);
        let _ = writeln!(
            out,
            "{:<width$}  {:>4}  {:<26}  {:<26}",
            "method", "runs", "IGD+", "hypervolume"
        );
        for row in &self.table.rows {
            let cell = |c: &crate::indicators::IndicatorCell, under: bool| {
                let body = format!("{:.4} ± {:.4}", c.mean, c.std);
                let body = if under { format!("_{body}_") } else { body };
                format!("{body} {}", c.mark.symbol())
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>4}  {:<26}  {:<26}",
                row.name,
                row.runs,
                cell(&row.igd_plus, self.underlined(&row.name, false)),
                cell(&row.hypervolume, self.underlined(&row.name, true)),
            );
        }
        let names: Vec<&str> = self.table.rows.iter().map(|r| r.name.as_str()).collect();
        let cell = width.max(10);
        for (title, matrix) in [
            ("IGD+", &self.table.igd_plus_p),
            ("hypervolume", &self.table.hypervolume_p),
        ] {
            let _ = writeln!(out, "\nrank-sum p-values, {title}");
            let _ = write!(out, "{:<width$}", "");
            for n in &names {
                let _ = write!(out, "  {n:>cell$}");
            }
            out.push('\n');
            for (i, n) in names.iter().enumerate() {
                let _ = write!(out, "{n:<width$}");
                for p in &matrix[i] {
                    let _ = write!(out, "  {p:>cell$.3e}");
                }
                out.push('\n');
            }
        }
        for w in &self.table.warnings {
            let _ = writeln!(out, "\nwarning: {w}");
        }
        out
    }
}
