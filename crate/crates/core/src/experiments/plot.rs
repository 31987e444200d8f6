use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::files::RunTrace;
use crate::error::{Error, Result};
use crate::indicators::mean_std;

/// Mean and spread of the indicators across runs at one cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub method: String,
    pub cost_seconds: f64,
    /// Runs that have reached this cost.
    pub n: usize,
    pub igd_plus_mean: f64,
    pub igd_plus_std: f64,
    pub hypervolume_mean: f64,
    pub hypervolume_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub points: Vec<CurvePoint>,
}

/// Value of a step function at `cost`: the last measured row at or below it.
fn value_at(trace: &RunTrace, cost: f64) -> Option<(f64, f64)> {
    trace
        .rows
        .iter()
        .take_while(|r| r.cost_seconds <= cost)
        .filter_map(|r| Some((r.igd_plus?, r.hypervolume?)))
        .last()
}

/// Aggregates traces per method (by label) onto the union of their cost
/// values. Each trace is a step function carried forward past its last row.
pub fn emit_plot_data(traces: &[RunTrace]) -> Result<PlotData> {
    let first = traces.first().ok_or_else(|| Error::contract("no traces given"))?;
    for t in traces {
        if t.meta.indicators != first.meta.indicators || t.meta.benchmark != first.meta.benchmark {
            return Err(Error::Mismatch(format!(
                "traces `{}` (seed {}) and `{}` (seed {}) use different benchmarks or indicator settings",
                first.meta.label, first.meta.seed, t.meta.label, t.meta.seed
            )));
        }
        if t.rows.windows(2).any(|w| w[1].cost_seconds < w[0].cost_seconds) {
            return Err(Error::contract(format!(
                "trace `{}` (seed {}) has decreasing cost",
                t.meta.label, t.meta.seed
            )));
        }
    }

    let mut labels: Vec<&str> = Vec::new();
    for t in traces {
        if !labels.contains(&t.meta.label.as_str()) {
            labels.push(&t.meta.label);
        }
    }

    let mut points = Vec::new();
    for label in labels {
        let group: Vec<&RunTrace> = traces.iter().filter(|t| t.meta.label == label).collect();
        let mut grid: Vec<f64> = group
            .iter()
            .flat_map(|t| t.rows.iter().filter(|r| r.igd_plus.is_some()).map(|r| r.cost_seconds))
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        for cost in grid {
            let (igd, hv): (Vec<f64>, Vec<f64>) = group.iter().filter_map(|t| value_at(t, cost)).unzip();
            if igd.is_empty() {
                continue;
            }
            let (igd_mean, igd_std) = mean_std(&igd);
            let (hv_mean, hv_std) = mean_std(&hv);
            points.push(CurvePoint {
                method: label.to_string(),
                cost_seconds: cost,
                n: igd.len(),
                igd_plus_mean: igd_mean,
                igd_plus_std: igd_std,
                hypervolume_mean: hv_mean,
                hypervolume_std: hv_std,
            });
        }
    }
    Ok(PlotData { points })
}

impl PlotData {
    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("method\tcost_seconds\tn\tigd_plus_mean\tigd_plus_std\thypervolume_mean\thypervolume_std\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                p.method, p.cost_seconds, p.n, p.igd_plus_mean, p.igd_plus_std, p.hypervolume_mean, p.hypervolume_std
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::context::IndicatorSettings;
    use crate::experiments::files::{RunMeta, TraceRow};
    use crate::indicators::Bounds;

    fn trace(label: &str, rows: &[(f64, f64, f64)]) -> RunTrace {
        RunTrace {
            meta: RunMeta {
                label: label.into(),
                seed: 0,
                benchmark: "abc".into(),
                indicators: IndicatorSettings {
                    objectives: ["test_acc".into(), "flops".into()],
                    bounds: Bounds {
                        lower: vec![0.0, 0.0],
                        upper: vec![1.0, 1.0],
                    },
                    reference_point: [1.01, 1.01],
                },
            },
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, &(c, igd, hv))| TraceRow {
                    generation: i,
                    cost_seconds: c,
                    unique_evaluations: i as u64,
                    total_evaluations: i as u64,
                    archive_size: 1,
                    igd_plus: Some(igd),
                    hypervolume: Some(hv),
                })
                .collect(),
        }
    }

    #[test]
    fn single_trace_is_itself() {
        let rows = [(1.0, 0.5, 0.2), (2.5, 0.4, 0.3), (4.0, 0.1, 0.9)];
        let p = emit_plot_data(&[trace("a", &rows)]).unwrap();
        let got: Vec<(f64, f64, f64)> = p
            .points
            .iter()
            .map(|c| (c.cost_seconds, c.igd_plus_mean, c.hypervolume_mean))
            .collect();
        assert_eq!(got, rows);
        assert!(p.points.iter().all(|c| c.igd_plus_std == 0.0 && c.n == 1));
    }

    #[test]
    fn identical_traces_have_zero_std() {
        let rows = [(1.0, 0.5, 0.2), (2.0, 0.3, 0.4)];
        let p = emit_plot_data(&[trace("a", &rows), trace("a", &rows)]).unwrap();
        assert_eq!(p.points.len(), 2);
        assert!(p
            .points
            .iter()
            .all(|c| c.igd_plus_std == 0.0 && c.hypervolume_std == 0.0 && c.n == 2));
    }

    #[test]
    fn shorter_traces_carry_forward() {
        let short = trace("a", &[(1.0, 0.5, 0.2), (2.0, 0.4, 0.4)]);
        let long = trace("a", &[(1.5, 0.6, 0.1), (3.0, 0.2, 0.8)]);
        let p = emit_plot_data(&[short, long]).unwrap();
        let grid: Vec<f64> = p.points.iter().map(|c| c.cost_seconds).collect();
        assert_eq!(grid, vec![1.0, 1.5, 2.0, 3.0]);
        assert_eq!(p.points[0].n, 1);
        let last = p.points.last().unwrap();
        assert_eq!(last.n, 2);
        assert_eq!(last.hypervolume_mean, (0.4 + 0.8) / 2.0);
    }

    #[test]
    fn methods_are_separate_and_inputs_checked() {
        let p = emit_plot_data(&[trace("a", &[(1.0, 0.5, 0.2)]), trace("b", &[(2.0, 0.1, 0.9)])]).unwrap();
        assert_eq!(p.points.len(), 2);
        assert_eq!(p.points[1].method, "b");
        assert!(p.to_tsv().lines().count() == 3);

        assert!(emit_plot_data(&[]).is_err());
        let mut other = trace("b", &[(1.0, 0.5, 0.2)]);
        other.meta.benchmark = "zzz".into();
        assert!(matches!(
            emit_plot_data(&[trace("a", &[(1.0, 0.5, 0.2)]), other]),
            Err(Error::Mismatch(_))
        ));
    }
}
