use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Significance level for the `+` / `-` marks.
pub const SIGNIFICANCE: f64 = 0.01;

/// Two-sided Mann-Whitney U test, normal approximation with tie correction
/// and continuity correction.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::contract(format!(
            "rank-sum test needs at least 2 observations per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n1 = a.len() as f64;
    let n2 = b.len() as f64;
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        let avg_rank = (start + end + 1) as f64 / 2.0;
        let t = (end - start) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += avg_rank * pooled[start..end].iter().filter(|p| p.1).count() as f64;
        start = end;
    }

    let n = n1 + n2;
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance <= 0.0 {
        return Ok(1.0);
    }
    let z = (((u - mean).abs() - 0.5).max(0.0)) / variance.sqrt();
    Ok(erfc(z / std::f64::consts::SQRT_2).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunIndicators {
    pub igd_plus: f64,
    pub hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRuns {
    pub name: String,
    pub runs: Vec<RunIndicators>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mark {
    /// Significantly better than every other method.
    #[serde(rename = "+")]
    Better,
    /// Not significantly different from the best method.
    #[serde(rename = "~")]
    Comparable,
    /// Significantly worse than the best method.
    #[serde(rename = "-")]
    Worse,
}

impl Mark {
    pub fn symbol(self) -> &'static str {
        match self {
            Mark::Better => "+",
            Mark::Comparable => "≈",
            Mark::Worse => "−",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorCell {
    pub mean: f64,
    pub std: f64,
    pub mark: Mark,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub runs: usize,
    pub igd_plus: IndicatorCell,
    pub hypervolume: IndicatorCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// Pairwise rank-sum p-values, `[i][j]` for rows `i` and `j`.
    pub igd_plus_p: Vec<Vec<f64>>,
    pub hypervolume_p: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Sample mean and standard deviation (n - 1 denominator, 0 for n = 1).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn pvalue_matrix(samples: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = samples.len();
    let mut p = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = rank_sum_test(&samples[i], &samples[j])?;
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    Ok(p)
}

fn mark_column(means: &[f64], p: &[Vec<f64>], lower_is_better: bool) -> Vec<Mark> {
    let best = (0..means.len())
        .reduce(|b, i| {
            let improves = if lower_is_better {
                means[i] < means[b]
            } else {
                means[i] > means[b]
            };
            if improves {
                i
            } else {
                b
            }
        })
        .expect("at least one method");
    (0..means.len())
        .map(|i| {
            if i == best {
                let beats_all = means.len() > 1 && (0..means.len()).all(|j| j == i || p[i][j] < SIGNIFICANCE);
                if beats_all {
                    Mark::Better
                } else {
                    Mark::Comparable
                }
            } else if p[i][best] < SIGNIFICANCE {
                Mark::Worse
            } else {
                Mark::Comparable
            }
        })
        .collect()
}

/// Mean, standard deviation and significance mark per method and indicator.
/// Lower IGD+ and higher hypervolume are better.
pub fn compare_methods(methods: &[MethodRuns]) -> Result<ComparisonTable> {
    if methods.is_empty() {
        return Err(Error::contract("no methods to compare"));
    }
    if let Some(m) = methods.iter().find(|m| m.runs.is_empty()) {
        return Err(Error::contract(format!("method `{}` has no runs", m.name)));
    }
    let mut warnings = Vec::new();
    let counts: Vec<usize> = methods.iter().map(|m| m.runs.len()).collect();
    if counts.iter().any(|&c| c != counts[0]) {
        warnings.push(format!("unequal run counts: {counts:?}"));
    }

    let igd: Vec<Vec<f64>> = methods
        .iter()
        .map(|m| m.runs.iter().map(|r| r.igd_plus).collect())
        .collect();
    let hv: Vec<Vec<f64>> = methods
        .iter()
        .map(|m| m.runs.iter().map(|r| r.hypervolume).collect())
        .collect();
    let (igd_p, hv_p) = if methods.len() > 1 {
        (pvalue_matrix(&igd)?, pvalue_matrix(&hv)?)
    } else {
        (vec![vec![1.0]], vec![vec![1.0]])
    };
    let igd_stats: Vec<(f64, f64)> = igd.iter().map(|s| mean_std(s)).collect();
    let hv_stats: Vec<(f64, f64)> = hv.iter().map(|s| mean_std(s)).collect();
    let igd_marks = mark_column(&igd_stats.iter().map(|s| s.0).collect::<Vec<_>>(), &igd_p, true);
    let hv_marks = mark_column(&hv_stats.iter().map(|s| s.0).collect::<Vec<_>>(), &hv_p, false);

    let rows = methods
        .iter()
        .enumerate()
        .map(|(i, m)| ComparisonRow {
            name: m.name.clone(),
            runs: m.runs.len(),
            igd_plus: IndicatorCell {
                mean: igd_stats[i].0,
                std: igd_stats[i].1,
                mark: igd_marks[i],
            },
            hypervolume: IndicatorCell {
                mean: hv_stats[i].0,
                std: hv_stats[i].1,
                mark: hv_marks[i],
            },
        })
        .collect();
    Ok(ComparisonTable {
        rows,
        igd_plus_p: igd_p,
        hypervolume_p: hv_p,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn runs(name: &str, vals: &[(f64, f64)]) -> MethodRuns {
        MethodRuns {
            name: name.into(),
            runs: vals
                .iter()
                .map(|&(igd_plus, hypervolume)| RunIndicators { igd_plus, hypervolume })
                .collect(),
        }
    }

    #[test]
    fn identical_samples_give_p_one() {
        let a: Vec<f64> = (0..30).map(|i| (i % 7) as f64).collect();
        let p = rank_sum_test(&a, &a).unwrap();
        assert!((p - 1.0).abs() <= 0.02, "{p}");
        assert_eq!(rank_sum_test(&[2.0, 2.0], &[2.0, 2.0]).unwrap(), 1.0);
    }

    #[test]
    fn separated_samples() {
        let a: Vec<f64> = (1..=30).map(f64::from).collect();
        let b: Vec<f64> = (31..=60).map(f64::from).collect();
        // U = 0 is the extreme; z = (450 - 0.5) / sqrt(30 * 30 * 61 / 12)
        let z: f64 = 449.5 / (900.0f64 * 61.0 / 12.0).sqrt();
        let expected = erfc(z / std::f64::consts::SQRT_2);
        let p = rank_sum_test(&a, &b).unwrap();
        assert!(p < 1e-9);
        assert!((p - expected).abs() < 1e-15);
        assert_eq!(p, rank_sum_test(&b, &a).unwrap());
    }

    #[test]
    fn small_samples_rejected() {
        assert!(rank_sum_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn known_small_case() {
        // U = 0, sd = sqrt(25 * 11 / 12)
        let p = rank_sum_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[6.0, 7.0, 8.0, 9.0, 10.0]).unwrap();
        let z: f64 = (12.5 - 0.5) / (25.0f64 * 11.0 / 12.0).sqrt();
        assert!((p - erfc(z / std::f64::consts::SQRT_2)).abs() < 1e-15);
        assert!((p - 0.012_186).abs() < 1e-5, "{p}");
    }

    #[test]
    fn marks() {
        let single = compare_methods(&[runs("a", &[(0.1, 1.0), (0.2, 0.9)])]).unwrap();
        assert_eq!(single.rows[0].igd_plus.mark, Mark::Comparable);
        assert_eq!(single.rows[0].hypervolume.mark, Mark::Comparable);

        let same = [(0.1, 1.0), (0.2, 0.9), (0.15, 0.95)];
        let t = compare_methods(&[runs("a", &same), runs("b", &same)]).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.igd_plus.mark == Mark::Comparable && r.hypervolume.mark == Mark::Comparable));

        let good: Vec<(f64, f64)> = (0..30)
            .map(|i| (0.01 + i as f64 * 1e-4, 1.0 + i as f64 * 1e-4))
            .collect();
        let bad: Vec<(f64, f64)> = (0..30)
            .map(|i| (0.05 + i as f64 * 1e-4, 0.9 + i as f64 * 1e-4))
            .collect();
        let t = compare_methods(&[runs("good", &good), runs("bad", &bad)]).unwrap();
        assert_eq!(t.rows[0].igd_plus.mark, Mark::Better);
        assert_eq!(t.rows[0].hypervolume.mark, Mark::Better);
        assert_eq!(t.rows[1].igd_plus.mark, Mark::Worse);
        assert_eq!(t.rows[1].hypervolume.mark, Mark::Worse);
        assert!(t.igd_plus_p[0][1] < SIGNIFICANCE);

        assert!(compare_methods(&[]).is_err());
        assert!(compare_methods(&[runs("empty", &[])]).is_err());
        let uneven = compare_methods(&[runs("a", &same), runs("b", &same[..2])]).unwrap();
        assert_eq!(uneven.warnings.len(), 1);
    }

    #[test]
    fn mean_std_sample() {
        assert_eq!(mean_std(&[1.0]), (1.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
    }
}
