//! Procedural stand-in for a tabular NAS benchmark.
//!
//! Every genotype gets a latent quality and a latent size, both additive over
//! per-position code weights plus a per-genotype interaction term. Size is
//! positively correlated with quality, so the ground-truth front trades test
//! accuracy against FLOPs. The three proxy columns are Gaussian-copula noisy
//! views of the latent quality whose Spearman correlation with the ground
//! truth is calibrated to the requested value.

use rand::Rng as _;
use rand_distr::StandardNormal;
use statrs::distribution::{ContinuousCDF, Normal};

use super::format::{write_jsonl, Header};
use super::{EvalColumn, LoadOptions, TabularBenchmark};
use crate::error::{Error, Result};
use crate::space::{Direction, MetricRole, MetricSpec, SearchSpace};

/// Largest space the generator will materialize.
pub const SYNTHETIC_LIMIT: u64 = 1_000_000;

/// Accepted gap between requested and realized proxy/truth Spearman correlation.
const CALIBRATION_TOLERANCE: f64 = 0.04;
const CALIBRATION_ATTEMPTS: usize = 64;

const PROXIES: [&str; 3] = ["synflow", "jacov", "snip"];

/// Builds a deterministic benchmark with columns `synflow`, `jacov`, `snip`
/// (maximize, 1 s cost each), `flops` (minimize, free) and ground truth
/// `test_acc`.
pub fn generate_synthetic(space: &SearchSpace, seed: u64, correlation: f64) -> Result<TabularBenchmark> {
    let text = synthetic_jsonl(space, seed, correlation)?;
    TabularBenchmark::parse(&text, &LoadOptions::default())
}

/// The benchmark file text produced by [`generate_synthetic`].
pub fn synthetic_jsonl(space: &SearchSpace, seed: u64, correlation: f64) -> Result<String> {
    if !(0.0..=1.0).contains(&correlation) {
        return Err(Error::contract(format!("correlation {correlation} outside [0, 1]")));
    }
    let size = space.size()?;
    if size > SYNTHETIC_LIMIT {
        return Err(Error::SpaceTooLarge {
            size,
            limit: SYNTHETIC_LIMIT,
        });
    }
    let n = size as usize;
    let mut rng = crate::seeded_rng(seed);
    let mut normal = move || -> f64 { rng.sample(StandardNormal) };

    let mut quality_w = Vec::new();
    let mut size_w = Vec::new();
    for &card in space.cardinalities() {
        let q: Vec<f64> = (0..card).map(|_| normal()).collect();
        let s: Vec<f64> = q.iter().map(|&w| 0.7 * w + 0.3 * normal()).collect();
        quality_w.push(q);
        size_w.push(s);
    }

    let genotypes: Vec<_> = space.enumerate(SYNTHETIC_LIMIT)?.collect();
    let mut quality = Vec::with_capacity(n);
    let mut bulk = Vec::with_capacity(n);
    for g in &genotypes {
        let (mut q, mut s) = (0.0, 0.0);
        for (i, &code) in g.codes().iter().enumerate() {
            q += quality_w[i][code as usize];
            s += size_w[i][code as usize];
        }
        quality.push(q + 0.3 * normal());
        bulk.push(s + 0.2 * normal());
    }

    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let quality_scores = normal_scores(&quality, &std_normal);
    let size_scores = normal_scores(&bulk, &std_normal);

    // Pearson correlation of a bivariate normal giving Spearman `correlation`.
    let pearson = (2.0 * (std::f64::consts::PI * correlation / 6.0).sin()).min(1.0);
    let residual = (1.0 - pearson * pearson).max(0.0).sqrt();
    let mut proxies: Vec<Vec<f64>> = Vec::with_capacity(PROXIES.len());
    for _ in PROXIES {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..CALIBRATION_ATTEMPTS {
            let z: Vec<f64> = quality_scores
                .iter()
                .map(|&q| pearson * q + residual * normal())
                .collect();
            let gap = (spearman(&z, &quality_scores) - correlation).abs();
            let better = best.as_ref().is_none_or(|(g, _)| gap < *g);
            if better {
                best = Some((gap, z));
            }
            if gap <= CALIBRATION_TOLERANCE || residual == 0.0 {
                break;
            }
        }
        proxies.push(best.expect("at least one attempt").1);
    }

    let header = Header {
        format: Some(super::format::FORMAT_TAG.to_string()),
        cardinalities: space.cardinalities().to_vec(),
        metrics: PROXIES
            .iter()
            .map(|name| {
                MetricSpec::new(*name, Direction::Maximize, MetricRole::Performance).with_cost(format!("{name}_time"))
            })
            .chain(std::iter::once(MetricSpec::new(
                "flops",
                Direction::Minimize,
                MetricRole::Complexity,
            )))
            .collect(),
        evaluation_columns: vec![EvalColumn::new("test_acc", Direction::Maximize)],
    };

    let rows = genotypes.iter().enumerate().map(|(i, g)| {
        let z = |j: usize| proxies[j][i];
        let values = vec![
            ("synflow", 1e3 * (2.0 * z(0)).exp()),
            ("jacov", -60.0 + 5.0 * z(1)),
            ("snip", 20.0 * (0.7 * z(2)).exp()),
            ("flops", 10.0 * (0.8 * size_scores[i]).exp()),
            ("synflow_time", 1.0),
            ("jacov_time", 1.0),
            ("snip_time", 1.0),
            ("test_acc", 0.5 + 0.45 * std_normal.cdf(quality_scores[i])),
        ];
        (g.key(), values)
    });
    write_jsonl(&header, rows)
}

/// Ranks (0-based, ties broken by position) mapped through the inverse
/// normal CDF.
fn normal_scores(values: &[f64], std_normal: &Normal) -> Vec<f64> {
    let n = values.len() as f64;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = std_normal.inverse_cdf((rank as f64 + 0.5) / n);
    }
    out
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0 + 1.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either input is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spearman inputs differ in length");
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Genotype;

    #[test]
    fn regeneration_is_identical() {
        let s = SearchSpace::uniform(3, 4).unwrap();
        assert_eq!(
            synthetic_jsonl(&s, 5, 0.7).unwrap(),
            synthetic_jsonl(&s, 5, 0.7).unwrap()
        );
        assert_ne!(
            synthetic_jsonl(&s, 5, 0.7).unwrap(),
            synthetic_jsonl(&s, 6, 0.7).unwrap()
        );
    }

    #[test]
    fn oversize_space_rejected() {
        let s = SearchSpace::uniform(7, 10).unwrap();
        assert!(matches!(
            generate_synthetic(&s, 0, 0.5),
            Err(Error::SpaceTooLarge { .. })
        ));
        let s = SearchSpace::uniform(2, 2).unwrap();
        assert!(generate_synthetic(&s, 0, 1.5).is_err());
    }

    #[test]
    fn columns_and_costs() {
        let b = generate_synthetic(&SearchSpace::uniform(2, 3).unwrap(), 1, 0.5).unwrap();
        assert_eq!(b.len(), 9);
        let names: Vec<_> = b.specs().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["synflow", "jacov", "snip", "flops"]);
        let r = b.record(&Genotype::new(vec![1, 2])).unwrap();
        assert_eq!(r.costs, vec![1.0, 1.0, 1.0, 0.0]);
        assert!(r.evaluations[0] > 0.5 && r.evaluations[0] < 0.95);
        assert!(r.metrics[3] > 0.0);
    }

    #[test]
    fn average_ranks_with_ties() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 4.0, 5.0]), vec![1.0, 2.5, 2.5, 4.0, 5.0]);
    }
}
