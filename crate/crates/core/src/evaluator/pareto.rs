use std::cmp::Ordering;

use super::TabularBenchmark;
use crate::error::{Error, Result};
use crate::space::{compare, Direction, Dominance, Genotype, ObjectiveVector};

/// Largest record count the exhaustive oracle will scan.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// Exact Pareto set of the benchmark over the named metric or evaluation
/// columns, in canonical minimization form. Identical objective vectors are
/// represented once, by the genotype with the lowest index. Output is in
/// lexicographic objective order.
pub fn exhaustive_pareto<S: AsRef<str>>(
    bench: &TabularBenchmark,
    objectives: &[S],
) -> Result<Vec<(Genotype, ObjectiveVector)>> {
    if objectives.is_empty() {
        return Err(Error::contract("at least one objective is required"));
    }
    let n = bench.len() as u64;
    if n > ENUMERATION_LIMIT {
        return Err(Error::SpaceTooLarge {
            size: n,
            limit: ENUMERATION_LIMIT,
        });
    }

    enum Source {
        Metric(usize, Direction),
        Column(usize, Direction),
    }
    let sources = objectives
        .iter()
        .map(|name| {
            let name = name.as_ref();
            if let Ok(i) = bench.metric_index(name) {
                Ok(Source::Metric(i, bench.specs()[i].direction))
            } else {
                let i = bench.column_index(name)?;
                Ok(Source::Column(i, bench.evaluation_columns()[i].direction))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points: Vec<(&Genotype, Vec<f64>)> = bench
        .records()
        .map(|(g, r)| {
            let v = sources
                .iter()
                .map(|s| match *s {
                    Source::Metric(i, d) => d.sign() * r.metrics[i],
                    Source::Column(i, d) => d.sign() * r.evaluations[i],
                })
                .collect();
            (g, v)
        })
        .collect();
    // Records arrive in index order and the sort is stable, so ties keep the
    // lowest-index genotype first.
    points.sort_by(|a, b| lex_cmp(&a.1, &b.1));

    // A point can only be dominated by a lexicographically smaller one, so a
    // single sweep against the front built so far is exact.
    let mut front: Vec<(&Genotype, Vec<f64>)> = Vec::new();
    for (g, v) in points {
        let keep = front
            .iter()
            .all(|(_, f)| matches!(compare(f, &v), Dominance::DominatedBy | Dominance::Incomparable));
        if keep {
            front.push((g, v));
        }
    }
    Ok(front
        .into_iter()
        .map(|(g, v)| (g.clone(), ObjectiveVector::new(v)))
        .collect())
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{generate_synthetic, LoadOptions};
    use crate::space::{dominates_slice, SearchSpace};

    #[test]
    fn matches_double_loop_on_27_genotypes() {
        let b = generate_synthetic(&SearchSpace::uniform(3, 3).unwrap(), 11, 0.8).unwrap();
        for cols in [
            vec!["synflow", "flops"],
            vec!["synflow", "jacov", "snip", "flops"],
            vec!["test_acc", "flops"],
        ] {
            let front = exhaustive_pareto(&b, &cols).unwrap();
            let all = exhaustive_all(&b, &cols);
            // independent O(n^2) oracle
            let mut expected: Vec<Vec<f64>> = Vec::new();
            for (i, v) in all.iter().enumerate() {
                let dominated = all.iter().any(|o| dominates_slice(o, v));
                if !dominated && !all[..i].contains(v) {
                    expected.push(v.clone());
                }
            }
            let mut got: Vec<Vec<f64>> = front.iter().map(|(_, o)| o.values().to_vec()).collect();
            expected.sort_by(|a, b| lex_cmp(a, b));
            got.sort_by(|a, b| lex_cmp(a, b));
            assert_eq!(got, expected, "{cols:?}");
        }
    }

    fn exhaustive_all(b: &TabularBenchmark, cols: &[&str]) -> Vec<Vec<f64>> {
        b.records()
            .map(|(g, _)| {
                cols.iter()
                    .map(|c| match b.metric_index(c) {
                        Ok(i) => b.specs()[i].direction.sign() * b.record(g).unwrap().metrics[i],
                        Err(_) => -b.ground_truth(g, c).unwrap(),
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn single_genotype_space() {
        let b = generate_synthetic(&SearchSpace::uniform(1, 1).unwrap(), 3, 0.5).unwrap();
        let front = exhaustive_pareto(&b, &["synflow", "flops"]).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].0, Genotype::new(vec![0]));
    }

    #[test]
    fn identical_records_collapse_to_one() {
        let mut text = r#"{"cardinalities":[3],"metrics":[{"name":"a","direction":"maximize","role":"performance"},{"name":"c","direction":"minimize","role":"complexity"}]}"#.to_string();
        for k in 0..3 {
            text.push_str(&format!("\n{{\"key\":\"{k}\",\"values\":{{\"a\":1.0,\"c\":2.0}}}}"));
        }
        let b = TabularBenchmark::parse(&text, &LoadOptions::default()).unwrap();
        let front = exhaustive_pareto(&b, &["a", "c"]).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].0, Genotype::new(vec![0]));
        assert_eq!(front[0].1.values(), &[-1.0, 2.0]);
    }

    #[test]
    fn unknown_objective() {
        let b = generate_synthetic(&SearchSpace::uniform(1, 2).unwrap(), 3, 0.5).unwrap();
        assert!(matches!(exhaustive_pareto(&b, &["nope"]), Err(Error::UnknownColumn(_))));
    }
}
