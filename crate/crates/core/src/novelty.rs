//! Archive-relative descriptor normalization and the signed novelty score.
//!
//! A candidate's novelty magnitude is its mean Euclidean distance, in
//! min-max normalized descriptor space, to every archive member (a member's
//! own entry contributes a zero term). The sign is positive for archive
//! members and negative for everything else, so dominated candidates always
//! rank below non-dominated ones and, among them, the farther from the front
//! the lower.

use serde::{Deserialize, Serialize};

use crate::archive::EliteArchive;
use crate::error::{check_len, Error, Result};
use crate::space::{distance_unchecked, DescriptorSet, Genotype};

/// Value assigned to a metric whose archive range is degenerate.
pub const DEGENERATE_VALUE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationState {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoveltyScore {
    pub value: f64,
    pub member: bool,
}

impl NoveltyScore {
    pub fn magnitude(&self) -> f64 {
        self.value.abs()
    }
}

/// Per-metric bounds over the archive's raw descriptors.
pub fn fit_normalization(archive: &EliteArchive) -> Result<NormalizationState> {
    let mut entries = archive.entries().iter();
    let first = entries
        .next()
        .ok_or_else(|| Error::contract("cannot fit normalization on an empty archive"))?;
    let mut min = first.descriptors.values().to_vec();
    let mut max = min.clone();
    for e in entries {
        for ((lo, hi), &v) in min.iter_mut().zip(max.iter_mut()).zip(e.descriptors.values()) {
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
    }
    Ok(NormalizationState { min, max })
}

/// Min-max maps each component; no clamping for values outside the bounds.
pub fn normalize(d: &DescriptorSet, ns: &NormalizationState) -> Vec<f64> {
    normalize_values(d.values(), ns)
}

fn normalize_values(values: &[f64], ns: &NormalizationState) -> Vec<f64> {
    values
        .iter()
        .zip(ns.min.iter().zip(&ns.max))
        .map(|(&v, (&lo, &hi))| {
            if hi > lo {
                (v - lo) / (hi - lo)
            } else {
                DEGENERATE_VALUE
            }
        })
        .collect()
}

/// Archive descriptors pre-normalized once, reused across many candidates.
struct NormalizedArchive<'a> {
    archive: &'a EliteArchive,
    state: NormalizationState,
    points: Vec<Vec<f64>>,
}

impl<'a> NormalizedArchive<'a> {
    fn new(archive: &'a EliteArchive, state: NormalizationState) -> Self {
        let points = archive
            .entries()
            .iter()
            .map(|e| normalize(&e.descriptors, &state))
            .collect();
        NormalizedArchive { archive, state, points }
    }

    fn score(&self, genotype: &Genotype, descriptors: &DescriptorSet) -> Result<NoveltyScore> {
        check_len(self.state.min.len(), descriptors.len())?;
        let x = normalize(descriptors, &self.state);
        let total: f64 = self.points.iter().map(|p| distance_unchecked(&x, p)).sum();
        let magnitude = total / self.points.len() as f64;
        let member = self.archive.contains_genotype(genotype);
        Ok(NoveltyScore {
            value: if member { magnitude } else { -magnitude },
            member,
        })
    }
}

pub fn novelty_score(
    genotype: &Genotype,
    descriptors: &DescriptorSet,
    archive: &EliteArchive,
    ns: &NormalizationState,
) -> Result<NoveltyScore> {
    if archive.is_empty() {
        return Err(Error::contract("novelty needs a non-empty archive"));
    }
    NormalizedArchive::new(archive, ns.clone()).score(genotype, descriptors)
}

/// Scores every candidate against the (already updated) archive, fitting
/// the normalization once for the whole call.
pub fn score_population<'g, I>(population: I, archive: &EliteArchive) -> Result<Vec<NoveltyScore>>
where
    I: IntoIterator<Item = (&'g Genotype, &'g DescriptorSet)>,
{
    let state = fit_normalization(archive)?;
    let normalized = NormalizedArchive::new(archive, state);
    population.into_iter().map(|(g, d)| normalized.score(g, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archive::ArchiveEntry;

    fn g(id: u32) -> Genotype {
        Genotype::new(vec![id])
    }

    fn archive_of(points: &[&[f64]]) -> EliteArchive {
        let mut a = EliteArchive::new();
        for (i, p) in points.iter().enumerate() {
            assert!(
                a.try_insert(ArchiveEntry::from_objectives(g(i as u32), p.to_vec()))
                    .accepted
            );
        }
        a
    }

    #[test]
    fn fit_extremes() {
        use crate::space::{Direction, MetricRole, MetricSpec};
        let specs = [
            MetricSpec::new("perf", Direction::Maximize, MetricRole::Performance),
            MetricSpec::new("flops", Direction::Minimize, MetricRole::Complexity),
        ];
        let mut a = EliteArchive::new();
        for (i, d) in [[0.0, 10.0], [4.0, 20.0]].iter().enumerate() {
            let e = ArchiveEntry::new(g(i as u32), DescriptorSet::new(d.to_vec()), &specs).unwrap();
            assert!(a.try_insert(e).accepted);
        }
        let ns = fit_normalization(&a).unwrap();
        assert_eq!(ns.min, vec![0.0, 10.0]);
        assert_eq!(ns.max, vec![4.0, 20.0]);

        let single = archive_of(&[&[3.0, 7.0]]);
        let ns = fit_normalization(&single).unwrap();
        assert_eq!(ns.min, ns.max);

        assert!(fit_normalization(&EliteArchive::new()).is_err());
    }

    #[test]
    fn degenerate_column() {
        let a = archive_of(&[&[1.0, 5.0, 3.0], &[2.0, 5.0, 2.0], &[3.0, 5.0, 1.0]]);
        let ns = fit_normalization(&a).unwrap();
        assert_eq!((ns.min[1], ns.max[1]), (5.0, 5.0));
        let n = normalize(&DescriptorSet::new(vec![2.0, 9.0, 3.0]), &ns);
        assert_eq!(n, vec![0.5, DEGENERATE_VALUE, 1.0]);
    }

    #[test]
    fn normalize_examples() {
        let ns = NormalizationState {
            min: vec![0.0, 10.0],
            max: vec![4.0, 20.0],
        };
        assert_eq!(normalize(&DescriptorSet::new(vec![2.0, 15.0]), &ns), vec![0.5, 0.5]);
        assert_eq!(normalize(&DescriptorSet::new(vec![0.0, 10.0]), &ns), vec![0.0, 0.0]);
        // outside the archive range: not clamped
        assert_eq!(normalize(&DescriptorSet::new(vec![8.0, 0.0]), &ns), vec![2.0, -1.0]);
    }

    #[test]
    fn score_examples() {
        let a = archive_of(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ns = fit_normalization(&a).unwrap();
        // archive normalized points are (0,1),(1,0); x=(0,0) lies at distance 1 from both
        let s = novelty_score(&g(99), &DescriptorSet::new(vec![0.0, 0.0]), &a, &ns).unwrap();
        assert_eq!(
            s,
            NoveltyScore {
                value: -1.0,
                member: false
            }
        );

        let solo = archive_of(&[&[2.0, 2.0]]);
        let ns = fit_normalization(&solo).unwrap();
        let s = novelty_score(&g(0), &DescriptorSet::new(vec![2.0, 2.0]), &solo, &ns).unwrap();
        assert!(s.member);
        assert_eq!(s.value, 0.0);
        assert!(s.value.is_sign_positive());

        let ns = NormalizationState {
            min: vec![0.0, 0.0],
            max: vec![1.0, 1.0],
        };
        let origin = archive_of(&[&[0.0, 0.0]]);
        let s = novelty_score(&g(5), &DescriptorSet::new(vec![3.0, 4.0]), &origin, &ns).unwrap();
        assert_eq!(s.value, -5.0);
    }

    #[test]
    fn population_scores_follow_membership() {
        let a = archive_of(&[&[0.0, 3.0], &[1.0, 2.0], &[3.0, 0.0]]);
        let members: Vec<_> = a
            .entries()
            .iter()
            .map(|e| (e.genotype.clone(), e.descriptors.clone()))
            .collect();
        let scores = score_population(members.iter().map(|(g, d)| (g, d)), &a).unwrap();
        assert!(scores.iter().all(|s| s.member && s.value >= 0.0));

        let dominated = (g(50), DescriptorSet::new(vec![4.0, 4.0]));
        let scores = score_population([(&dominated.0, &dominated.1)], &a).unwrap();
        assert!(scores[0].value < 0.0 && !scores[0].member);

        let rev: Vec<_> = members.iter().rev().collect();
        let fwd = score_population(members.iter().map(|(g, d)| (g, d)), &a).unwrap();
        let back = score_population(rev.iter().map(|(g, d)| (g, d)), &a).unwrap();
        assert_eq!(fwd.iter().rev().copied().collect::<Vec<_>>(), back);
    }
}
