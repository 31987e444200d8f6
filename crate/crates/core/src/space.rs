//! Search spaces, genotypes, metric descriptions and Pareto dominance.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// A finite categorical design space: one cardinality per genotype position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchSpace {
    cardinalities: Vec<u32>,
}

impl SearchSpace {
    pub fn new(cardinalities: Vec<u32>) -> Result<Self> {
        if cardinalities.is_empty() {
            return Err(Error::contract("search space needs at least one position"));
        }
        if let Some(pos) = cardinalities.iter().position(|&c| c == 0) {
            return Err(Error::contract(format!(
                "cardinality at position {pos} must be at least 1"
            )));
        }
        Ok(SearchSpace { cardinalities })
    }

    /// `positions` genes with `choices` codes each.
    pub fn uniform(positions: usize, choices: u32) -> Result<Self> {
        Self::new(vec![choices; positions])
    }

    pub fn cardinalities(&self) -> &[u32] {
        &self.cardinalities
    }

    /// Genotype length.
    pub fn len(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cardinalities.is_empty()
    }

    /// Number of genotypes in the space; overflow is an error, never saturated.
    pub fn size(&self) -> Result<u64> {
        self.cardinalities
            .iter()
            .try_fold(1u64, |acc, &c| acc.checked_mul(u64::from(c)))
            .ok_or(Error::SpaceOverflow)
    }

    pub fn contains(&self, g: &Genotype) -> bool {
        g.len() == self.len()
            && g.codes()
                .iter()
                .zip(&self.cardinalities)
                .all(|(&code, &card)| code < card)
    }

    /// Mixed-radix index of `g`, first position most significant.
    pub fn index_of(&self, g: &Genotype) -> Option<u64> {
        if !self.contains(g) {
            return None;
        }
        let mut idx = 0u64;
        for (&code, &card) in g.codes().iter().zip(&self.cardinalities) {
            idx = idx.checked_mul(u64::from(card))? + u64::from(code);
        }
        Some(idx)
    }

    /// Inverse of [`SearchSpace::index_of`].
    pub fn genotype_at(&self, mut index: u64) -> Option<Genotype> {
        if index >= self.size().ok()? {
            return None;
        }
        let mut codes = vec![0u32; self.len()];
        for (slot, &card) in codes.iter_mut().zip(&self.cardinalities).rev() {
            *slot = (index % u64::from(card)) as u32;
            index /= u64::from(card);
        }
        Some(Genotype(codes))
    }

    /// Every genotype in index order. Fails if the space is larger than `limit`.
    pub fn enumerate(&self, limit: u64) -> Result<impl Iterator<Item = Genotype> + '_> {
        let size = self.size()?;
        if size > limit {
            return Err(Error::SpaceTooLarge { size, limit });
        }
        Ok((0..size).map(move |i| self.genotype_at(i).expect("index within size")))
    }
}

/// A candidate: one 0-based categorical code per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Genotype(Vec<u32>);

impl Genotype {
    pub fn new(codes: Vec<u32>) -> Self {
        Genotype(codes)
    }

    pub fn codes(&self) -> &[u32] {
        &self.0
    }

    pub fn codes_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Lookup key: codes joined by `-`, e.g. `0-4-1-2-0-3`.
    pub fn key(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, code) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{code}")?;
        }
        Ok(())
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let codes = s
            .split('-')
            .map(|part| {
                part.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::contract(format!("bad genotype key `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Genotype(codes))
    }
}

impl From<Vec<u32>> for Genotype {
    fn from(codes: Vec<u32>) -> Self {
        Genotype(codes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

impl Direction {
    /// Sign that maps a raw value onto the all-minimization convention.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Maximize => -1.0,
            Direction::Minimize => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricRole {
    Performance,
    Complexity,
}

/// Monotone pre-transform applied to a metric column at load time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    None,
    /// Symmetric log: `sign(v) * ln(1 + |v|)`.
    Log,
}

impl Transform {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Transform::None => v,
            Transform::Log => v.signum() * v.abs().ln_1p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricSpec {
    pub name: String,
    pub direction: Direction,
    pub role: MetricRole,
    /// Column holding the per-evaluation cost of this metric, in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_field: Option<String>,
    #[serde(default, skip_serializing_if = "is_default_transform")]
    pub transform: Transform,
}

fn is_default_transform(t: &Transform) -> bool {
    *t == Transform::None
}

impl MetricSpec {
    pub fn new(name: impl Into<String>, direction: Direction, role: MetricRole) -> Self {
        MetricSpec {
            name: name.into(),
            direction,
            role,
            cost_field: None,
            transform: Transform::None,
        }
    }

    pub fn with_cost(mut self, field: impl Into<String>) -> Self {
        self.cost_field = Some(field.into());
        self
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }
}

/// Raw metric values of one genotype, ordered like the selected metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorSet(Vec<f64>);

impl DescriptorSet {
    pub fn new(values: Vec<f64>) -> Self {
        DescriptorSet(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for DescriptorSet {
    fn from(values: Vec<f64>) -> Self {
        DescriptorSet(values)
    }
}

/// Objective values in the canonical all-minimization form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Self {
        ObjectiveVector(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for ObjectiveVector {
    fn from(values: Vec<f64>) -> Self {
        ObjectiveVector(values)
    }
}

/// Flips the sign of every maximized metric.
pub fn canonicalize(d: &DescriptorSet, specs: &[MetricSpec]) -> Result<ObjectiveVector> {
    check_len(specs.len(), d.len())?;
    Ok(ObjectiveVector(
        d.values()
            .iter()
            .zip(specs)
            .map(|(&v, spec)| spec.direction.sign() * v)
            .collect(),
    ))
}

/// Outcome of comparing two objective vectors under Pareto dominance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    DominatedBy,
    Equal,
    Incomparable,
}

/// Pareto comparison of two equal-length minimization vectors. Exact float
/// comparison, no epsilon.
pub fn compare(u: &[f64], v: &[f64]) -> Dominance {
    debug_assert_eq!(u.len(), v.len());
    let mut u_better = false;
    let mut v_better = false;
    for (a, b) in u.iter().zip(v) {
        match a.partial_cmp(b) {
            Some(Ordering::Less) => u_better = true,
            Some(Ordering::Greater) => v_better = true,
            _ => {}
        }
        if u_better && v_better {
            return Dominance::Incomparable;
        }
    }
    match (u_better, v_better) {
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::DominatedBy,
        (false, false) => Dominance::Equal,
        (true, true) => Dominance::Incomparable,
    }
}

/// `u` is no worse than `v` everywhere and strictly better somewhere.
pub(crate) fn dominates_slice(u: &[f64], v: &[f64]) -> bool {
    compare(u, v) == Dominance::Dominates
}

pub fn dominates(u: &ObjectiveVector, v: &ObjectiveVector) -> Result<bool> {
    check_len(u.len(), v.len())?;
    Ok(dominates_slice(u.values(), v.values()))
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    Ok(distance_unchecked(a, b))
}

pub(crate) fn distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec())
    }

    #[test]
    fn canonicalize_flips_maximized() {
        let specs = [
            MetricSpec::new("acc", Direction::Maximize, MetricRole::Performance),
            MetricSpec::new("flops", Direction::Minimize, MetricRole::Complexity),
        ];
        let out = canonicalize(&DescriptorSet::new(vec![0.9, 5.0]), &specs).unwrap();
        assert_eq!(out.values(), &[-0.9, 5.0]);

        let min_only = [MetricSpec::new("f", Direction::Minimize, MetricRole::Complexity)];
        let out = canonicalize(&DescriptorSet::new(vec![3.0]), &min_only).unwrap();
        assert_eq!(out.values(), &[3.0]);

        let max2 = [
            MetricSpec::new("a", Direction::Maximize, MetricRole::Performance),
            MetricSpec::new("b", Direction::Maximize, MetricRole::Performance),
        ];
        let out = canonicalize(&DescriptorSet::new(vec![2.0, 2.0]), &max2).unwrap();
        assert_eq!(out.values(), &[-2.0, -2.0]);
    }

    #[test]
    fn canonicalize_length_mismatch() {
        let specs = [MetricSpec::new("a", Direction::Maximize, MetricRole::Performance)];
        let err = canonicalize(&DescriptorSet::new(vec![1.0, 2.0]), &specs).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&ov(&[1.0, 1.0]), &ov(&[2.0, 2.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 2.0]), &ov(&[1.0, 2.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 3.0]), &ov(&[2.0, 2.0])).unwrap());
        assert!(!dominates(&ov(&[2.0, 2.0]), &ov(&[1.0, 3.0])).unwrap());
        assert!(dominates(&ov(&[1.0]), &ov(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        let d = euclidean_distance(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!((d - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(euclidean_distance(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn space_size_and_overflow() {
        let s = SearchSpace::uniform(6, 5).unwrap();
        assert_eq!(s.size().unwrap(), 15_625);
        let huge = SearchSpace::new(vec![u32::MAX; 3]).unwrap();
        assert!(matches!(huge.size(), Err(Error::SpaceOverflow)));
        assert!(SearchSpace::new(vec![]).is_err());
        assert!(SearchSpace::new(vec![2, 0]).is_err());
    }

    #[test]
    fn genotype_key_round_trip() {
        let g = Genotype::new(vec![0, 4, 1, 2, 0, 3]);
        assert_eq!(g.key(), "0-4-1-2-0-3");
        assert_eq!("0-4-1-2-0-3".parse::<Genotype>().unwrap(), g);
        assert!("0-x".parse::<Genotype>().is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = SearchSpace::new(vec![2, 3, 4]).unwrap();
        let all: Vec<_> = s.enumerate(100).unwrap().collect();
        assert_eq!(all.len(), 24);
        for (i, g) in all.iter().enumerate() {
            assert!(s.contains(g));
            assert_eq!(s.index_of(g), Some(i as u64));
        }
        assert!(!s.contains(&Genotype::new(vec![2, 0, 0])));
        assert!(s.enumerate(10).is_err());
    }

    proptest! {
        #[test]
        fn canonicalize_preserves_dominance(
            x in proptest::collection::vec(-5i32..5, 3),
            y in proptest::collection::vec(-5i32..5, 3),
        ) {
            // mixed convention: metric 0 and 2 maximized, metric 1 minimized
            let specs = [
                MetricSpec::new("a", Direction::Maximize, MetricRole::Performance),
                MetricSpec::new("b", Direction::Minimize, MetricRole::Complexity),
                MetricSpec::new("c", Direction::Maximize, MetricRole::Performance),
            ];
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
            let no_worse = xf[0] >= yf[0] && xf[1] <= yf[1] && xf[2] >= yf[2];
            let better = xf[0] > yf[0] || xf[1] < yf[1] || xf[2] > yf[2];
            let cx = canonicalize(&DescriptorSet::new(xf), &specs).unwrap();
            let cy = canonicalize(&DescriptorSet::new(yf), &specs).unwrap();
            prop_assert_eq!(no_worse && better, dominates(&cx, &cy).unwrap());
        }

        #[test]
        fn distance_symmetric(a in proptest::collection::vec(-1e3f64..1e3, 4),
                              b in proptest::collection::vec(-1e3f64..1e3, 4)) {
            let ab = euclidean_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, euclidean_distance(&b, &a).unwrap());
            prop_assert_eq!(ab == 0.0, a == b);
        }
    }
}
