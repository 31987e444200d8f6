//! Front-quality indicators and the statistics used to compare methods.

mod compare;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::space::ObjectiveVector;

pub use compare::{
    compare_methods, mean_std, rank_sum_test, ComparisonRow, ComparisonTable, IndicatorCell, Mark, MethodRuns,
    RunIndicators, SIGNIFICANCE,
};

/// Default hypervolume reference point, in normalized objective units.
pub const DEFAULT_REFERENCE: [f64; 2] = [1.01, 1.01];

/// A set of minimization points with optional genotype labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FrontSet {
    pub points: Vec<ObjectiveVector>,
    pub labels: Vec<Option<String>>,
}

impl FrontSet {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        let labels = vec![None; points.len()];
        FrontSet {
            points: points.into_iter().map(ObjectiveVector::new).collect(),
            labels,
        }
    }

    pub fn labelled(points: Vec<(Vec<f64>, String)>) -> Self {
        let (points, labels): (Vec<_>, Vec<_>) = points
            .into_iter()
            .map(|(p, l)| (ObjectiveVector::new(p), Some(l)))
            .unzip();
        FrontSet { points, labels }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimensionality, checked to be uniform across points.
    pub fn dim(&self) -> Result<usize> {
        let first = self
            .points
            .first()
            .ok_or_else(|| Error::contract("front is empty"))?
            .len();
        for p in &self.points {
            check_len(first, p.len())?;
        }
        Ok(first)
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|p| p.values())
    }
}

/// Per-objective affine bounds used to normalize fronts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    /// Componentwise extremes of a front.
    pub fn of(front: &FrontSet) -> Result<Self> {
        let dim = front.dim()?;
        let mut lower = vec![f64::INFINITY; dim];
        let mut upper = vec![f64::NEG_INFINITY; dim];
        for p in front.iter() {
            for k in 0..dim {
                lower[k] = lower[k].min(p[k]);
                upper[k] = upper[k].max(p[k]);
            }
        }
        Ok(Bounds { lower, upper })
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(lo, hi)| hi <= lo)
    }
}

/// Modified distance from approximation point `a` to reference point `z`:
/// only the components where `a` is worse count.
fn d_plus(a: &[f64], z: &[f64]) -> f64 {
    a.iter()
        .zip(z)
        .map(|(ai, zi)| {
            let d = (ai - zi).max(0.0);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// IGD+: mean over reference points of the smallest modified distance to
/// the front.
pub fn igd_plus(front: &FrontSet, reference: &FrontSet) -> Result<f64> {
    let dim = front.dim()?;
    check_len(dim, reference.dim()?)?;
    let total: f64 = reference
        .iter()
        .map(|z| front.iter().map(|a| d_plus(a, z)).fold(f64::INFINITY, f64::min))
        .sum();
    Ok(total / reference.len() as f64)
}

/// Exact area dominated by the front and bounded by `reference`. Points
/// beyond the reference are clipped onto it and contribute nothing.
pub fn hypervolume_2d(front: &FrontSet, reference: &[f64]) -> Result<f64> {
    if reference.len() != 2 {
        return Err(Error::UnsupportedDimension(reference.len()));
    }
    if front.is_empty() {
        return Ok(0.0);
    }
    let dim = front.dim()?;
    if dim != 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut pts: Vec<[f64; 2]> = front
        .iter()
        .map(|p| [p[0].min(reference[0]), p[1].min(reference[1])])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut floor = reference[1];
    for [x, y] in pts {
        if y < floor {
            area += (reference[0] - x) * (floor - y);
            floor = y;
        }
    }
    Ok(area)
}

/// Maps every coordinate to `(v - lower) / (upper - lower)`.
pub fn normalize_front(front: &FrontSet, bounds: &Bounds) -> Result<FrontSet> {
    check_len(bounds.lower.len(), bounds.upper.len())?;
    if bounds.is_degenerate() {
        return Err(Error::contract("normalization bounds need upper > lower per objective"));
    }
    if !front.is_empty() {
        check_len(bounds.lower.len(), front.dim()?)?;
    }
    let points = front
        .iter()
        .map(|p| {
            let v = p
                .iter()
                .zip(bounds.lower.iter().zip(&bounds.upper))
                .map(|(&x, (&lo, &hi))| (x - lo) / (hi - lo))
                .collect();
            ObjectiveVector::new(v)
        })
        .collect();
    Ok(FrontSet {
        points,
        labels: front.labels.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fs(points: &[[f64; 2]]) -> FrontSet {
        FrontSet::new(points.iter().map(|p| p.to_vec()).collect())
    }

    #[test]
    fn igd_examples() {
        let r = fs(&[[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(igd_plus(&r, &r).unwrap(), 0.0);
        assert_eq!(igd_plus(&fs(&[[1.0, 1.0]]), &r).unwrap(), 1.0);
        assert_eq!(igd_plus(&fs(&[[-1.0, -1.0]]), &r).unwrap(), 0.0);
        assert!(igd_plus(&FrontSet::default(), &r).is_err());
        assert!(igd_plus(&FrontSet::new(vec![vec![1.0, 2.0, 3.0]]), &r).is_err());
    }

    #[test]
    fn hypervolume_examples() {
        assert_eq!(
            hypervolume_2d(&fs(&[[1.0, 2.0], [2.0, 1.0]]), &[3.0, 3.0]).unwrap(),
            3.0
        );
        assert_eq!(hypervolume_2d(&fs(&[[3.0, 3.0]]), &[3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(
            hypervolume_2d(&fs(&[[1.0, 2.0], [2.0, 1.0], [2.5, 2.5]]), &[3.0, 3.0]).unwrap(),
            3.0
        );
        // beyond the reference in one coordinate: clipped to zero area
        assert_eq!(hypervolume_2d(&fs(&[[0.5, 4.0]]), &[1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            hypervolume_2d(&FrontSet::new(vec![vec![0.0, 0.0, 0.0]]), &[1.0, 1.0, 1.0]),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn normalize_examples() {
        let f = fs(&[[2.0, 10.0], [4.0, 30.0]]);
        let b = Bounds::of(&f).unwrap();
        let n = normalize_front(&f, &b).unwrap();
        assert_eq!(n.iter().collect::<Vec<_>>(), vec![&[0.0, 0.0][..], &[1.0, 1.0][..]]);
        let unit = Bounds {
            lower: vec![0.0, 0.0],
            upper: vec![1.0, 1.0],
        };
        let g = fs(&[[0.25, 0.5]]);
        assert_eq!(normalize_front(&g, &unit).unwrap(), g);
        let flat = Bounds {
            lower: vec![0.0, 1.0],
            upper: vec![1.0, 1.0],
        };
        assert!(normalize_front(&g, &flat).is_err());
    }

    proptest! {
        #[test]
        fn adding_nondominated_point_never_decreases_hv(
            pts in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..30),
            extra in (0.0f64..1.0, 0.0f64..1.0),
        ) {
            let base: Vec<Vec<f64>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
            let before = hypervolume_2d(&FrontSet::new(base.clone()), &[1.01, 1.01]).unwrap();
            let mut more = base;
            more.push(vec![extra.0, extra.1]);
            let after = hypervolume_2d(&FrontSet::new(more), &[1.01, 1.01]).unwrap();
            prop_assert!(after >= before);
        }

        #[test]
        fn igd_of_reference_with_itself_is_zero(
            pts in proptest::collection::vec(proptest::collection::vec(-10.0f64..10.0, 3), 1..30)
        ) {
            let r = FrontSet::new(pts);
            prop_assert_eq!(igd_plus(&r, &r).unwrap(), 0.0);
        }
    }
}
