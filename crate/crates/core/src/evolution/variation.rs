use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Genotype, SearchSpace};
use crate::Rng;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Crossover {
    #[default]
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Resample a gene uniformly among its other codes.
    Uniform,
    /// Bounded polynomial perturbation of the integer code, then rounding.
    PolynomialInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationConfig {
    pub crossover: Crossover,
    pub mutation: Mutation,
    /// Per-gene mutation probability; `None` means `1 / L`.
    pub mutation_rate: Option<f64>,
    pub polynomial_eta: f64,
}

pub const DEFAULT_POLYNOMIAL_ETA: f64 = 20.0;

impl VariationConfig {
    pub fn uniform() -> Self {
        VariationConfig {
            crossover: Crossover::TwoPoint,
            mutation: Mutation::Uniform,
            mutation_rate: None,
            polynomial_eta: DEFAULT_POLYNOMIAL_ETA,
        }
    }

    pub fn polynomial() -> Self {
        VariationConfig {
            mutation: Mutation::PolynomialInteger,
            ..Self::uniform()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(rate) = self.mutation_rate {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("mutation_rate {rate} outside [0, 1]")));
            }
        }
        if !(self.polynomial_eta > 0.0 && self.polynomial_eta.is_finite()) {
            return Err(Error::Config(format!(
                "polynomial_eta must be positive, got {}",
                self.polynomial_eta
            )));
        }
        Ok(())
    }

    pub fn rate_for(&self, space: &SearchSpace) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / space.len() as f64)
    }

    /// Crossover of two parents followed by mutation of both children.
    pub fn breed(
        &self,
        p1: &Genotype,
        p2: &Genotype,
        space: &SearchSpace,
        rng: &mut Rng,
    ) -> Result<(Genotype, Genotype)> {
        let (c1, c2) = if space.len() >= 2 {
            match self.crossover {
                Crossover::TwoPoint => two_point_crossover(p1, p2, rng)?,
            }
        } else {
            // nothing to cut in a single-gene genotype
            (p1.clone(), p2.clone())
        };
        let rate = self.rate_for(space);
        let mutate = |g: &Genotype, rng: &mut Rng| match self.mutation {
            Mutation::Uniform => uniform_mutation(g, space, rate, rng),
            Mutation::PolynomialInteger => polynomial_integer_mutation(g, space, rate, self.polynomial_eta, rng),
        };
        let c1 = mutate(&c1, rng);
        let c2 = mutate(&c2, rng);
        Ok((c1, c2))
    }
}

pub fn random_genotype(space: &SearchSpace, rng: &mut Rng) -> Genotype {
    Genotype::new(space.cardinalities().iter().map(|&c| rng.random_range(0..c)).collect())
}

/// Swaps the segment `[c1, c2)` between two parents, with `0 < c1 <= c2 < L`
/// drawn uniformly.
pub fn two_point_crossover(p1: &Genotype, p2: &Genotype, rng: &mut Rng) -> Result<(Genotype, Genotype)> {
    let len = p1.len();
    if len < 2 || p2.len() != len {
        return Err(Error::contract(format!(
            "two-point crossover needs equal lengths >= 2, got {} and {}",
            p1.len(),
            p2.len()
        )));
    }
    let a = rng.random_range(1..len);
    let b = rng.random_range(1..len);
    crossover_at(p1, p2, a.min(b), a.max(b))
}

pub fn crossover_at(p1: &Genotype, p2: &Genotype, c1: usize, c2: usize) -> Result<(Genotype, Genotype)> {
    let len = p1.len();
    if p2.len() != len || !(0 < c1 && c1 <= c2 && c2 < len) {
        return Err(Error::contract(format!(
            "invalid cut points ({c1}, {c2}) for length {len}"
        )));
    }
    let mut a = p1.clone();
    let mut b = p2.clone();
    a.codes_mut()[c1..c2].copy_from_slice(&p2.codes()[c1..c2]);
    b.codes_mut()[c1..c2].copy_from_slice(&p1.codes()[c1..c2]);
    Ok((a, b))
}

pub fn uniform_mutation(g: &Genotype, space: &SearchSpace, rate: f64, rng: &mut Rng) -> Genotype {
    let mut out = g.clone();
    for (code, &card) in out.codes_mut().iter_mut().zip(space.cardinalities()) {
        if rng.random::<f64>() < rate && card > 1 {
            let pick = rng.random_range(0..card - 1);
            *code = if pick >= *code { pick + 1 } else { pick };
        }
    }
    out
}

/// Deb's bounded polynomial mutation on the integer code with bounds
/// `[0, cardinality - 1]`, rounded to the nearest code.
pub fn polynomial_integer_mutation(g: &Genotype, space: &SearchSpace, rate: f64, eta: f64, rng: &mut Rng) -> Genotype {
    let mut out = g.clone();
    for (code, &card) in out.codes_mut().iter_mut().zip(space.cardinalities()) {
        if rng.random::<f64>() >= rate || card < 2 {
            continue;
        }
        let upper = f64::from(card - 1);
        let y = f64::from(*code);
        let delta = polynomial_delta(y / upper, (upper - y) / upper, eta, rng.random::<f64>());
        let mutated = (y + delta * upper).round().clamp(0.0, upper);
        *code = mutated as u32;
    }
    out
}

/// Normalized perturbation for a gene at distance `below` from the lower
/// bound and `above` from the upper bound (both in units of the range).
pub(crate) fn polynomial_delta(below: f64, above: f64, eta: f64, r: f64) -> f64 {
    let power = 1.0 / (eta + 1.0);
    if r < 0.5 {
        let xy = 1.0 - below;
        let val = 2.0 * r + (1.0 - 2.0 * r) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else {
        let xy = 1.0 - above;
        let val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    }
}
