//! NSGA-II over the canonical descriptor objectives. The elitist archive is
//! maintained passively from every evaluation and reported as the front.

use std::collections::HashSet;

use rand::Rng as _;

use super::variation::random_genotype;
use super::{evaluate_into, snapshot, Individual, SearchConfig, SearchOutcome};
use crate::archive::EliteArchive;
use crate::error::Result;
use crate::evaluator::Evaluator;
use crate::space::{compare, Dominance, Genotype};
use crate::Rng;

/// Deb's fast non-dominated sort. Returns fronts of indices, best first.
pub fn fast_nondominated_sort<V: AsRef<[f64]>>(objs: &[V]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            match compare(objs[i].as_ref(), objs[j].as_ref()) {
                Dominance::Dominates => {
                    dominated_by[i].push(j);
                    domination_count[j] += 1;
                }
                Dominance::DominatedBy => {
                    dominated_by[j].push(i);
                    domination_count[i] += 1;
                }
                Dominance::Equal | Dominance::Incomparable => {}
            }
        }
    }

    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance within one front. Per objective, the first and last
/// points in sorted order are boundaries (infinite distance); interior
/// points accumulate the range-normalized gap between their neighbours. An
/// objective with zero range adds nothing to interior points.
pub fn crowding_distance<V: AsRef<[f64]>>(front: &[V]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        let value = |i: usize| front[i].as_ref()[k];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)));
        let lo = value(order[0]);
        let hi = value(order[n - 1]);
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range > 0.0 {
            for w in order.windows(3) {
                distance[w[1]] += (value(w[2]) - value(w[0])) / range;
            }
        }
    }
    distance
}

#[derive(Debug, Clone)]
struct Ranked {
    ind: Individual,
    rank: usize,
    crowding: f64,
}

/// Elitist (mu + lambda) survival by rank, then crowding distance.
fn environmental_selection(union: Vec<Individual>, n: usize) -> Vec<Ranked> {
    let objs: Vec<Vec<f64>> = union.iter().map(|i| i.objectives.values().to_vec()).collect();
    let fronts = fast_nondominated_sort(&objs);
    let mut slots: Vec<Option<Individual>> = union.into_iter().map(Some).collect();
    let mut survivors = Vec::with_capacity(n);
    for (rank, front) in fronts.iter().enumerate() {
        if survivors.len() >= n {
            break;
        }
        let points: Vec<&[f64]> = front.iter().map(|&i| objs[i].as_slice()).collect();
        let crowd = crowding_distance(&points);
        let mut members: Vec<(usize, f64)> = front.iter().copied().zip(crowd).collect();
        if survivors.len() + members.len() > n {
            members.sort_by(|a, b| b.1.total_cmp(&a.1));
            members.truncate(n - survivors.len());
        }
        for (i, crowding) in members {
            survivors.push(Ranked {
                ind: slots[i].take().expect("each index survives once"),
                rank,
                crowding,
            });
        }
    }
    survivors
}

/// Binary tournament on rank, then crowding distance, then a coin flip.
fn tournament<'a>(pop: &'a [Ranked], rng: &mut Rng) -> &'a Ranked {
    let a = rng.random_range(0..pop.len());
    let mut b = rng.random_range(0..pop.len() - 1);
    if b >= a {
        b += 1;
    }
    let (x, y) = (&pop[a], &pop[b]);
    if x.rank != y.rank {
        return if x.rank < y.rank { x } else { y };
    }
    if x.crowding != y.crowding {
        return if x.crowding > y.crowding { x } else { y };
    }
    if rng.random::<bool>() {
        x
    } else {
        y
    }
}

/// Mating attempts per generation when duplicates are eliminated; a brood
/// may come out short once the space is nearly exhausted.
pub const MAX_MATING_ROUNDS: usize = 100;

fn breed_offspring(
    config: &SearchConfig,
    population: &[Ranked],
    space: &crate::space::SearchSpace,
    rng: &mut Rng,
) -> Result<Vec<Genotype>> {
    let n = config.population_size;
    let mut offspring = Vec::with_capacity(n);
    if !config.eliminate_duplicates {
        while offspring.len() < n {
            let p1 = tournament(population, rng).ind.genotype.clone();
            let p2 = tournament(population, rng).ind.genotype.clone();
            let (a, b) = config.variation.breed(&p1, &p2, space, rng)?;
            offspring.push(a);
            offspring.push(b);
        }
        return Ok(offspring);
    }

    let mut seen: HashSet<Genotype> = population.iter().map(|r| r.ind.genotype.clone()).collect();
    for _ in 0..MAX_MATING_ROUNDS {
        let missing = n - offspring.len();
        let mut brood = Vec::with_capacity(missing + 1);
        while brood.len() < missing {
            let p1 = tournament(population, rng).ind.genotype.clone();
            let p2 = tournament(population, rng).ind.genotype.clone();
            let (a, b) = config.variation.breed(&p1, &p2, space, rng)?;
            brood.push(a);
            brood.push(b);
        }
        for g in brood {
            if offspring.len() < n && seen.insert(g.clone()) {
                offspring.push(g);
            }
        }
        if offspring.len() == n {
            break;
        }
    }
    Ok(offspring)
}

pub fn run_moenas(config: &SearchConfig, evaluator: &mut Evaluator<'_>, rng: &mut Rng) -> Result<SearchOutcome> {
    config.validate()?;
    let space = evaluator.benchmark().space().clone();
    let n = config.population_size;

    let mut archive = EliteArchive::new();
    let mut initial = Vec::with_capacity(n);
    for _ in 0..n {
        let g = random_genotype(&space, rng);
        initial.push(evaluate_into(g, evaluator, &mut archive)?);
    }
    let mut population = environmental_selection(initial, n);
    let mut history = vec![snapshot(0, evaluator, &archive)];

    for generation in 1..=config.generations {
        let offspring = breed_offspring(config, &population, &space, rng)?;
        let mut union: Vec<Individual> = population.into_iter().map(|r| r.ind).collect();
        for g in offspring {
            union.push(evaluate_into(g, evaluator, &mut archive)?);
        }
        population = environmental_selection(union, n);
        history.push(snapshot(generation, evaluator, &archive));
    }

    Ok(SearchOutcome { archive, history })
}
