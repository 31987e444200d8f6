use rand::seq::SliceRandom;
use rand::Rng as _;

use super::variation::random_genotype;
use super::{evaluate_into, snapshot, Individual, SearchConfig, SearchOutcome};
use crate::archive::EliteArchive;
use crate::error::{Error, Result};
use crate::evaluator::Evaluator;
use crate::novelty::score_population;
use crate::Rng;

/// Keeps the `n` highest-scoring individuals. Ties go to archive members
/// first, then to a seeded random order. Survivors come out best first.
pub fn select_by_novelty(union: Vec<Individual>, n: usize, rng: &mut Rng) -> Result<Vec<Individual>> {
    if n > union.len() {
        return Err(Error::contract(format!(
            "cannot select {n} survivors from {} individuals",
            union.len()
        )));
    }
    let mut keyed = union
        .into_iter()
        .map(|ind| {
            let score = ind
                .score
                .ok_or_else(|| Error::contract(format!("individual `{}` has no novelty score", ind.genotype)))?;
            Ok((score, rng.random::<u64>(), ind))
        })
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|(a, ka, _), (b, kb, _)| {
        b.value
            .total_cmp(&a.value)
            .then_with(|| b.member.cmp(&a.member))
            .then_with(|| ka.cmp(kb))
    });
    Ok(keyed.into_iter().take(n).map(|(_, _, ind)| ind).collect())
}

/// Pareto dominance-based novelty search.
///
/// Random initial population, then per generation: shuffle and pair the
/// survivors, breed `N` offspring, evaluate each offspring and offer it to
/// the archive, score parents and offspring against the updated archive and
/// keep the `N` most novel.
pub fn run_pdns(config: &SearchConfig, evaluator: &mut Evaluator<'_>, rng: &mut Rng) -> Result<SearchOutcome> {
    config.validate()?;
    let space = evaluator.benchmark().space().clone();
    let n = config.population_size;

    let mut archive = EliteArchive::new();
    let mut population = Vec::with_capacity(n);
    for _ in 0..n {
        let g = random_genotype(&space, rng);
        population.push(evaluate_into(g, evaluator, &mut archive)?);
    }
    let mut history = vec![snapshot(0, evaluator, &archive)];

    for generation in 1..=config.generations {
        population.shuffle(rng);
        let mut offspring = Vec::with_capacity(n);
        for pair in population.chunks_exact(2) {
            let (a, b) = config
                .variation
                .breed(&pair[0].genotype, &pair[1].genotype, &space, rng)?;
            offspring.push(a);
            offspring.push(b);
        }
        let mut union = population;
        for g in offspring {
            union.push(evaluate_into(g, evaluator, &mut archive)?);
        }

        let scores = score_population(union.iter().map(|i| (&i.genotype, &i.descriptors)), &archive)?;
        for (ind, score) in union.iter_mut().zip(scores) {
            ind.score = Some(score);
        }
        population = select_by_novelty(union, n, rng)?;
        history.push(snapshot(generation, evaluator, &archive));
    }

    Ok(SearchOutcome { archive, history })
}
