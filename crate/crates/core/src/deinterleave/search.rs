//! Exhaustive and randomized local-search minimization of the cost.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::Symbol;
use crate::combinatorics::{count_partitions, for_each_rgs, random_rgs};
use crate::deinterleave::cost::{Estimate, Evaluator};
use crate::deinterleave::neighborhood::neighborhood;
use crate::error::{Error, Result};
use crate::imp::Partition;
use crate::rng::{derive_seed, seeded};
use crate::scalar::Real;

/// Largest number of partitions the exhaustive search will enumerate.
pub const EXHAUSTIVE_BUDGET: u128 = 10_000_000;

/// Default order cap for the search.
pub const DEFAULT_K_CAP: usize = 3;

/// Parameters of the randomized local search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchParams {
    /// Independent runs from random starting partitions.
    pub restarts: usize,
    /// Consecutive unsuccessful perturbations that end a run.
    pub patience: usize,
    /// Neighborhood radius of the descent steps.
    pub descent_radius: usize,
    /// Neighborhood radius of the perturbations.
    pub perturb_radius: usize,
    pub seed: u64,
    pub k_cap: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            restarts: 5,
            patience: 15,
            descent_radius: 1,
            perturb_radius: 2,
            seed: 0,
            k_cap: DEFAULT_K_CAP,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.patience == 0 {
            return Err(Error::InvalidParams(
                "restarts and patience must be positive".into(),
            ));
        }
        if self.descent_radius == 0 || self.perturb_radius <= self.descent_radius {
            return Err(Error::InvalidParams(format!(
                "need perturb radius > descent radius >= 1, got r={} t={}",
                self.perturb_radius, self.descent_radius
            )));
        }
        Ok(())
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if beta.is_finite() && beta >= T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "beta must be finite and nonnegative, got {beta}"
        )))
    }
}

fn check_symbols(seq: &[Symbol], alphabet_size: usize) -> Result<()> {
    match seq.iter().find(|&&s| s >= alphabet_size) {
        Some(s) => Err(Error::UnknownSymbol(s.to_string())),
        None => Ok(()),
    }
}

/// Minimum-cost partition over all partitions with at most `max_blocks`
/// blocks, each at its best orders.
pub fn deinterleave_exhaustive<T: Real>(
    seq: &[Symbol],
    alphabet_size: usize,
    beta: T,
    max_blocks: usize,
    k_cap: usize,
) -> Result<Estimate<T>> {
    deinterleave_exhaustive_with_budget(
        seq,
        alphabet_size,
        beta,
        max_blocks,
        k_cap,
        EXHAUSTIVE_BUDGET,
    )
}

/// [`deinterleave_exhaustive`] with an explicit partition budget.
pub fn deinterleave_exhaustive_with_budget<T: Real>(
    seq: &[Symbol],
    alphabet_size: usize,
    beta: T,
    max_blocks: usize,
    k_cap: usize,
    budget: u128,
) -> Result<Estimate<T>> {
    check_beta(beta)?;
    check_symbols(seq, alphabet_size)?;
    if alphabet_size == 0 || max_blocks == 0 {
        return Err(Error::InvalidParams(
            "need a nonempty alphabet and max_blocks >= 1".into(),
        ));
    }
    let count = count_partitions(alphabet_size, max_blocks);
    if count > budget {
        return Err(Error::SearchSpaceTooLarge { count, budget });
    }
    let mut eval = Evaluator::new(seq, alphabet_size, beta, k_cap);
    let mut best: Option<Estimate<T>> = None;
    for_each_rgs(alphabet_size, max_blocks, |rgs| {
        let cand = eval.evaluate_uncached(&Partition::from_assignment(rgs));
        if best.as_ref().is_none_or(|b| cand.better_than(b)) {
            best = Some(cand);
        }
    });
    Ok(best.expect("at least one partition"))
}

/// Outcome of the local search with some bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T> {
    pub best: Estimate<T>,
    /// Best estimate of each run.
    pub run_bests: Vec<Estimate<T>>,
    /// Distinct partitions whose cost was computed.
    pub evaluations: usize,
}

/// Randomized local search over partitions.
///
/// Each of `restarts` runs starts from a uniformly random set partition,
/// descends to a local minimum over radius-`t` neighborhoods, and then
/// repeatedly jumps to a uniform
/// member of the radius-`r` neighborhood of its best partition and descends
/// again, stopping after `patience` consecutive jumps that do not improve
/// the run's best. Each run has its own random stream derived from the
/// seed and the run index.
pub fn deinterleave_heuristic<T: Real>(
    seq: &[Symbol],
    alphabet_size: usize,
    beta: T,
    params: &SearchParams,
) -> Result<Estimate<T>> {
    Ok(heuristic_search(seq, alphabet_size, beta, params)?.best)
}

/// [`deinterleave_heuristic`] returning per-run results as well.
pub fn heuristic_search<T: Real>(
    seq: &[Symbol],
    alphabet_size: usize,
    beta: T,
    params: &SearchParams,
) -> Result<SearchOutcome<T>> {
    params.validate()?;
    check_beta(beta)?;
    check_symbols(seq, alphabet_size)?;
    if alphabet_size == 0 {
        return Err(Error::InvalidParams("empty alphabet".into()));
    }
    let mut eval = Evaluator::new(seq, alphabet_size, beta, params.k_cap);
    let mut run_bests = Vec::with_capacity(params.restarts);
    for run in 0..params.restarts {
        let mut rng = seeded(derive_seed(params.seed, &[run as u64]));
        let tags = random_rgs(alphabet_size, &mut rng);
        let start = eval.evaluate(&Partition::from_assignment(&tags));
        let mut best = descend(&mut eval, start, params.descent_radius);
        let mut stale = 0;
        while stale < params.patience {
            let jumps: Vec<Partition> = neighborhood(&best.partition, params.perturb_radius)
                .into_iter()
                .filter(|p| *p != best.partition)
                .collect();
            if jumps.is_empty() {
                break;
            }
            let jump = &jumps[rng.random_range(0..jumps.len())];
            let start = eval.evaluate(jump);
            let local = descend(&mut eval, start, params.descent_radius);
            if local.better_than(&best) {
                best = local;
                stale = 0;
            } else {
                stale += 1;
            }
        }
        run_bests.push(best);
    }
    let best = run_bests
        .iter()
        .min_by(|a, b| a.rank(b))
        .expect("at least one run")
        .clone();
    Ok(SearchOutcome {
        best,
        run_bests,
        evaluations: eval.evaluations(),
    })
}

/// Moves to the best neighbor while that improves the estimate.
fn descend<T: Real>(
    eval: &mut Evaluator<'_, T>,
    mut current: Estimate<T>,
    t: usize,
) -> Estimate<T> {
    loop {
        let mut best: Option<Estimate<T>> = None;
        for p in neighborhood(&current.partition, t) {
            if p == current.partition {
                continue;
            }
            let cand = eval.evaluate(&p);
            if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                best = Some(cand);
            }
        }
        match best {
            Some(b) if b.better_than(&current) => current = b,
            _ => return current,
        }
    }
}
