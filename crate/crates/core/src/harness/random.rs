use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::alphabet::{block_letter, Alphabet};
use crate::error::{Error, Result};
use crate::harness::config::{ExperimentConfig, SwitchKind};
use crate::imp::{ImpModel, Partition};
use crate::markov::MarkovModel;
use crate::rng::{derive_seed, seeded};
use crate::structure::domination_report;

/// Attempts allowed when rejection-sampling a switch.
pub const SWITCH_REJECTION_BUDGET: usize = 100_000;

/// Allowed L-infinity distance of a random switch's stationary law from uniform.
pub const MARGINAL_TOLERANCE: f64 = 0.02;

/// Uniform draw from the flat simplex over `n` outcomes.
pub fn flat_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n)
        .map(|_| loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break -u.ln();
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Symmetric Dirichlet draw with the given concentration. A concentration of
/// one is the flat simplex.
pub fn dirichlet_row<R: Rng + ?Sized>(
    n: usize,
    concentration: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(concentration > 0.0 && concentration.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "concentration {concentration} must be positive"
        )));
    }
    if concentration == 1.0 {
        return Ok(flat_simplex(n, rng));
    }
    let gamma = Gamma::new(concentration, 1.0).map_err(|e| Error::InvalidParams(e.to_string()))?;
    loop {
        // Tiny concentrations can underflow every draw to zero.
        let w: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 && w.iter().all(|&x| x > 0.0) {
            return Ok(w.into_iter().map(|x| x / total).collect());
        }
    }
}

/// All `len`-tuples over `0..alpha` in lexicographic order.
fn all_contexts(alpha: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|c| {
                (0..alpha).map(move |a| {
                    let mut c = c.clone();
                    c.push(a);
                    c
                })
            })
            .collect();
    }
    out
}

/// Full-support chain of order `k` with symmetric Dirichlet rows, started
/// from the all-first-symbol context.
pub fn random_markov<R: Rng + ?Sized>(
    alphabet: Alphabet,
    k: usize,
    concentration: f64,
    rng: &mut R,
) -> Result<MarkovModel<f64>> {
    let alpha = alphabet.len();
    let rows = all_contexts(alpha, k)
        .into_iter()
        .map(|c| Ok((c, dirichlet_row(alpha, concentration, rng)?)))
        .collect::<Result<Vec<_>>>()?;
    MarkovModel::new(alphabet, k, vec![0; k], rows)
}

/// Lowercase letters `a, b, ..., z, aa, ...` for `n` symbols.
pub fn symbol_alphabet(n: usize) -> Result<Alphabet> {
    Alphabet::new((0..n).map(|i| block_letter(i).to_lowercase()))
}

fn random_switch<R: Rng + ?Sized>(
    m: usize,
    kind: SwitchKind,
    concentration: f64,
    rng: &mut R,
) -> Result<MarkovModel<f64>> {
    let labels = Alphabet::lettered(m)?;
    match kind {
        SwitchKind::MemorylessUniform => MarkovModel::memoryless(labels, vec![1.0 / m as f64; m]),
        SwitchKind::RandomOrder1UniformMarginals => {
            let uniform = 1.0 / m as f64;
            for _ in 0..SWITCH_REJECTION_BUDGET {
                let sw = random_markov(labels.clone(), 1, concentration, rng)?;
                let pi = sw.stationary_distribution()?;
                // Order-1 states are the last label, so pi is the label marginal.
                let far = pi.iter().any(|p| (p - uniform).abs() > MARGINAL_TOLERANCE);
                if !far && !domination_report(&sw).has_domination() {
                    return Ok(sw);
                }
            }
            Err(Error::RejectionBudgetExceeded(SWITCH_REJECTION_BUDGET))
        }
    }
}

/// Draws an IMP with contiguous blocks of the configured sizes, component
/// rows from a symmetric Dirichlet and a switch of the configured kind.
pub fn random_imp<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    rng: &mut R,
) -> Result<ImpModel<f64>> {
    let alpha: usize = config.block_sizes.iter().sum();
    let alphabet = symbol_alphabet(alpha)?;
    let tags: Vec<usize> = config
        .block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let partition = Partition::from_assignment(&tags);
    // Every block and the switch get their own stream, so configurations
    // that differ only in the switch or in one component share the rest.
    let model_seed: u64 = rng.random();
    let m = partition.num_blocks();
    let mut components = Vec::with_capacity(m);
    for (b, (block, &k)) in partition
        .blocks()
        .iter()
        .zip(&config.order_vector.component_orders)
        .enumerate()
    {
        let sub = Alphabet::new(block.iter().map(|&s| alphabet.label(s).to_string()))?;
        components.push(random_markov(
            sub,
            k,
            config.component_concentration,
            &mut seeded(derive_seed(model_seed, &[b as u64])),
        )?);
    }
    let switch = random_switch(
        m,
        config.switch_kind,
        config.switch_concentration,
        &mut seeded(derive_seed(model_seed, &[m as u64])),
    )?;
    ImpModel::new(alphabet, partition, components, switch)
}
