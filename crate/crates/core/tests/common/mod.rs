//! Builders shared by the integration tests.
#![allow(dead_code)]

use imp_core::harness::{dirichlet_row, random_markov};
use imp_core::imp::{ImpModel, Partition};
use imp_core::markov::MarkovModel;
use imp_core::rng::{derive_seed, seeded, SimRng};
use imp_core::{Alphabet, Symbol};
use rand::Rng;

pub fn rng(seed: u64) -> SimRng {
    seeded(seed)
}

/// Random full-support IMP with one block per entry of `sizes`.
///
/// Block `b` covers consecutive symbols; components and switch have the
/// given orders. `concentration` shapes every row.
pub fn random_imp_model(
    seed: u64,
    sizes: &[usize],
    orders: &[usize],
    switch_order: usize,
    concentration: f64,
) -> ImpModel<f64> {
    let alpha: usize = sizes.iter().sum();
    let alphabet = Alphabet::numbered(alpha).unwrap();
    let tags: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &n)| std::iter::repeat_n(b, n))
        .collect();
    let partition = Partition::from_assignment(&tags);
    let components = partition
        .blocks()
        .iter()
        .zip(orders)
        .enumerate()
        .map(|(b, (block, &k))| {
            let sub = Alphabet::new(block.iter().map(|&s| alphabet.label(s).to_string())).unwrap();
            random_markov(
                sub,
                k,
                concentration,
                &mut rng(derive_seed(seed, &[b as u64])),
            )
            .unwrap()
        })
        .collect();
    let switch = random_markov(
        Alphabet::lettered(sizes.len()).unwrap(),
        switch_order,
        concentration,
        &mut rng(derive_seed(seed, &[99])),
    )
    .unwrap();
    ImpModel::new(alphabet, partition, components, switch).unwrap()
}

/// Random IMP with a random block structure over `alpha` symbols, at most
/// four blocks and orders up to two.
pub fn arbitrary_imp(seed: u64, alpha: usize) -> ImpModel<f64> {
    let mut r = rng(seed);
    let m = r.random_range(1..=alpha.min(4));
    let mut sizes = vec![1; m];
    for _ in m..alpha {
        sizes[r.random_range(0..m)] += 1;
    }
    let orders: Vec<usize> = (0..m).map(|_| r.random_range(0..=2)).collect();
    let ksw = if m == 1 { 0 } else { r.random_range(0..=2) };
    random_imp_model(r.random(), &sizes, &orders, ksw, 1.0)
}

/// Memoryless chain with random probabilities.
pub fn random_memoryless(alphabet: Alphabet, r: &mut SimRng) -> MarkovModel<f64> {
    let probs = dirichlet_row(alphabet.len(), 1.0, r).unwrap();
    MarkovModel::memoryless(alphabet, probs).unwrap()
}

pub fn uniform_sequence(n: usize, alpha: usize, r: &mut SimRng) -> Vec<Symbol> {
    (0..n).map(|_| r.random_range(0..alpha)).collect()
}

/// Every sequence of length `n` over `alpha` symbols.
pub fn all_sequences(alpha: usize, n: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..alpha).map(move |a| {
                    let mut t = s.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a == b) || (a - b).abs() <= tol
}

/// Walks the switch and every component side by side, multiplying the
/// conditional probabilities of each emitted symbol.
pub fn oracle_log_prob(imp: &ImpModel<f64>, seq: &[Symbol]) -> f64 {
    let p = imp.partition();
    let mut labels: Vec<usize> = Vec::new();
    let mut histories: Vec<Vec<usize>> = vec![Vec::new(); p.num_blocks()];
    let mut bits = 0.0;
    let context = |m: &MarkovModel<f64>, h: &[usize]| {
        let k = m.order();
        if h.len() >= k {
            h[h.len() - k..].to_vec()
        } else {
            let init = m.context(m.initial_state());
            let mut c = init[h.len()..].to_vec();
            c.extend_from_slice(h);
            c
        }
    };
    for &s in seq {
        let b = p.block_of(s).unwrap();
        let j = p.block(b).iter().position(|&x| x == s).unwrap();
        let sw = imp.switch();
        let c = imp.component(b);
        let q = sw.prob(sw.state_of(&context(sw, &labels)).unwrap(), b)
            * c.prob(c.state_of(&context(c, &histories[b])).unwrap(), j);
        if q == 0.0 {
            return f64::NEG_INFINITY;
        }
        bits += q.log2();
        labels.push(b);
        histories[b].push(j);
    }
    bits
}

pub fn agree(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        close(a, b, 1e-9 * (1.0 + a.abs()))
    }
}

/// IMP over {0,1,2,3} whose first component never repeats symbol 0, so
/// many sequences have probability zero.
pub fn sparse_imp(seed: u64) -> ImpModel<f64> {
    let mut r = rng(seed);
    let alphabet = Alphabet::numbered(4).unwrap();
    let p = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
    let q: f64 = r.random_range(0.1..0.9);
    let c0 = MarkovModel::new(
        Alphabet::new(["0", "1"]).unwrap(),
        1,
        vec![0],
        [(vec![0], vec![0.0, 1.0]), (vec![1], vec![q, 1.0 - q])],
    )
    .unwrap();
    let c1 = MarkovModel::memoryless(Alphabet::new(["2", "3"]).unwrap(), vec![0.3, 0.7]).unwrap();
    let sw = MarkovModel::new(
        Alphabet::lettered(2).unwrap(),
        1,
        vec![0],
        [(vec![0], vec![0.4, 0.6]), (vec![1], vec![0.8, 0.2])],
    )
    .unwrap();
    ImpModel::new(alphabet, p, vec![c0, c1], sw).unwrap()
}

/// Model whose first block is memoryless with 2 to 4 symbols, plus one or
/// two more blocks of random order.
pub fn splittable(r: &mut SimRng) -> ImpModel<f64> {
    let mut sizes = vec![r.random_range(2..=4)];
    let mut orders = vec![0];
    for _ in 0..r.random_range(1..=2) {
        sizes.push(r.random_range(1..=3));
        orders.push(r.random_range(0..=1));
    }
    random_imp_model(r.random(), &sizes, &orders, r.random_range(0..=2), 1.0)
}

/// Random split of `block` into at least two nonempty parts.
pub fn random_parts(block: &[Symbol], r: &mut SimRng) -> Vec<Vec<Symbol>> {
    loop {
        let k = r.random_range(2..=block.len());
        let mut parts = vec![Vec::new(); k];
        for &s in block {
            parts[r.random_range(0..k)].push(s);
        }
        if parts.iter().all(|p| !p.is_empty()) {
            return parts;
        }
    }
}

/// True when both models give the same log-probability to 200 random
/// sequences, half of them sampled from `a`.
pub fn same_distribution(a: &ImpModel<f64>, b: &ImpModel<f64>, r: &mut SimRng) -> bool {
    let alpha = a.alphabet().len();
    (0..200).all(|i| {
        let n = r.random_range(0..60);
        let seq = if i % 2 == 0 {
            a.sample(n, r)
        } else {
            uniform_sequence(n, alpha, r)
        };
        agree(a.log_prob_product(&seq), b.log_prob_product(&seq))
    })
}

/// Order-2 switch over {A, B, C} with states AA, AB, BC, CA.
pub fn example_switch(mu: f64, rho: f64) -> MarkovModel<f64> {
    MarkovModel::new(
        Alphabet::lettered(3).unwrap(),
        2,
        vec![0, 0],
        [
            (vec![0, 0], vec![1.0 - mu, mu, 0.0]),
            (vec![0, 1], vec![0.0, 0.0, 1.0]),
            (vec![1, 2], vec![1.0, 0.0, 0.0]),
            (vec![2, 0], vec![rho, 1.0 - rho, 0.0]),
        ],
    )
    .unwrap()
}
