//! Penalized maximum-likelihood cost of a partition and order vector.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;

use crate::alphabet::Symbol;
use crate::error::Result;
use crate::imp::{imp_params_from_sizes, OrderVector, Partition};
use crate::markov::{
    default_max_order, dense_limit, dense_table_entropy, free_parameters, select_order,
    select_order_with, OrderChoice, StreamEntropy,
};
use crate::scalar::Real;

/// Grid on which total costs are compared, so that ties survive rounding.
pub const COST_RESOLUTION: f64 = 1e-8;

/// Cost of one (partition, order vector) hypothesis in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostBreakdown<T> {
    pub entropy_bits: T,
    pub kappa: u128,
    pub beta: T,
    pub penalty_bits: T,
    pub total_bits: T,
    pub orders: OrderVector,
}

impl<T: Real> CostBreakdown<T> {
    fn from_terms(terms: &[OrderChoice<T>], beta: T, log_scale: T) -> Self {
        let entropy_bits = terms.iter().map(|t| t.entropy_bits).sum::<T>();
        let kappa = terms
            .iter()
            .map(|t| t.free_parameters)
            .fold(0u128, u128::saturating_add);
        let penalty_bits = beta * T::from_f64_lossy(kappa as f64) * log_scale;
        let (last, comps) = terms.split_last().expect("switch term present");
        Self {
            entropy_bits,
            kappa,
            beta,
            penalty_bits,
            total_bits: entropy_bits + penalty_bits,
            orders: OrderVector::new(comps.iter().map(|t| t.order).collect(), last.order),
        }
    }

    /// Total cost on the comparison grid.
    pub fn quantized(&self) -> i64 {
        (self.total_bits.as_f64() / COST_RESOLUTION).round() as i64
    }
}

/// A partition with its optimal orders and cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<T> {
    pub partition: Partition,
    pub cost: CostBreakdown<T>,
}

impl<T: Real> Estimate<T> {
    pub fn orders(&self) -> &OrderVector {
        &self.cost.orders
    }

    /// Order used for every comparison: cost on the grid, then fewer blocks,
    /// then the partition, then the order vector, both lexicographically.
    pub fn rank(&self, other: &Self) -> Ordering {
        self.cost
            .quantized()
            .cmp(&other.cost.quantized())
            .then(
                self.partition
                    .num_blocks()
                    .cmp(&other.partition.num_blocks()),
            )
            .then_with(|| self.partition.cmp(&other.partition))
            .then_with(|| self.cost.orders.cmp(&other.cost.orders))
    }

    pub fn better_than(&self, other: &Self) -> bool {
        self.rank(other) == Ordering::Less
    }
}

fn log_scale<T: Real>(n: usize) -> T {
    T::from_usize(n + 1).expect("length fits").log2()
}

/// Local symbol index of every global symbol within `block`.
fn local_index(alphabet_size: usize, block: &[Symbol]) -> Vec<u32> {
    let mut local = vec![u32::MAX; alphabet_size];
    for (j, &s) in block.iter().enumerate() {
        local[s] = j as u32;
    }
    local
}

fn project_local(seq: &[Symbol], local: &[u32]) -> Vec<u32> {
    seq.iter()
        .filter_map(|&s| {
            let l = local[s];
            (l != u32::MAX).then_some(l)
        })
        .collect()
}

fn fixed_term<T: Real>(stream: &[u32], alpha: usize, k: usize) -> OrderChoice<T> {
    let entropy_bits = StreamEntropy::new(stream, alpha).entropy(k);
    OrderChoice {
        order: k,
        entropy_bits,
        free_parameters: free_parameters(alpha, k),
        penalty_bits: T::zero(),
    }
}

fn best_term<T: Real>(
    stream: &[u32],
    alpha: usize,
    beta: T,
    k_cap: usize,
    scale: T,
) -> OrderChoice<T> {
    if alpha <= 1 {
        return OrderChoice {
            order: 0,
            entropy_bits: T::zero(),
            free_parameters: 0,
            penalty_bits: T::zero(),
        };
    }
    let k_max = default_max_order(stream.len(), alpha, k_cap);
    select_order(
        &StreamEntropy::new(stream, alpha),
        alpha,
        beta,
        k_max,
        scale,
    )
}

/// Distinct `(k + 1)`-grams of a symbol sequence with their counts, taken
/// at every position `i >= k`. The switch sequence of any partition maps
/// these grams onto label grams, so its count tables can be filled without
/// rescanning the sequence.
struct Grams {
    width: usize,
    symbols: Vec<u32>,
    counts: Vec<u64>,
}

impl Grams {
    fn new(seq: &[Symbol], alphabet_size: usize, k: usize) -> Option<Self> {
        let a = alphabet_size as u64;
        let modulus = a.checked_pow(k as u32 + 1)? / a.max(1);
        let mut codes: Vec<u64> = Vec::with_capacity(seq.len().saturating_sub(k));
        if seq.len() > k {
            let mut ctx = seq[..k]
                .iter()
                .fold(0u64, |c, &s| (c * a + s as u64) % modulus.max(1));
            for &s in &seq[k..] {
                let key = ctx * a + s as u64;
                ctx = if modulus > 1 { key % modulus } else { 0 };
                codes.push(key);
            }
        }
        codes.sort_unstable();
        let mut symbols = Vec::new();
        let mut counts = Vec::new();
        let mut digits = vec![0u32; k + 1];
        for run in codes.chunk_by(|x, y| x == y) {
            let mut code = run[0];
            for d in digits.iter_mut().rev() {
                *d = (code % a) as u32;
                code /= a;
            }
            symbols.extend_from_slice(&digits);
            counts.push(run.len() as u64);
        }
        Some(Self {
            width: k + 1,
            symbols,
            counts,
        })
    }

    /// Entropy of the label stream under `tags`, when its table is dense.
    fn switch_entropy<T: Real>(&self, tags: &[usize], m: usize, n: usize) -> Option<T> {
        let cells = (m as u64).checked_pow(self.width as u32)? as usize;
        if cells > dense_limit(n) {
            return None;
        }
        let mut table = vec![0u64; cells];
        for (gram, &c) in self.symbols.chunks_exact(self.width).zip(&self.counts) {
            let code = gram
                .iter()
                .fold(0usize, |acc, &s| acc * m + tags[s as usize]);
            table[code] += c;
        }
        Some(dense_table_entropy(&table, m))
    }
}

fn switch_labels(seq: &[Symbol], partition: &Partition) -> Vec<u32> {
    let tags = partition.assignment();
    seq.iter().map(|&s| tags[s] as u32).collect()
}

/// Penalized cost of `seq` under `partition` with the given orders.
///
/// Sums the empirical entropies of every projection and of the switch
/// sequence and adds `beta * kappa_I * log2(n + 1)` with `n = |seq|`.
pub fn cost<T: Real>(
    seq: &[Symbol],
    partition: &Partition,
    orders: &OrderVector,
    beta: T,
) -> Result<CostBreakdown<T>> {
    orders.check_aligned(partition)?;
    let alpha = partition.alphabet_size();
    let mut terms: Vec<OrderChoice<T>> = partition
        .blocks()
        .iter()
        .zip(&orders.component_orders)
        .map(|(b, &k)| fixed_term(&project_local(seq, &local_index(alpha, b)), b.len(), k))
        .collect();
    terms.push(fixed_term(
        &switch_labels(seq, partition),
        partition.num_blocks(),
        orders.switch_order,
    ));
    let scale = log_scale(seq.len());
    let out = CostBreakdown::from_terms(&terms, beta, scale);
    debug_assert_eq!(
        out.kappa,
        imp_params_from_sizes(&partition.block_sizes(), orders)
    );
    Ok(out)
}

/// Per-stream penalized order selection for a fixed partition.
///
/// Each projection and the switch sequence gets its own order, penalized
/// by its share of `kappa_I` at `log2(n + 1)` with `n = |seq|`. Orders are
/// searched up to `min(k_cap, floor(log_alpha(len + 1)))` for a stream of
/// length `len` over `alpha` symbols.
pub fn best_orders<T: Real>(
    seq: &[Symbol],
    partition: &Partition,
    beta: T,
    k_cap: usize,
) -> OrderVector {
    partition_cost(seq, partition, beta, k_cap).orders
}

/// Cost of `partition` at the orders chosen by [`best_orders`].
pub fn partition_cost<T: Real>(
    seq: &[Symbol],
    partition: &Partition,
    beta: T,
    k_cap: usize,
) -> CostBreakdown<T> {
    Evaluator::new(seq, partition.alphabet_size(), beta, k_cap)
        .evaluate_uncached(partition)
        .cost
}

/// Cost evaluation with memoized stream terms.
///
/// Component terms are cached by block and whole-partition results by
/// partition, so evaluating a partition that differs from an already seen
/// one by a single moved symbol only recounts the two changed projections
/// and the switch sequence.
pub struct Evaluator<'a, T> {
    seq: &'a [Symbol],
    alphabet_size: usize,
    beta: T,
    k_cap: usize,
    scale: T,
    grams: Vec<Option<Grams>>,
    components: HashMap<Vec<Symbol>, OrderChoice<T>>,
    partitions: HashMap<Partition, CostBreakdown<T>>,
    evaluations: usize,
}

impl<'a, T: Real> Evaluator<'a, T> {
    pub fn new(seq: &'a [Symbol], alphabet_size: usize, beta: T, k_cap: usize) -> Self {
        Self {
            seq,
            alphabet_size,
            beta,
            k_cap,
            scale: log_scale(seq.len()),
            // No switch over two or more labels can use a higher order.
            grams: (0..=default_max_order(seq.len(), 2, k_cap))
                .map(|k| Grams::new(seq, alphabet_size, k))
                .collect(),
            components: HashMap::new(),
            partitions: HashMap::new(),
            evaluations: 0,
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Number of switch-sequence evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn component(&mut self, block: &[Symbol]) -> OrderChoice<T> {
        if let Some(t) = self.components.get(block) {
            return *t;
        }
        let stream = project_local(self.seq, &local_index(self.alphabet_size, block));
        let t = best_term(&stream, block.len(), self.beta, self.k_cap, self.scale);
        self.components.insert(block.to_vec(), t);
        t
    }

    fn switch_term(&self, partition: &Partition) -> OrderChoice<T> {
        let m = partition.num_blocks();
        let n = self.seq.len();
        if m <= 1 {
            return best_term(&[], m, self.beta, self.k_cap, self.scale);
        }
        let tags = partition.assignment();
        let mut labels: Option<Vec<u32>> = None;
        let k_max = default_max_order(n, m, self.k_cap);
        select_order_with(m, self.beta, k_max, self.scale, |k| {
            let fast = self
                .grams
                .get(k)
                .and_then(Option::as_ref)
                .and_then(|g| g.switch_entropy(&tags, m, n));
            fast.unwrap_or_else(|| {
                let labels = labels.get_or_insert_with(|| switch_labels(self.seq, partition));
                StreamEntropy::new(labels, m).entropy(k)
            })
        })
    }

    fn compute(&mut self, partition: &Partition) -> CostBreakdown<T> {
        debug_assert_eq!(partition.alphabet_size(), self.alphabet_size);
        let mut terms: Vec<OrderChoice<T>> = partition
            .blocks()
            .iter()
            .map(|b| self.component(b))
            .collect();
        terms.push(self.switch_term(partition));
        self.evaluations += 1;
        CostBreakdown::from_terms(&terms, self.beta, self.scale)
    }

    /// Optimal orders and cost of `partition`, memoized.
    pub fn evaluate(&mut self, partition: &Partition) -> Estimate<T> {
        let cost = match self.partitions.get(partition) {
            Some(c) => c.clone(),
            None => {
                let c = self.compute(partition);
                self.partitions.insert(partition.clone(), c.clone());
                c
            }
        };
        Estimate {
            partition: partition.clone(),
            cost,
        }
    }

    /// As [`Evaluator::evaluate`] without storing the partition result, for
    /// scans that never revisit a partition.
    pub fn evaluate_uncached(&mut self, partition: &Partition) -> Estimate<T> {
        Estimate {
            partition: partition.clone(),
            cost: self.compute(partition),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_symbol_examples() {
        let seq = [0, 1];
        let whole = cost::<f64>(
            &seq,
            &Partition::whole(2),
            &OrderVector::new(vec![0], 0),
            0.5,
        )
        .unwrap();
        assert!((whole.entropy_bits - 2.0).abs() < 1e-12);
        assert_eq!(whole.kappa, 1);
        assert!((whole.total_bits - (2.0 + 0.5 * 3f64.log2())).abs() < 1e-12);
        assert!((whole.total_bits - 2.7925).abs() < 1e-4);

        let split = cost::<f64>(
            &seq,
            &Partition::singletons(2),
            &OrderVector::new(vec![0, 0], 0),
            0.5,
        )
        .unwrap();
        assert!((split.entropy_bits - 2.0).abs() < 1e-12);
        assert_eq!(split.kappa, 1);
        assert_eq!(split.quantized(), whole.quantized());

        let free = cost::<f64>(
            &seq,
            &Partition::whole(2),
            &OrderVector::new(vec![0], 0),
            0.0,
        )
        .unwrap();
        assert_eq!(free.total_bits, free.entropy_bits);
    }

    #[test]
    fn singletons_get_order_zero() {
        let seq: Vec<Symbol> = (0..500).map(|i| (i * 7 + i / 3) % 4).collect();
        let c = best_orders::<f64>(&seq, &Partition::singletons(4), 0.5, 3);
        assert_eq!(c.component_orders, vec![0; 4]);
        let one = best_orders::<f64>(&[2], &Partition::whole(3), 0.5, 3);
        assert_eq!(one, OrderVector::new(vec![0], 0));
    }

    #[test]
    fn evaluator_matches_scratch() {
        let seq: Vec<Symbol> = (0..2000).map(|i| (i * i + 3 * i) % 5).collect();
        let mut eval = Evaluator::<f64>::new(&seq, 5, 0.5, 3);
        for tags in [
            [0, 0, 1, 1, 2],
            [0, 1, 1, 1, 2],
            [0, 0, 0, 0, 0],
            [0, 1, 2, 3, 4],
        ] {
            let p = Partition::from_assignment(&tags);
            let a = eval.evaluate(&p);
            let b = eval.evaluate(&p);
            assert_eq!(a, b);
            let scratch = cost::<f64>(&seq, &p, &a.cost.orders, 0.5).unwrap();
            assert!((scratch.total_bits - a.cost.total_bits).abs() < 1e-9);
        }
    }
}
