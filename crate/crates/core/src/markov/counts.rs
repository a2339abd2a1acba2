//! Transition counts and empirical entropy.
//!
//! Two counting paths exist. [`CountTable`] keeps explicit `(context, symbol)`
//! keys and is meant for inspection. [`StreamEntropy`] packs contexts into
//! integer codes and is what the estimator uses in its inner loop.

use std::collections::BTreeMap;

use crate::alphabet::Symbol;
use crate::scalar::{xlog2x, Real};

/// Context → symbol occurrence counts for one sequence at one order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountTable {
    order: usize,
    counts: BTreeMap<(Vec<Symbol>, Symbol), u64>,
    context_totals: BTreeMap<Vec<Symbol>, u64>,
}

impl CountTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn count(&self, context: &[Symbol], symbol: Symbol) -> u64 {
        self.counts
            .get(&(context.to_vec(), symbol))
            .copied()
            .unwrap_or(0)
    }

    pub fn context_total(&self, context: &[Symbol]) -> u64 {
        self.context_totals.get(context).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (&[Symbol], Symbol, u64)> {
        self.counts.iter().map(|((c, a), &n)| (c.as_slice(), *a, n))
    }

    pub fn context_totals(&self) -> impl Iterator<Item = (&[Symbol], u64)> {
        self.context_totals.iter().map(|(c, &n)| (c.as_slice(), n))
    }

    pub fn total_transitions(&self) -> u64 {
        self.context_totals.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `-log2` of the maximum-likelihood probability of the counted transitions.
    pub fn entropy<T: Real>(&self) -> T {
        let mut h = T::zero();
        for ((ctx, _), &c) in &self.counts {
            let total = T::from_count(self.context_totals[ctx]);
            h = h + T::from_count(c) * (total / T::from_count(c)).log2();
        }
        h
    }
}

/// Counts every transition `seq[i-k..i] -> seq[i]` for `i >= k`.
///
/// The first `k` symbols are the fixed initial context and are not counted as
/// emissions; a sequence no longer than `k` yields an empty table.
pub fn count_transitions(seq: &[Symbol], k: usize) -> CountTable {
    let mut table = CountTable {
        order: k,
        ..CountTable::default()
    };
    if seq.len() <= k {
        return table;
    }
    for i in k..seq.len() {
        let ctx = seq[i - k..i].to_vec();
        *table.counts.entry((ctx.clone(), seq[i])).or_insert(0) += 1;
        *table.context_totals.entry(ctx).or_insert(0) += 1;
    }
    table
}

/// Unnormalized `k`th order empirical entropy `-log2 P_ML,k(seq)` in bits.
pub fn empirical_entropy<T: Real>(seq: &[Symbol], k: usize) -> T {
    let (compact, alpha) = compact_symbols(seq);
    StreamEntropy::new(&compact, alpha).entropy(k)
}

/// Maps symbols onto `0..d` in order of their ids, returning `d`.
pub(crate) fn compact_symbols(seq: &[Symbol]) -> (Vec<u32>, usize) {
    let Some(&max) = seq.iter().max() else {
        return (Vec::new(), 0);
    };
    let mut map = vec![u32::MAX; max + 1];
    for &s in seq {
        map[s] = 0;
    }
    let mut next = 0u32;
    for slot in map.iter_mut() {
        if *slot == 0 {
            *slot = next;
            next += 1;
        }
    }
    (seq.iter().map(|&s| map[s]).collect(), next as usize)
}

const DENSE_CELLS: usize = 1 << 16;

/// Largest count table filled densely for a stream of length `n`.
pub(crate) fn dense_limit(n: usize) -> usize {
    DENSE_CELLS.max(2 * n)
}

/// Entropy of a dense table laid out as `context * a + symbol`.
pub(crate) fn dense_table_entropy<T: Real>(counts: &[u64], a: usize) -> T {
    let mut h = T::zero();
    for row in counts.chunks_exact(a) {
        let total: u64 = row.iter().sum();
        if total == 0 {
            continue;
        }
        h = h + xlog2x::<T>(total) - row.iter().map(|&c| xlog2x::<T>(c)).sum::<T>();
    }
    h
}

/// Empirical entropies of one symbol stream at any order.
///
/// Symbols must lie in `0..alphabet_size`.
pub struct StreamEntropy<'a> {
    seq: &'a [u32],
    alphabet_size: usize,
}

impl<'a> StreamEntropy<'a> {
    pub fn new(seq: &'a [u32], alphabet_size: usize) -> Self {
        debug_assert!(seq.iter().all(|&s| (s as usize) < alphabet_size.max(1)));
        Self { seq, alphabet_size }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn entropy<T: Real>(&self, k: usize) -> T {
        let n = self.seq.len();
        let a = self.alphabet_size as u64;
        if n <= k || a <= 1 {
            return T::zero();
        }
        let Some(cells) = a.checked_pow(k as u32 + 1) else {
            let seq: Vec<Symbol> = self.seq.iter().map(|&s| s as Symbol).collect();
            return count_transitions(&seq, k).entropy();
        };
        let modulus = cells / a;
        if (cells as usize) <= dense_limit(n) {
            self.dense_entropy(k, a, modulus, cells as usize)
        } else {
            self.sorted_entropy(k, a, modulus)
        }
    }

    fn codes(&self, k: usize, a: u64, modulus: u64) -> impl Iterator<Item = u64> + '_ {
        let mut ctx = self.seq[..k]
            .iter()
            .fold(0u64, |c, &s| (c * a + s as u64) % modulus.max(1));
        self.seq[k..].iter().map(move |&s| {
            let key = ctx * a + s as u64;
            ctx = if modulus > 1 { key % modulus } else { 0 };
            key
        })
    }

    fn dense_entropy<T: Real>(&self, k: usize, a: u64, modulus: u64, cells: usize) -> T {
        let mut counts = vec![0u64; cells];
        for key in self.codes(k, a, modulus) {
            counts[key as usize] += 1;
        }
        dense_table_entropy(&counts, a as usize)
    }

    fn sorted_entropy<T: Real>(&self, k: usize, a: u64, modulus: u64) -> T {
        let mut keys: Vec<u64> = self.codes(k, a, modulus).collect();
        keys.sort_unstable();
        let mut h = T::zero();
        let mut i = 0;
        while i < keys.len() {
            let ctx = keys[i] / a;
            let mut total = 0u64;
            let mut inner = T::zero();
            while i < keys.len() && keys[i] / a == ctx {
                let key = keys[i];
                let mut c = 0u64;
                while i < keys.len() && keys[i] == key {
                    c += 1;
                    i += 1;
                }
                total += c;
                inner = inner + xlog2x::<T>(c);
            }
            h = h + xlog2x::<T>(total) - inner;
        }
        h
    }
}
