//! Penalized maximum-likelihood Markov order estimation.

use crate::alphabet::Symbol;
use crate::markov::counts::{compact_symbols, StreamEntropy};
use crate::scalar::Real;

/// Hard cap on candidate orders when none is configured.
pub const DEFAULT_ORDER_CAP: usize = 8;

/// `floor(log2(n + 1) / log2(alpha))`, capped at `cap`.
pub fn default_max_order(n: usize, alpha: usize, cap: usize) -> usize {
    if alpha <= 1 {
        return 0;
    }
    // Largest k with alpha^k <= n + 1, computed exactly.
    let mut k = 0;
    let mut power = alpha as u128;
    while k < cap && power <= n as u128 + 1 {
        k += 1;
        power *= alpha as u128;
    }
    k
}

/// Outcome of an order search on one stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderChoice<T> {
    pub order: usize,
    pub entropy_bits: T,
    pub free_parameters: u128,
    pub penalty_bits: T,
}

impl<T: Real> OrderChoice<T> {
    pub fn total_bits(&self) -> T {
        self.entropy_bits + self.penalty_bits
    }
}

/// Minimizes `h_k + beta * alpha^k (alpha - 1) * log_scale` over `k in 0..=k_max`.
///
/// `log_scale` is `log2(n + 1)` for whatever `n` the caller penalizes with.
/// Ties go to the smaller order. Since the penalty grows with `k` and the
/// entropy term is nonnegative, the scan stops once the penalty alone
/// reaches the best total.
pub fn select_order<T: Real>(
    stream: &StreamEntropy<'_>,
    alphabet_size: usize,
    beta: T,
    k_max: usize,
    log_scale: T,
) -> OrderChoice<T> {
    select_order_with(alphabet_size, beta, k_max, log_scale, |k| stream.entropy(k))
}

/// [`select_order`] with the entropy of order `k` supplied by `entropy(k)`.
pub fn select_order_with<T: Real, F: FnMut(usize) -> T>(
    alphabet_size: usize,
    beta: T,
    k_max: usize,
    log_scale: T,
    mut entropy: F,
) -> OrderChoice<T> {
    let mut best: Option<OrderChoice<T>> = None;
    for k in 0..=k_max {
        let params = free_parameters(alphabet_size, k);
        let penalty = beta * T::from_f64_lossy(params as f64) * log_scale;
        if let Some(b) = &best {
            if penalty >= b.total_bits() && k > 0 {
                break;
            }
        }
        let cand = OrderChoice {
            order: k,
            entropy_bits: entropy(k),
            free_parameters: params,
            penalty_bits: penalty,
        };
        if best
            .as_ref()
            .is_none_or(|b| cand.total_bits() < b.total_bits())
        {
            best = Some(cand);
        }
        if alphabet_size <= 1 {
            break;
        }
    }
    best.expect("order 0 is always evaluated")
}

/// `alpha^k (alpha - 1)`, saturating.
pub fn free_parameters(alphabet_size: usize, k: usize) -> u128 {
    let a = alphabet_size as u128;
    if a == 0 {
        return 0;
    }
    a.checked_pow(k as u32)
        .and_then(|p| p.checked_mul(a - 1))
        .unwrap_or(u128::MAX)
}

/// Penalized ML order estimate for a sequence, using its own distinct-symbol
/// count as alphabet size and `log2(|seq| + 1)` as penalty scale.
pub fn estimate_order<T: Real>(seq: &[Symbol], beta: T, k_max: usize) -> usize {
    if seq.is_empty() {
        return 0;
    }
    let (compact, alpha) = compact_symbols(seq);
    let stream = StreamEntropy::new(&compact, alpha);
    let scale = T::from_usize(seq.len() + 1).unwrap().log2();
    select_order(&stream, alpha, beta, k_max, scale).order
}
