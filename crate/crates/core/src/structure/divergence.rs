//! Divergence between two sources sharing one unifilar FSM.

use crate::error::{Error, Result};
use crate::imp::{build_fsm, FsmSource, ImpModel};
use crate::scalar::Real;

/// `D(P || Q) = sum_s P(s) KL(P(.|s) || Q(.|s))` in bits per symbol, with
/// `P(s)` the stationary state distribution of `p`.
///
/// Infinite when `q` gives zero probability to a symbol `p` can emit from a
/// state of positive stationary weight.
pub fn fsm_divergence<T: Real>(p: &FsmSource<T>, q: &FsmSource<T>) -> Result<T> {
    if !p.same_machine(q) {
        return Err(Error::StructureMismatch);
    }
    let pi = p.stationary_distribution()?;
    let mut d = T::zero();
    for (s, &w) in pi.iter().enumerate() {
        if w <= T::zero() {
            continue;
        }
        let mut kl = T::zero();
        for (&a, &b) in p.emissions(s).iter().zip(q.emissions(s)) {
            if a <= T::zero() {
                continue;
            }
            if b <= T::zero() {
                return Ok(T::infinity());
            }
            kl = kl + a * (a / b).log2();
        }
        d = d + w * kl;
    }
    // Rounding can leave tiny negative values.
    Ok(d.max(T::zero()))
}

/// [`fsm_divergence`] between the FSM of `p` and `q`.
pub fn imp_divergence<T: Real>(p: &ImpModel<T>, q: &FsmSource<T>) -> Result<T> {
    fsm_divergence(&build_fsm(p), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_state(probs: Vec<f64>) -> FsmSource<f64> {
        let n = probs.len();
        FsmSource::new(vec![vec![0]], 0, vec![vec![Some(0); n]], vec![probs]).unwrap()
    }

    #[test]
    fn single_letter_kl() {
        let p = one_state(vec![0.5, 0.5]);
        let q = one_state(vec![0.25, 0.75]);
        let expected = 0.5 * (0.5f64 / 0.25).log2() + 0.5 * (0.5f64 / 0.75).log2();
        assert!((fsm_divergence(&p, &q).unwrap() - expected).abs() < 1e-12);
        assert_eq!(fsm_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn zero_support_is_infinite() {
        let p = one_state(vec![0.5, 0.5]);
        let q = one_state(vec![1.0, 0.0]);
        assert!(fsm_divergence(&p, &q).unwrap().is_infinite());
    }

    #[test]
    fn mismatch_rejected() {
        let p = one_state(vec![0.5, 0.5]);
        let q = FsmSource::new(
            vec![vec![0], vec![1]],
            0,
            vec![vec![Some(1), Some(0)], vec![Some(0), Some(1)]],
            vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        )
        .unwrap();
        assert!(matches!(
            fsm_divergence(&p, &q),
            Err(Error::StructureMismatch)
        ));
    }
}
