//! Stationary distributions of finite irreducible chains.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Chains up to this many states are solved exactly by elimination.
pub const DENSE_STATE_LIMIT: usize = 2048;
pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITERATIONS: usize = 1_000_000;

/// Sparse row-stochastic transition structure: `rows[s]` lists `(next, prob)`.
pub type SparseRows<T> = Vec<Vec<(usize, T)>>;

/// Solves `pi = pi T` with `sum(pi) = 1`.
pub fn stationary<T: Real>(rows: &SparseRows<T>) -> Result<Vec<T>> {
    if rows.is_empty() {
        return Err(Error::NonErgodic("chain has no states".into()));
    }
    if rows.len() <= DENSE_STATE_LIMIT {
        dense_solve(rows)
    } else {
        power_iteration(rows)
    }
}

fn dense_solve<T: Real>(rows: &SparseRows<T>) -> Result<Vec<T>> {
    let n = rows.len();
    // Build (T^t - I) with its last equation replaced by the normalization row.
    let mut a = vec![vec![T::zero(); n + 1]; n];
    for (from, row) in rows.iter().enumerate() {
        for &(to, p) in row {
            a[to][from] = a[to][from] + p;
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = row[i] - T::one();
    }
    for v in a[n - 1].iter_mut() {
        *v = T::one();
    }

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() <= T::epsilon() * T::from_f64_lossy(16.0) {
            return Err(Error::NonErgodic(
                "transition matrix has more than one recurrent class".into(),
            ));
        }
        a.swap(col, pivot);
        let (head, tail) = a.split_at_mut(col + 1);
        let prow = &head[col];
        let inv = T::one() / prow[col];
        for row in tail.iter_mut() {
            let f = row[col] * inv;
            if f != T::zero() {
                for j in col..=n {
                    row[j] = row[j] - f * prow[j];
                }
            }
        }
    }
    let mut pi = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = a[i][n];
        for j in i + 1..n {
            s = s - a[i][j] * pi[j];
        }
        pi[i] = s / a[i][i];
    }
    // Clean rounding noise and renormalize.
    for p in pi.iter_mut() {
        if *p < T::zero() {
            *p = T::zero();
        }
    }
    let total: T = pi.iter().copied().sum();
    Ok(pi.into_iter().map(|p| p / total).collect())
}

fn power_iteration<T: Real>(rows: &SparseRows<T>) -> Result<Vec<T>> {
    let n = rows.len();
    let half = T::from_f64_lossy(0.5);
    let tol = T::from_f64_lossy(POWER_TOLERANCE);
    let mut pi = vec![T::one() / T::from_usize(n).unwrap(); n];
    let mut next = vec![T::zero(); n];
    // Lazy chain (I + T) / 2 shares the stationary law and is aperiodic.
    for _ in 0..POWER_MAX_ITERATIONS {
        for (v, &p) in next.iter_mut().zip(&pi) {
            *v = half * p;
        }
        for (from, row) in rows.iter().enumerate() {
            let mass = half * pi[from];
            for &(to, p) in row {
                next[to] = next[to] + mass * p;
            }
        }
        let diff: T = next.iter().zip(&pi).map(|(a, b)| (*a - *b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if diff <= tol {
            let total: T = pi.iter().copied().sum();
            return Ok(pi.into_iter().map(|p| p / total).collect());
        }
    }
    Err(Error::NonErgodic(format!(
        "power iteration did not converge in {POWER_MAX_ITERATIONS} iterations"
    )))
}

/// `|| pi T - pi ||_1`.
pub fn balance_residual<T: Real>(rows: &SparseRows<T>, pi: &[T]) -> T {
    let mut out = vec![T::zero(); pi.len()];
    for (from, row) in rows.iter().enumerate() {
        for &(to, p) in row {
            out[to] = out[to] + pi[from] * p;
        }
    }
    out.iter().zip(pi).map(|(a, b)| (*a - *b).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(p: f64, q: f64) -> SparseRows<f64> {
        vec![vec![(0, 1.0 - p), (1, p)], vec![(0, q), (1, 1.0 - q)]]
    }

    #[test]
    fn two_state_closed_form() {
        let rows = two_state(0.2, 0.6);
        let pi = stationary(&rows).unwrap();
        assert!((pi[0] - 0.75).abs() < 1e-12);
        assert!((pi[1] - 0.25).abs() < 1e-12);
        assert!(balance_residual(&rows, &pi) <= 1e-10);
    }

    #[test]
    fn power_iteration_matches_dense() {
        let rows = two_state(0.3, 0.1);
        let a = dense_solve(&rows).unwrap();
        let b = power_iteration(&rows).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn periodic_cycle_is_solvable() {
        let rows: SparseRows<f64> = vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![(0, 1.0)]];
        let pi = stationary(&rows).unwrap();
        assert!(pi.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-12));
        let pi = power_iteration(&rows).unwrap();
        assert!(pi.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-9));
    }

    #[test]
    fn two_closed_classes_rejected() {
        let rows: SparseRows<f64> = vec![vec![(0, 1.0)], vec![(1, 1.0)]];
        assert!(matches!(stationary(&rows), Err(Error::NonErgodic(_))));
    }

    #[test]
    fn large_chain_uses_power_iteration() {
        let n = DENSE_STATE_LIMIT + 10;
        let rows: SparseRows<f64> = (0..n).map(|i| vec![((i + 1) % n, 0.5), (i, 0.5)]).collect();
        let pi = stationary(&rows).unwrap();
        let u = 1.0 / n as f64;
        assert!(pi.iter().all(|p| (p - u).abs() < 1e-9));
    }
}
