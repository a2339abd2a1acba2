//! Set-partition enumeration by restricted growth strings.

use rand::Rng;

/// Number of partitions of an `n`-set into at most `max_blocks` blocks,
/// saturating at `u128::MAX`.
pub fn count_partitions(n: usize, max_blocks: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    // Stirling numbers of the second kind, row by row.
    let kmax = max_blocks.min(n);
    let mut row = vec![0u128; kmax + 1];
    row[0] = 1;
    for i in 1..=n {
        for k in (1..=kmax.min(i)).rev() {
            row[k] = row[k].saturating_mul(k as u128).saturating_add(row[k - 1]);
        }
        row[0] = 0;
    }
    row.iter().fold(0u128, |acc, &x| acc.saturating_add(x))
}

/// Calls `visit` with every restricted growth string of length `n` using at
/// most `max_blocks` distinct values, in lexicographic order.
///
/// A restricted growth string `r` has `r[0] = 0` and `r[i] <= 1 + max(r[..i])`;
/// each one encodes exactly one set partition in canonical block order.
pub fn for_each_rgs<F: FnMut(&[usize])>(n: usize, max_blocks: usize, mut visit: F) {
    if n == 0 {
        visit(&[]);
        return;
    }
    if max_blocks == 0 {
        return;
    }
    let mut rgs = vec![0usize; n];
    // prefix_max[i] = max(rgs[..=i])
    let mut prefix_max = vec![0usize; n];
    loop {
        visit(&rgs);
        // Find the rightmost position that can be incremented.
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            let limit = (prefix_max[i - 1] + 1).min(max_blocks - 1);
            if rgs[i] < limit {
                break;
            }
            i -= 1;
        }
        rgs[i] += 1;
        prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
        for j in i + 1..n {
            rgs[j] = 0;
            prefix_max[j] = prefix_max[i];
        }
    }
}

/// Restricted growth string of a partition of an `n`-set drawn uniformly
/// among all partitions.
///
/// Position `i` opens a new block or joins one of the `j` open blocks with
/// probabilities proportional to the number of completions of each choice,
/// computed in log space.
pub fn random_rgs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    // log_completions[i][j]: ways to finish positions i.. with j blocks open.
    let mut log_completions = vec![vec![0.0f64; n + 2]; n + 1];
    for i in (0..n).rev() {
        for j in 0..=i + 1 {
            let join = if j == 0 {
                f64::NEG_INFINITY
            } else {
                (j as f64).ln() + log_completions[i + 1][j]
            };
            let open = log_completions[i + 1][j + 1];
            let hi = join.max(open);
            log_completions[i][j] = hi + ((join - hi).exp() + (open - hi).exp()).ln();
        }
    }
    let mut rgs = Vec::with_capacity(n);
    let mut open_blocks = 0usize;
    for i in 0..n {
        let p_open =
            (log_completions[i + 1][open_blocks + 1] - log_completions[i][open_blocks]).exp();
        if open_blocks == 0 || rng.random::<f64>() < p_open {
            rgs.push(open_blocks);
            open_blocks += 1;
        } else {
            rgs.push(rng.random_range(0..open_blocks));
        }
    }
    rgs
}
