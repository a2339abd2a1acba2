use crate::alphabet::Symbol;
use crate::imp::Partition;

/// Pairwise-dependence clustering for order-one components under a
/// memoryless switch.
///
/// Symbols `a` and `b` are joined when the frequency of the adjacent pair
/// `ab` or `ba` differs from the product of the single-symbol frequencies
/// by more than `scale * sqrt(ln(n + 1) / n)`. Blocks are the connected
/// components of that relation.
pub fn baseline_deinterleave(seq: &[Symbol], alphabet_size: usize, scale: f64) -> Partition {
    let n = seq.len();
    let mut parent: Vec<usize> = (0..alphabet_size).collect();
    if n >= 2 {
        let mut single = vec![0u64; alphabet_size];
        for &s in seq {
            single[s] += 1;
        }
        let mut pairs = vec![0u64; alphabet_size * alphabet_size];
        for w in seq.windows(2) {
            pairs[w[0] * alphabet_size + w[1]] += 1;
        }
        let p1: Vec<f64> = single.iter().map(|&c| c as f64 / n as f64).collect();
        let transitions = (n - 1) as f64;
        let tau = scale * (((n + 1) as f64).ln() / n as f64).sqrt();
        let dependent = |a: usize, b: usize| {
            let joint = pairs[a * alphabet_size + b] as f64 / transitions;
            (joint - p1[a] * p1[b]).abs() > tau
        };
        for a in 0..alphabet_size {
            for b in a + 1..alphabet_size {
                if dependent(a, b) || dependent(b, a) {
                    union(&mut parent, a, b);
                }
            }
        }
    }
    let tags: Vec<usize> = (0..alphabet_size).map(|s| find(&mut parent, s)).collect();
    Partition::from_assignment(&tags)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_single_block() {
        assert_eq!(baseline_deinterleave(&[0; 50], 1, 1.0), Partition::whole(1));
    }

    #[test]
    fn strongly_dependent_pair_grouped() {
        // a always followed by b, c and d random-ish filler.
        let mut seq = Vec::new();
        for i in 0..5000 {
            seq.extend([0, 1]);
            seq.push(2 + (i * 7 % 5 == 0) as usize);
        }
        let p = baseline_deinterleave(&seq, 4, 1.0);
        assert_eq!(p.block_of(0), p.block_of(1));
    }
}
