//! Partitions within a given number of single-symbol moves.

use std::collections::BTreeSet;

use crate::imp::Partition;

/// Every partition reachable from `partition` by reassigning at most `t`
/// distinct symbols, each to another existing block or to a new one.
///
/// Includes `partition` itself. The result is deduplicated and sorted.
pub fn neighborhood(partition: &Partition, t: usize) -> Vec<Partition> {
    let mut out = BTreeSet::new();
    let mut tags = partition.assignment();
    out.insert(partition.clone());
    extend(&mut tags, 0, t, &mut out);
    out.into_iter().collect()
}

fn extend(tags: &mut Vec<usize>, from: usize, moves_left: usize, out: &mut BTreeSet<Partition>) {
    if moves_left == 0 {
        return;
    }
    let fresh = tags.iter().max().map_or(0, |m| m + 1);
    for s in from..tags.len() {
        let original = tags[s];
        for dest in 0..=fresh {
            if dest == original {
                continue;
            }
            tags[s] = dest;
            out.insert(Partition::from_assignment(tags));
            extend(tags, s + 1, moves_left - 1, out);
        }
        tags[s] = original;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_is_identity() {
        let p = Partition::from_assignment(&[0, 1, 0, 2]);
        assert_eq!(neighborhood(&p, 0), vec![p]);
    }

    #[test]
    fn three_symbol_example() {
        let p = Partition::from_assignment(&[0, 0, 1]);
        let n = neighborhood(&p, 1);
        let expected: BTreeSet<Partition> = [
            vec![0, 0, 1],
            vec![0, 1, 0],
            vec![0, 1, 1],
            vec![0, 1, 2],
            vec![0, 0, 0],
        ]
        .iter()
        .map(|t| Partition::from_assignment(t))
        .collect();
        assert_eq!(n.len(), 5);
        assert_eq!(n.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn radius_one_size_bound() {
        for tags in [
            vec![0, 0, 0, 0],
            vec![0, 1, 2, 3, 4],
            vec![0, 1, 0, 2, 1, 3],
        ] {
            let p = Partition::from_assignment(&tags);
            let bound = tags.len() * (p.num_blocks() + 1) + 1;
            assert!(neighborhood(&p, 1).len() <= bound);
        }
    }

    #[test]
    fn large_radius_reaches_everything() {
        // Four symbols, radius four: all 15 partitions.
        assert_eq!(neighborhood(&Partition::whole(4), 4).len(), 15);
    }
}
