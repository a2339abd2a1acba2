//! Alphabet domination on a switch source.
//!
//! Block `a` dominates block `b` when runs of `b` with no intervening `a` are
//! bounded on every positive-probability switch path. On the finite state
//! graph this holds exactly when, after deleting every edge that emits `a`,
//! no cycle contains an edge emitting `b`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::markov::MarkovModel;
use crate::scalar::Real;
use crate::structure::scc::strongly_connected_components;

pub fn dominates<T: Real>(switch: &MarkovModel<T>, a: usize, b: usize) -> Result<bool> {
    let m = switch.alphabet_size();
    for l in [a, b] {
        if l >= m {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    if a == b {
        return Ok(false);
    }
    Ok(dominates_unchecked(switch, a, b))
}

fn dominates_unchecked<T: Real>(switch: &MarkovModel<T>, a: usize, b: usize) -> bool {
    let n = switch.num_states();
    let m = switch.alphabet_size();
    let mut adj = vec![Vec::new(); n];
    for (s, out) in adj.iter_mut().enumerate() {
        for x in 0..m {
            if x != a && switch.prob(s, x) > T::zero() {
                out.push(switch.next_state(s, x).unwrap());
            }
        }
    }
    let comp = strongly_connected_components(&adj);
    // An edge emitting b inside one component lies on a cycle that avoids a.
    !(0..n)
        .any(|s| switch.prob(s, b) > T::zero() && comp[switch.next_state(s, b).unwrap()] == comp[s])
}

/// Domination relation and its derived structure for one switch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationReport {
    pub labels: Vec<String>,
    /// `relation[a][b]` is true when `a` dominates `b`.
    pub relation: Vec<Vec<bool>>,
    pub mutual_pairs: Vec<(usize, usize)>,
    pub totally_dominant: Vec<usize>,
    /// Layers `L0, L1, ...`; `None` when some pair is in mutual domination.
    pub layers: Option<Vec<Vec<usize>>>,
}

impl DominationReport {
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        self.relation[a][b]
    }

    pub fn has_domination(&self) -> bool {
        self.relation.iter().flatten().any(|&d| d)
    }

    pub fn dominating_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.labels.len();
        (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .filter(|&(a, b)| self.relation[a][b])
            .collect()
    }

    /// True when the relation equals its own transitive closure.
    pub fn is_transitive(&self) -> bool {
        let m = self.labels.len();
        (0..m).all(|a| {
            (0..m).all(|b| {
                !self.relation[a][b]
                    || (0..m).all(|c| !self.relation[b][c] || a == c || self.relation[a][c])
            })
        })
    }
}

pub fn domination_report<T: Real>(switch: &MarkovModel<T>) -> DominationReport {
    let m = switch.alphabet_size();
    let relation: Vec<Vec<bool>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| a != b && dominates_unchecked(switch, a, b))
                .collect()
        })
        .collect();
    let mutual_pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .filter(|&(a, b)| relation[a][b] && relation[b][a])
        .collect();
    let totally_dominant: Vec<usize> = (0..m)
        .filter(|&a| m == 1 || (0..m).all(|b| b == a || relation[a][b]))
        .collect();
    let layers = if mutual_pairs.is_empty() {
        layer(&relation)
    } else {
        None
    };
    DominationReport {
        labels: switch.alphabet().labels().to_vec(),
        relation,
        mutual_pairs,
        totally_dominant,
        layers,
    }
}

/// Repeatedly peels off blocks that dominate only blocks already peeled.
fn layer(relation: &[Vec<bool>]) -> Option<Vec<Vec<usize>>> {
    let m = relation.len();
    let mut placed = vec![false; m];
    let mut layers = Vec::new();
    while placed.iter().any(|p| !p) {
        let next: Vec<usize> = (0..m)
            .filter(|&a| !placed[a] && (0..m).all(|b| !relation[a][b] || placed[b]))
            .collect();
        if next.is_empty() {
            return None;
        }
        for &a in &next {
            placed[a] = true;
        }
        layers.push(next);
    }
    Some(layers)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    /// Order-2 switch over {A, B, C} with states AA, AB, BC, CA.
    pub(crate) fn example_switch(mu: f64, rho: f64) -> MarkovModel<f64> {
        let (a, b, c) = (0, 1, 2);
        MarkovModel::new(
            Alphabet::lettered(3).unwrap(),
            2,
            vec![a, a],
            [
                (vec![a, a], vec![1.0 - mu, mu, 0.0]),
                (vec![a, b], vec![0.0, 0.0, 1.0]),
                (vec![b, c], vec![1.0, 0.0, 0.0]),
                (vec![c, a], vec![rho, 1.0 - rho, 0.0]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn example_relations() {
        for (mu, rho) in [(0.5, 0.5), (0.2, 0.9), (0.99, 0.01)] {
            let sw = example_switch(mu, rho);
            assert!(dominates(&sw, 0, 1).unwrap());
            assert!(dominates(&sw, 0, 2).unwrap());
            assert!(dominates(&sw, 1, 2).unwrap());
            assert!(dominates(&sw, 2, 1).unwrap());
            assert!(!dominates(&sw, 1, 0).unwrap());
            assert!(!dominates(&sw, 2, 0).unwrap());
            let r = domination_report(&sw);
            assert_eq!(r.totally_dominant, vec![0]);
            assert_eq!(r.mutual_pairs, vec![(1, 2)]);
            assert!(r.layers.is_none());
            assert!(r.is_transitive());
        }
    }

    #[test]
    fn example_all_mutual_when_mu_is_one() {
        let r = domination_report(&example_switch(1.0, 0.5));
        assert_eq!(r.mutual_pairs, vec![(0, 1), (0, 2), (1, 2)]);
        assert!(r.layers.is_none());
        assert!(r.is_transitive());
    }

    #[test]
    fn memoryless_switch_has_no_domination() {
        let sw =
            MarkovModel::memoryless(Alphabet::lettered(3).unwrap(), vec![0.2, 0.3, 0.5]).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert!(!dominates(&sw, a, b).unwrap());
            }
        }
        let r = domination_report(&sw);
        assert!(r.totally_dominant.is_empty());
        assert_eq!(r.layers, Some(vec![vec![0, 1, 2]]));
    }

    #[test]
    fn strict_order_yields_layers() {
        // Order-1 switch where B is always followed by A: A dominates B only.
        let sw = MarkovModel::new(
            Alphabet::lettered(3).unwrap(),
            1,
            vec![0],
            [
                (vec![0], vec![0.2, 0.4, 0.4]),
                (vec![1], vec![1.0, 0.0, 0.0]),
                (vec![2], vec![0.3, 0.3, 0.4]),
            ],
        )
        .unwrap();
        let r = domination_report(&sw);
        assert_eq!(r.dominating_pairs(), vec![(0, 1)]);
        assert_eq!(r.layers, Some(vec![vec![1, 2], vec![0]]));
        assert!(r.totally_dominant.is_empty());
    }

    #[test]
    fn unknown_label() {
        let sw = example_switch(0.5, 0.5);
        assert!(matches!(dominates(&sw, 0, 3), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn single_block_is_totally_dominant() {
        let sw = MarkovModel::memoryless(Alphabet::lettered(1).unwrap(), vec![1.0]).unwrap();
        let r = domination_report(&sw);
        assert_eq!(r.totally_dominant, vec![0]);
        assert_eq!(r.layers, Some(vec![vec![0]]));
    }
}
