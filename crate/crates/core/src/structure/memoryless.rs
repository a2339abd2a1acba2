//! Splitting and merging memoryless components, canonical representations
//! and compatible partitions.

use std::collections::{BTreeSet, HashMap};

use crate::alphabet::{Alphabet, Symbol};
use crate::combinatorics::for_each_rgs;
use crate::error::{Error, Result};
use crate::imp::{ImpModel, Partition};
use crate::markov::MarkovModel;
use crate::scalar::Real;
use crate::structure::domination::domination_report;

/// Relative tolerance on the switch ratio when testing mergeability.
pub const MERGE_RATIO_TOLERANCE: f64 = 1e-9;

fn block_alphabet(alphabet: &Alphabet, block: &[Symbol]) -> Result<Alphabet> {
    Alphabet::new(block.iter().map(|&s| alphabet.label(s).to_string()))
}

fn block_name<T: Real>(imp: &ImpModel<T>, b: usize) -> String {
    imp.switch().alphabet().label(b).to_string()
}

/// Splits the memoryless component of `block` into memoryless components
/// over `parts`, refining the switch so the process is unchanged.
///
/// Part `j` gets `P_j(x) = P(x) / P(B_j)`. A refined switch context maps
/// back to the original context by replacing part labels with `block`, and
/// emits part `j` with probability `P_sw(block | context) P(B_j)`.
pub fn split_memoryless<T: Real>(
    imp: &ImpModel<T>,
    block: usize,
    parts: &[Vec<Symbol>],
) -> Result<ImpModel<T>> {
    if block >= imp.num_blocks() {
        return Err(Error::UnknownLabel(block.to_string()));
    }
    let comp = imp.component(block);
    if !comp.is_memoryless() {
        return Err(Error::NotMemoryless(block_name(imp, block)));
    }
    let original = imp.partition().block(block);
    let mut covered: Vec<Symbol> = parts.iter().flatten().copied().collect();
    covered.sort_unstable();
    if parts.iter().any(Vec::is_empty) || covered != original {
        return Err(Error::InvalidPartition(format!(
            "parts must partition block {}",
            block_name(imp, block)
        )));
    }
    let row = comp.row(0);
    let local = |s: Symbol| imp.locate(s).1;
    let masses: Vec<T> = parts
        .iter()
        .map(|p| p.iter().map(|&s| row[local(s)]).sum())
        .collect();
    if let Some(j) = masses.iter().position(|m| *m <= T::zero()) {
        let names: Vec<&str> = parts[j].iter().map(|&s| imp.alphabet().label(s)).collect();
        return Err(Error::ZeroMassPart(names.join(",")));
    }

    // Origin of every new block: Ok(old block) or Err(part index).
    let mut tags = imp.partition().assignment();
    let base = imp.num_blocks();
    for (j, p) in parts.iter().enumerate() {
        for &s in p {
            tags[s] = base + j;
        }
    }
    let refined = Partition::from_assignment(&tags);
    let origin: Vec<std::result::Result<usize, usize>> = refined
        .blocks()
        .iter()
        .map(|b| {
            let t = tags[b[0]];
            if t >= base {
                Err(t - base)
            } else {
                Ok(t)
            }
        })
        .collect();
    let new_of_old: HashMap<usize, usize> = origin
        .iter()
        .enumerate()
        .filter_map(|(i, o)| o.ok().map(|old| (old, i)))
        .collect();
    let first_part = origin.iter().position(|o| *o == Err(0)).unwrap();
    let coarse_of = |new: usize| match origin[new] {
        Ok(old) => old,
        Err(_) => block,
    };

    let mut components = Vec::with_capacity(origin.len());
    for (i, o) in origin.iter().enumerate() {
        components.push(match *o {
            Ok(old) => imp.component(old).clone(),
            Err(j) => {
                let probs = parts[j]
                    .iter()
                    .map(|&s| row[local(s)] / masses[j])
                    .collect::<Vec<_>>();
                // Local order must follow the sorted block.
                let mut pairs: Vec<(Symbol, T)> = parts[j].iter().copied().zip(probs).collect();
                pairs.sort_unstable_by_key(|(s, _)| *s);
                let block_syms = refined.block(i);
                MarkovModel::memoryless(
                    block_alphabet(imp.alphabet(), block_syms)?,
                    pairs.into_iter().map(|(_, p)| p).collect(),
                )?
            }
        });
    }

    let sw = imp.switch();
    let initial: Vec<Symbol> = sw
        .context(sw.initial_state())
        .iter()
        .map(|&old| {
            if old == block {
                first_part
            } else {
                new_of_old[&old]
            }
        })
        .collect();
    let m_new = origin.len();
    let switch = MarkovModel::from_fn(Alphabet::lettered(m_new)?, sw.order(), initial, |ctx| {
        let coarse: Vec<Symbol> = ctx.iter().map(|&l| coarse_of(l)).collect();
        let s = sw
            .state_of(&coarse)
            .expect("refined context maps to a switch state");
        (0..m_new)
            .map(|l| match origin[l] {
                Ok(old) => sw.prob(s, old),
                Err(j) => sw.prob(s, block) * masses[j],
            })
            .collect()
    })?;
    ImpModel::new(imp.alphabet().clone(), refined, components, switch)
}

/// Result of a merge attempt.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Merge<T> {
    Merged(ImpModel<T>),
    NotMergeable(String),
}

impl<T> Merge<T> {
    pub fn merged(self) -> Option<ImpModel<T>> {
        match self {
            Merge::Merged(m) => Some(m),
            Merge::NotMergeable(_) => None,
        }
    }
}

fn close<T: Real>(a: T, b: T) -> bool {
    let tol = T::from_f64_lossy(MERGE_RATIO_TOLERANCE);
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(T::one())
}

/// Merges two memoryless components when the switch odds
/// `P_sw(b | S) / P_sw(a | S)` are one constant `gamma` over all switch
/// states (both zero together elsewhere), and the merged switch is
/// well defined on the coarser contexts.
pub fn try_merge<T: Real>(imp: &ImpModel<T>, a: usize, b: usize) -> Result<Merge<T>> {
    let m = imp.num_blocks();
    for l in [a, b] {
        if l >= m {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    if a == b {
        return Err(Error::InvalidParams(
            "cannot merge a block with itself".into(),
        ));
    }
    for l in [a, b] {
        if !imp.component(l).is_memoryless() {
            return Err(Error::NotMemoryless(block_name(imp, l)));
        }
    }
    let (a, b) = (a.min(b), a.max(b));
    let sw = imp.switch();
    let mut gamma: Option<T> = None;
    for s in 0..sw.num_states() {
        let (pa, pb) = (sw.prob(s, a), sw.prob(s, b));
        match (pa > T::zero(), pb > T::zero()) {
            (false, false) => {}
            (true, true) => {
                let r = pb / pa;
                match gamma {
                    None => gamma = Some(r),
                    Some(g) if !close(g, r) => {
                        return Ok(Merge::NotMergeable(format!(
                            "switch odds vary across states ({} vs {})",
                            g.as_f64(),
                            r.as_f64()
                        )))
                    }
                    _ => {}
                }
            }
            _ => {
                return Ok(Merge::NotMergeable(
                    "one block has zero switch probability where the other does not".into(),
                ))
            }
        }
    }
    let Some(gamma) = gamma else {
        return Ok(Merge::NotMergeable("blocks are never selected".into()));
    };

    let mut tags = imp.partition().assignment();
    for t in tags.iter_mut() {
        if *t == b {
            *t = a;
        }
    }
    let merged = Partition::from_assignment(&tags);
    // New index of each old block.
    let new_of_old: Vec<usize> = (0..m)
        .map(|old| {
            let rep = imp.partition().block(if old == b { a } else { old })[0];
            merged.block_of(rep).unwrap()
        })
        .collect();
    let target = new_of_old[a];
    let m_new = m - 1;

    let mut rows: HashMap<Vec<Symbol>, Vec<T>> = HashMap::new();
    for s in 0..sw.num_states() {
        let ctx: Vec<Symbol> = sw.context(s).iter().map(|&l| new_of_old[l]).collect();
        let mut row = vec![T::zero(); m_new];
        for old in 0..m {
            row[new_of_old[old]] = row[new_of_old[old]] + sw.prob(s, old);
        }
        match rows.get(&ctx) {
            Some(existing) => {
                if existing.iter().zip(&row).any(|(x, y)| !close(*x, *y)) {
                    return Ok(Merge::NotMergeable(
                        "switch conditionals depend on which merged block was last selected".into(),
                    ));
                }
            }
            None => {
                rows.insert(ctx, row);
            }
        }
    }
    let initial: Vec<Symbol> = sw
        .context(sw.initial_state())
        .iter()
        .map(|&l| new_of_old[l])
        .collect();
    let switch = MarkovModel::new(Alphabet::lettered(m_new)?, sw.order(), initial, rows)?;

    let one = T::one();
    let (ra, rb) = (imp.component(a).row(0), imp.component(b).row(0));
    let mut probs: Vec<(Symbol, T)> = imp
        .partition()
        .block(a)
        .iter()
        .zip(ra)
        .map(|(&s, &p)| (s, p / (one + gamma)))
        .chain(
            imp.partition()
                .block(b)
                .iter()
                .zip(rb)
                .map(|(&s, &p)| (s, gamma * p / (one + gamma))),
        )
        .collect();
    probs.sort_unstable_by_key(|(s, _)| *s);

    let mut old_of_new = vec![0usize; m_new];
    for old in 0..m {
        if old != b {
            old_of_new[new_of_old[old]] = old;
        }
    }
    let mut components = Vec::with_capacity(m_new);
    for (i, &old) in old_of_new.iter().enumerate() {
        if i == target {
            components.push(MarkovModel::memoryless(
                block_alphabet(imp.alphabet(), merged.block(i))?,
                probs.iter().map(|(_, p)| *p).collect(),
            )?);
        } else {
            components.push(imp.component(old).clone());
        }
    }
    Ok(Merge::Merged(ImpModel::new(
        imp.alphabet().clone(),
        merged,
        components,
        switch,
    )?))
}

/// Greedily merges memoryless components, lowest pair first in canonical
/// block order, until no merge applies.
pub fn canonicalize<T: Real>(imp: &ImpModel<T>) -> Result<ImpModel<T>> {
    let mut current = imp.clone();
    'outer: loop {
        let memoryless: Vec<usize> = (0..current.num_blocks())
            .filter(|&i| current.component(i).is_memoryless())
            .collect();
        for (x, &i) in memoryless.iter().enumerate() {
            for &j in &memoryless[x + 1..] {
                if let Merge::Merged(next) = try_merge(&current, i, j)? {
                    current = next;
                    continue 'outer;
                }
            }
        }
        return Ok(current);
    }
}

/// All partitions reachable from the canonical representation by memoryless
/// splits, canonical partition first, at most `max_results` of them.
///
/// Refuses when the switch shows any domination, since the characterization
/// of equivalent representations only covers the domination-free case.
pub fn enumerate_compatible_partitions<T: Real>(
    imp: &ImpModel<T>,
    max_results: usize,
) -> Result<Vec<Partition>> {
    if domination_report(imp.switch()).has_domination() {
        return Err(Error::DominationPresent);
    }
    let canonical = canonicalize(imp)?;
    if domination_report(canonical.switch()).has_domination() {
        return Err(Error::DominationPresent);
    }
    let partition = canonical.partition();

    // Per memoryless block, every split into positive-mass parts, as tag vectors.
    let mut choices: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    for b in 0..canonical.num_blocks() {
        let comp = canonical.component(b);
        if !comp.is_memoryless() || partition.block(b).len() < 2 {
            continue;
        }
        let row = comp.row(0);
        let n = row.len();
        let mut splits = Vec::new();
        for_each_rgs(n, n, |rgs| {
            let parts = rgs.iter().max().unwrap() + 1;
            let mut mass = vec![T::zero(); parts];
            for (j, &t) in rgs.iter().enumerate() {
                mass[t] = mass[t] + row[j];
            }
            if mass.iter().all(|m| *m > T::zero()) {
                splits.push(rgs.to_vec());
            }
        });
        choices.push((b, splits));
    }

    let base = partition.assignment();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    'product: loop {
        if out.len() >= max_results {
            break;
        }
        let mut tags: Vec<usize> = base.clone();
        let mut fresh = partition.num_blocks();
        for (c, (b, splits)) in choices.iter().enumerate() {
            let rgs = &splits[idx[c]];
            for (j, &s) in partition.block(*b).iter().enumerate() {
                if rgs[j] > 0 {
                    tags[s] = fresh + rgs[j];
                }
            }
            fresh += partition.block(*b).len() + 1;
        }
        let p = Partition::from_assignment(&tags);
        if seen.insert(p.clone()) {
            out.push(p);
        }
        // Odometer over the split choices.
        for c in (0..choices.len()).rev() {
            idx[c] += 1;
            if idx[c] < choices[c].1.len() {
                continue 'product;
            }
            idx[c] = 0;
        }
        break;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn letters(s: &str) -> Alphabet {
        Alphabet::new(s.chars().map(String::from)).unwrap()
    }

    fn sub(alphabet: &Alphabet, block: &[Symbol]) -> Alphabet {
        block_alphabet(alphabet, block).unwrap()
    }

    /// Memoryless components for every block, memoryless switch.
    fn all_memoryless(tags: &[usize], comps: Vec<Vec<f64>>, sw: Vec<f64>) -> ImpModel<f64> {
        let a = Alphabet::lettered(tags.len()).unwrap();
        let a = Alphabet::new(a.labels().iter().map(|l| l.to_lowercase())).unwrap();
        let p = Partition::from_assignment(tags);
        let components = p
            .blocks()
            .iter()
            .zip(comps)
            .map(|(b, probs)| MarkovModel::memoryless(sub(&a, b), probs).unwrap())
            .collect();
        let switch =
            MarkovModel::memoryless(Alphabet::lettered(p.num_blocks()).unwrap(), sw).unwrap();
        ImpModel::new(a, p, components, switch).unwrap()
    }

    fn agree(x: &ImpModel<f64>, y: &ImpModel<f64>, seed: u64) {
        let mut rng = seeded(seed);
        let alpha = x.alphabet().len();
        for _ in 0..50 {
            let len = rng.random_range(0..30);
            let seq: Vec<Symbol> = (0..len).map(|_| rng.random_range(0..alpha)).collect();
            let (lx, ly) = (x.log_prob_product(&seq), y.log_prob_product(&seq));
            assert!(lx == ly || (lx - ly).abs() < 1e-9, "{lx} vs {ly}");
        }
    }

    #[test]
    fn split_switch_and_component_values() {
        // P1 uniform over {a,b}, switch gives A1 probability 0.6.
        let imp = all_memoryless(&[0, 0, 1], vec![vec![0.5, 0.5], vec![1.0]], vec![0.6, 0.4]);
        let s = split_memoryless(&imp, 0, &[vec![0], vec![1]]).unwrap();
        assert_eq!(s.num_blocks(), 3);
        assert!((s.switch().prob(0, 0) - 0.3).abs() < 1e-15);
        agree(&imp, &s, 1);

        let imp = all_memoryless(&[0, 0, 1], vec![vec![0.6, 0.4], vec![1.0]], vec![0.5, 0.5]);
        let trivial = split_memoryless(&imp, 0, &[vec![0, 1]]).unwrap();
        assert_eq!(trivial, imp);
    }

    #[test]
    fn split_component_renormalizes() {
        let imp = all_memoryless(
            &[0, 0, 0, 1],
            vec![vec![0.3, 0.2, 0.5], vec![1.0]],
            vec![0.5, 0.5],
        );
        let s = split_memoryless(&imp, 0, &[vec![0, 1], vec![2]]).unwrap();
        assert!((s.component(0).prob(0, 0) - 0.6).abs() < 1e-12);
        agree(&imp, &s, 2);
    }

    #[test]
    fn split_errors() {
        let imp = all_memoryless(&[0, 0, 1], vec![vec![1.0, 0.0], vec![1.0]], vec![0.5, 0.5]);
        assert!(matches!(
            split_memoryless(&imp, 0, &[vec![0], vec![1]]),
            Err(Error::ZeroMassPart(_))
        ));
        assert!(matches!(
            split_memoryless(&imp, 0, &[vec![0]]),
            Err(Error::InvalidPartition(_))
        ));
    }

    fn order1_switch(rows: [[f64; 2]; 2]) -> MarkovModel<f64> {
        MarkovModel::new(
            Alphabet::lettered(2).unwrap(),
            1,
            vec![0],
            [(vec![0], rows[0].to_vec()), (vec![1], rows[1].to_vec())],
        )
        .unwrap()
    }

    #[test]
    fn merge_memoryless_switch_round_trip() {
        let imp = all_memoryless(
            &[0, 0, 0, 1],
            vec![vec![0.3, 0.2, 0.5], vec![1.0]],
            vec![0.7, 0.3],
        );
        let s = split_memoryless(&imp, 0, &[vec![0, 2], vec![1]]).unwrap();
        let back = try_merge(&s, 0, 1).unwrap().merged().unwrap();
        assert_eq!(back.partition(), imp.partition());
        agree(&imp, &back, 3);
    }

    #[test]
    fn merge_with_order1_switch_round_trip() {
        let a = letters("abc");
        let p = Partition::from_assignment(&[0, 0, 1]);
        let imp = ImpModel::new(
            a.clone(),
            p,
            vec![
                MarkovModel::memoryless(letters("ab"), vec![0.25, 0.75]).unwrap(),
                MarkovModel::memoryless(letters("c"), vec![1.0]).unwrap(),
            ],
            order1_switch([[0.4, 0.6], [0.9, 0.1]]),
        )
        .unwrap();
        let s = split_memoryless(&imp, 0, &[vec![0], vec![1]]).unwrap();
        assert_eq!(s.switch().num_states(), 3);
        agree(&imp, &s, 4);
        let back = try_merge(&s, 0, 1).unwrap().merged().unwrap();
        assert_eq!(back.partition(), imp.partition());
        agree(&imp, &back, 5);
        assert_eq!(canonicalize(&s).unwrap().partition(), imp.partition());
    }

    #[test]
    fn varying_ratio_is_not_mergeable() {
        let a = letters("ab");
        let imp = ImpModel::new(
            a,
            Partition::singletons(2),
            vec![
                MarkovModel::memoryless(letters("a"), vec![1.0]).unwrap(),
                MarkovModel::memoryless(letters("b"), vec![1.0]).unwrap(),
            ],
            order1_switch([[0.4, 0.6], [0.9, 0.1]]),
        )
        .unwrap();
        assert!(matches!(
            try_merge(&imp, 0, 1).unwrap(),
            Merge::NotMergeable(_)
        ));
        assert_eq!(canonicalize(&imp).unwrap(), imp);
    }

    #[test]
    fn memoryless_singletons_collapse() {
        let imp = all_memoryless(&[0, 1, 2, 3], vec![vec![1.0]; 4], vec![0.1, 0.2, 0.3, 0.4]);
        let c = canonicalize(&imp).unwrap();
        assert_eq!(c.num_blocks(), 1);
        agree(&imp, &c, 6);
        let cc = canonicalize(&c).unwrap();
        assert_eq!(cc.partition(), c.partition());
    }

    #[test]
    fn non_memoryless_unchanged() {
        let a = letters("ab");
        let comp = MarkovModel::new(
            a.clone(),
            1,
            vec![0],
            [(vec![0], vec![0.5, 0.5]), (vec![1], vec![0.2, 0.8])],
        )
        .unwrap();
        let sw = MarkovModel::memoryless(Alphabet::lettered(1).unwrap(), vec![1.0]).unwrap();
        let imp = ImpModel::new(a, Partition::whole(2), vec![comp], sw).unwrap();
        assert_eq!(canonicalize(&imp).unwrap(), imp);
        assert_eq!(
            enumerate_compatible_partitions(&imp, 100).unwrap(),
            vec![Partition::whole(2)]
        );
    }

    #[test]
    fn compatible_counts() {
        // One memoryless block over three symbols, one order-1 block.
        let a = letters("abcde");
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1]);
        let imp = ImpModel::new(
            a,
            p.clone(),
            vec![
                MarkovModel::memoryless(letters("abc"), vec![0.2, 0.3, 0.5]).unwrap(),
                MarkovModel::new(
                    letters("de"),
                    1,
                    vec![0],
                    [(vec![0], vec![0.1, 0.9]), (vec![1], vec![0.7, 0.3])],
                )
                .unwrap(),
            ],
            MarkovModel::memoryless(Alphabet::lettered(2).unwrap(), vec![0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let parts = enumerate_compatible_partitions(&imp, 100).unwrap();
        assert_eq!(parts.len(), 5);
        assert_eq!(parts[0], p);
        assert!(parts.contains(&Partition::from_assignment(&[0, 1, 2, 3, 3])));
        assert_eq!(enumerate_compatible_partitions(&imp, 2).unwrap().len(), 2);
    }

    #[test]
    fn domination_refused() {
        let a = letters("abc");
        let sw = crate::structure::domination::tests::example_switch(0.5, 0.5);
        let imp = ImpModel::new(
            a,
            Partition::singletons(3),
            vec![
                MarkovModel::memoryless(letters("a"), vec![1.0]).unwrap(),
                MarkovModel::memoryless(letters("b"), vec![1.0]).unwrap(),
                MarkovModel::memoryless(letters("c"), vec![1.0]).unwrap(),
            ],
            sw,
        )
        .unwrap();
        assert!(matches!(
            enumerate_compatible_partitions(&imp, 10),
            Err(Error::DominationPresent)
        ));
    }
}
