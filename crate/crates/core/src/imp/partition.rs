use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabet::{block_letter, Alphabet, Symbol};
use crate::error::{Error, Result};

/// A partition of the symbols `0..alphabet_size` into nonempty blocks.
///
/// Always kept canonical: symbols ascend within a block and blocks are
/// ordered by their smallest symbol. Block `i` carries label `i`. The derived
/// ordering compares block lists lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: Vec<Vec<Symbol>>,
    alphabet_size: usize,
}

impl Partition {
    pub fn new(alphabet_size: usize, blocks: Vec<Vec<Symbol>>) -> Result<Self> {
        let mut seen = vec![false; alphabet_size];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &s in block {
                if s >= alphabet_size {
                    return Err(Error::InvalidPartition(format!(
                        "symbol {s} outside alphabet"
                    )));
                }
                if std::mem::replace(&mut seen[s], true) {
                    return Err(Error::InvalidPartition(format!("symbol {s} appears twice")));
                }
            }
        }
        if let Some(s) = seen.iter().position(|v| !v) {
            return Err(Error::InvalidPartition(format!(
                "symbol {s} is not covered"
            )));
        }
        Ok(Self::canonical(alphabet_size, blocks))
    }

    fn canonical(alphabet_size: usize, mut blocks: Vec<Vec<Symbol>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Self {
            blocks,
            alphabet_size,
        }
    }

    /// Builds a partition from a block tag per symbol; tags are arbitrary.
    pub fn from_assignment(tags: &[usize]) -> Self {
        let mut remap: Vec<Option<usize>> = Vec::new();
        let mut blocks: Vec<Vec<Symbol>> = Vec::new();
        for (s, &t) in tags.iter().enumerate() {
            if remap.len() <= t {
                remap.resize(t + 1, None);
            }
            let b = *remap[t].get_or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(s);
        }
        Self {
            blocks,
            alphabet_size: tags.len(),
        }
    }

    /// Restricted growth string: the block index of every symbol.
    pub fn assignment(&self) -> Vec<usize> {
        let mut tags = vec![0; self.alphabet_size];
        for (i, b) in self.blocks.iter().enumerate() {
            for &s in b {
                tags[s] = i;
            }
        }
        tags
    }

    pub fn whole(alphabet_size: usize) -> Self {
        Self::from_assignment(&vec![0; alphabet_size])
    }

    pub fn singletons(alphabet_size: usize) -> Self {
        Self::from_assignment(&(0..alphabet_size).collect::<Vec<_>>())
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<Symbol>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[Symbol] {
        &self.blocks[i]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn block_of(&self, symbol: Symbol) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&symbol).is_ok())
    }

    /// If `self` refines `coarse`, maps each block of `self` to the block of
    /// `coarse` containing it.
    pub fn refinement_of(&self, coarse: &Partition) -> Option<Refinement> {
        if self.alphabet_size != coarse.alphabet_size {
            return None;
        }
        let tags = coarse.assignment();
        let mut block_map = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let t = tags[b[0]];
            if b.iter().any(|&s| tags[s] != t) {
                return None;
            }
            block_map.push(t);
        }
        Some(Refinement {
            coarse: coarse.clone(),
            fine: self.clone(),
            block_map,
        })
    }

    /// Block label strings in terms of `alphabet`.
    pub fn labelled(&self, alphabet: &Alphabet) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&s| alphabet.label(s).to_string()).collect())
            .collect()
    }

    pub fn from_labelled(alphabet: &Alphabet, blocks: &[Vec<String>]) -> Result<Self> {
        let blocks = blocks
            .iter()
            .map(|b| alphabet.encode(b.iter().map(String::as_str)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet.len(), blocks)
    }

    /// Letter label of block `i` (`A`, `B`, ...).
    pub fn block_label(i: usize) -> String {
        block_letter(i)
    }

    /// Applies a bijective renaming of symbols.
    pub fn rename(&self, perm: &[Symbol]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&s| perm[s]).collect())
            .collect();
        Self::canonical(self.alphabet_size, blocks)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let s: Vec<String> = b.iter().map(ToString::to_string).collect();
                format!("{{{}}}", s.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A fine partition together with the map from its blocks to coarse blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub coarse: Partition,
    pub fine: Partition,
    pub block_map: Vec<usize>,
}

/// Component orders aligned with partition blocks, plus the switch order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderVector {
    pub component_orders: Vec<usize>,
    pub switch_order: usize,
}

impl OrderVector {
    pub fn new(component_orders: Vec<usize>, switch_order: usize) -> Self {
        Self {
            component_orders,
            switch_order,
        }
    }

    pub fn num_components(&self) -> usize {
        self.component_orders.len()
    }

    pub fn check_aligned(&self, partition: &Partition) -> Result<()> {
        if self.component_orders.len() != partition.num_blocks() {
            return Err(Error::InvalidParams(format!(
                "order vector has {} component orders for {} blocks",
                self.component_orders.len(),
                partition.num_blocks()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for OrderVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut all: Vec<String> = self
            .component_orders
            .iter()
            .map(ToString::to_string)
            .collect();
        all.push(self.switch_order.to_string());
        write!(f, "({})", all.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let p = Partition::new(4, vec![vec![3, 1], vec![2, 0]]).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(p.assignment(), vec![0, 1, 0, 1]);
        assert_eq!(Partition::from_assignment(&[5, 2, 5, 2]), p);
        assert_eq!(p.to_string(), "{{0,2},{1,3}}");
    }

    #[test]
    fn invalid_partitions() {
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn refinement_map() {
        let coarse = Partition::from_assignment(&[0, 0, 1, 1]);
        let fine = Partition::from_assignment(&[0, 1, 2, 2]);
        let r = fine.refinement_of(&coarse).unwrap();
        assert_eq!(r.block_map, vec![0, 0, 1]);
        assert!(coarse.refinement_of(&fine).is_none());
    }

    #[test]
    fn labels() {
        let a = Alphabet::new(["a", "b", "c"]).unwrap();
        let p = Partition::from_labelled(&a, &[vec!["c".into()], vec!["b".into(), "a".into()]])
            .unwrap();
        assert_eq!(p.labelled(&a), vec![vec!["a", "b"], vec!["c"]]);
        assert_eq!(Partition::block_label(1), "B");
    }
}
