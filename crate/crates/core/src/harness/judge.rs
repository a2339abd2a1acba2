use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::imp::{ImpModel, Partition};
use crate::scalar::Real;
use crate::structure::{canonicalize, enumerate_compatible_partitions};

/// Cap on the compatible partitions enumerated per truth model.
pub const COMPATIBLE_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Judgement {
    pub exact: bool,
    pub canonical: bool,
    pub compatible: bool,
}

/// Reference partitions of a generating model, computed once and reused
/// for every estimate judged against it.
#[derive(Debug, Clone)]
pub struct Truth {
    pub partition: Partition,
    pub canonical: Partition,
    pub compatible: BTreeSet<Partition>,
}

impl Truth {
    pub fn new<T: Real>(model: &ImpModel<T>) -> Result<Self> {
        let canonical = canonicalize(model)?;
        let compatible = enumerate_compatible_partitions(&canonical, COMPATIBLE_CAP)?
            .into_iter()
            .collect();
        Ok(Self {
            partition: model.partition().clone(),
            canonical: canonical.partition().clone(),
            compatible,
        })
    }

    pub fn judge(&self, result: &Partition) -> Judgement {
        Judgement {
            exact: *result == self.partition,
            canonical: *result == self.canonical,
            compatible: self.compatible.contains(result),
        }
    }
}

/// Compares an estimated partition with the generating model.
pub fn judge<T: Real>(result: &Partition, truth: &ImpModel<T>) -> Result<Judgement> {
    Ok(Truth::new(truth)?.judge(result))
}
