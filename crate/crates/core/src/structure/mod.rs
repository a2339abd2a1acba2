//! Structural analysis of IMP representations: alphabet domination and its
//! layers, memoryless splits and merges, canonical and compatible
//! partitions, and the divergence between FSM sources.

mod divergence;
mod domination;
mod memoryless;
mod scc;

pub use divergence::{fsm_divergence, imp_divergence};
pub use domination::{dominates, domination_report, DominationReport};
pub use memoryless::{
    canonicalize, enumerate_compatible_partitions, split_memoryless, try_merge, Merge,
    MERGE_RATIO_TOLERANCE,
};
pub use scc::strongly_connected_components;
