//! Partitions, the interleaved process model, its product-FSM form and
//! parameter counts.

mod fsm;
mod model;
mod params;
mod partition;

pub use fsm::{build_fsm, FsmSource};
pub use model::{project, switch_sequence, ImpModel};
pub use params::{
    count_fsm_params, count_imp_params, fsm_params_from_sizes, imp_params_from_sizes,
    kappa_split_delta,
};
pub use partition::{OrderVector, Partition, Refinement};
