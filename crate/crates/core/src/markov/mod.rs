//! Finite-order Markov sources: counting, empirical entropy, order
//! estimation, sampling and stationary analysis.

mod counts;
mod model;
mod order;
pub mod stationary;

pub use counts::{count_transitions, empirical_entropy, CountTable, StreamEntropy};
pub(crate) use counts::{dense_limit, dense_table_entropy};
pub use model::MarkovModel;
pub use order::{
    default_max_order, estimate_order, free_parameters, select_order, select_order_with,
    OrderChoice, DEFAULT_ORDER_CAP,
};
