//! Penalized maximum-likelihood deinterleaving.

mod cost;
mod neighborhood;
mod search;

pub use cost::{
    best_orders, cost, partition_cost, CostBreakdown, Estimate, Evaluator, COST_RESOLUTION,
};
pub use neighborhood::neighborhood;
pub use search::{
    deinterleave_exhaustive, deinterleave_exhaustive_with_budget, deinterleave_heuristic,
    heuristic_search, SearchOutcome, SearchParams, DEFAULT_K_CAP, EXHAUSTIVE_BUDGET,
};
