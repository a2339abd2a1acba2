//! Experiment generation and evaluation: random IMPs, judging estimates
//! against the generating model, a pairwise-dependence baseline, and
//! success tables over prefix lengths.

mod baseline;
mod config;
mod experiment;
mod judge;
mod random;

pub use baseline::baseline_deinterleave;
pub use config::{
    ExperimentConfig, Method, SwitchKind, DEFAULT_BASELINE_SCALE, DEFAULT_COMPONENT_CONCENTRATION,
    DEFAULT_SWITCH_CONCENTRATION,
};
pub use experiment::{
    calibrate_baseline, calibration_to_csv, draw_trial, estimate, run_experiment, run_trial,
    trial_model, CalibrationRow, ResultRow, ResultTable, Trial,
};
pub use judge::{judge, Judgement, Truth, COMPATIBLE_CAP};
pub use random::{
    dirichlet_row, flat_simplex, random_imp, random_markov, symbol_alphabet, MARGINAL_TOLERANCE,
    SWITCH_REJECTION_BUDGET,
};
