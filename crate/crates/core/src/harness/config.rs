use serde::{Deserialize, Serialize};

use crate::deinterleave::SearchParams;
use crate::error::{Error, Result};
use crate::imp::OrderVector;

/// How the switch of a random IMP is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwitchKind {
    /// Order 0, every block with probability `1/m`.
    MemorylessUniform,
    /// Order 1 with random rows, accepted when its stationary law is close
    /// to uniform and it shows no domination.
    #[serde(rename = "random-order-1-uniform-marginals")]
    RandomOrder1UniformMarginals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MlExhaustive,
    MlHeuristic,
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MlExhaustive => "ml_exhaustive",
            Method::MlHeuristic => "ml_heuristic",
            Method::Baseline => "baseline",
        }
    }
}

/// Tolerance scale of the baseline clusterer.
///
/// The best scale of the calibration sweep on the memoryless-switch
/// configuration at `n = 10^6` (50 trials, success 1.0).
pub const DEFAULT_BASELINE_SCALE: f64 = 0.1;

fn default_max_blocks() -> usize {
    4
}

fn default_baseline_scale() -> f64 {
    DEFAULT_BASELINE_SCALE
}

/// Dirichlet concentration of random component rows (the Jeffreys prior).
pub const DEFAULT_COMPONENT_CONCENTRATION: f64 = 0.5;

fn default_component_concentration() -> f64 {
    DEFAULT_COMPONENT_CONCENTRATION
}

/// Dirichlet concentration of random order-1 switch rows.
pub const DEFAULT_SWITCH_CONCENTRATION: f64 = 0.3;

fn default_switch_concentration() -> f64 {
    DEFAULT_SWITCH_CONCENTRATION
}

fn default_beta() -> f64 {
    0.5
}

/// One experiment: how to draw IMPs, which prefix lengths to test and with
/// which methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_sequences: usize,
    pub lengths: Vec<usize>,
    pub block_sizes: Vec<usize>,
    pub order_vector: OrderVector,
    pub switch_kind: SwitchKind,
    #[serde(default = "default_beta")]
    pub beta: f64,
    pub seed: u64,
    pub methods: Vec<Method>,
    /// Local search parameters; the seed is replaced per trial and length.
    #[serde(default)]
    pub search: SearchParams,
    /// Block cap of the exhaustive method.
    #[serde(default = "default_max_blocks")]
    pub max_blocks: usize,
    #[serde(default = "default_baseline_scale")]
    pub baseline_scale: f64,
    /// Symmetric Dirichlet concentration of component rows; 1 is flat.
    #[serde(default = "default_component_concentration")]
    pub component_concentration: f64,
    /// Symmetric Dirichlet concentration of random order-1 switch rows.
    #[serde(default = "default_switch_concentration")]
    pub switch_concentration: f64,
}

impl ExperimentConfig {
    /// Desk-scale protocol on three blocks of sizes 4, 5 and 6.
    pub fn desk_scale(
        order_vector: OrderVector,
        switch_kind: SwitchKind,
        lengths: Vec<usize>,
    ) -> Self {
        Self {
            num_sequences: 50,
            lengths,
            block_sizes: vec![4, 5, 6],
            order_vector,
            switch_kind,
            beta: 0.5,
            seed: 1,
            methods: vec![Method::MlHeuristic],
            search: SearchParams::default(),
            max_blocks: default_max_blocks(),
            baseline_scale: DEFAULT_BASELINE_SCALE,
            component_concentration: DEFAULT_COMPONENT_CONCENTRATION,
            switch_concentration: default_switch_concentration(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.num_sequences == 0 {
            return bad("num_sequences must be positive".into());
        }
        if self.lengths.is_empty() || self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return bad("lengths must be nonempty and strictly ascending".into());
        }
        if self.block_sizes.is_empty() || self.block_sizes.contains(&0) {
            return bad("block sizes must be positive".into());
        }
        if self.order_vector.num_components() != self.block_sizes.len() {
            return bad(format!(
                "order vector has {} component orders for {} blocks",
                self.order_vector.num_components(),
                self.block_sizes.len()
            ));
        }
        let want = match self.switch_kind {
            SwitchKind::MemorylessUniform => 0,
            SwitchKind::RandomOrder1UniformMarginals => 1,
        };
        if self.order_vector.switch_order != want {
            return bad(format!(
                "switch kind {:?} requires switch order {want}",
                self.switch_kind
            ));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return bad("beta must be finite and nonnegative".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if !(self.baseline_scale > 0.0 && self.baseline_scale.is_finite()) {
            return bad("baseline scale must be positive".into());
        }
        for (name, c) in [
            ("component", self.component_concentration),
            ("switch", self.switch_concentration),
        ] {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("{name} concentration must be positive"));
            }
        }
        self.search.validate()
    }
}
