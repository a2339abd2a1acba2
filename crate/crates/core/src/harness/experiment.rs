use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::alphabet::Symbol;
use crate::deinterleave::{deinterleave_exhaustive, deinterleave_heuristic, SearchParams};
use crate::error::Result;
use crate::harness::baseline::baseline_deinterleave;
use crate::harness::config::{ExperimentConfig, Method};
use crate::harness::judge::{Judgement, Truth};
use crate::harness::random::random_imp;
use crate::imp::{ImpModel, Partition};
use crate::rng::{derive_seed, seeded};

/// One generated sequence with its model.
#[derive(Debug, Clone)]
pub struct Trial {
    pub index: usize,
    pub model: ImpModel<f64>,
    pub truth: Truth,
    /// Sample of the longest configured length; shorter lengths are prefixes.
    pub sample: Vec<Symbol>,
}

/// The random IMP of trial `index`.
pub fn trial_model(config: &ExperimentConfig, index: usize) -> Result<ImpModel<f64>> {
    random_imp(
        config,
        &mut seeded(derive_seed(config.seed, &[index as u64, 0])),
    )
}

/// Draws the model and sample of trial `index`, independent of all other trials.
pub fn draw_trial(config: &ExperimentConfig, index: usize) -> Result<Trial> {
    let i = index as u64;
    let model = trial_model(config, index)?;
    let n = *config.lengths.last().expect("validated lengths");
    let sample = model.sample(n, &mut seeded(derive_seed(config.seed, &[i, 1])));
    let truth = Truth::new(&model)?;
    Ok(Trial {
        index,
        model,
        truth,
        sample,
    })
}

/// Runs one method on a prefix of a trial's sample.
pub fn estimate(
    config: &ExperimentConfig,
    trial: &Trial,
    n: usize,
    method: Method,
) -> Result<Partition> {
    let seq = &trial.sample[..n];
    let alpha = trial.model.alphabet().len();
    Ok(match method {
        Method::MlHeuristic => {
            let params = SearchParams {
                seed: derive_seed(config.seed, &[trial.index as u64, 2, n as u64]),
                ..config.search.clone()
            };
            deinterleave_heuristic(seq, alpha, config.beta, &params)?.partition
        }
        Method::MlExhaustive => {
            deinterleave_exhaustive(
                seq,
                alpha,
                config.beta,
                config.max_blocks,
                config.search.k_cap,
            )?
            .partition
        }
        Method::Baseline => baseline_deinterleave(seq, alpha, config.baseline_scale),
    })
}

/// Success counts of one method at one length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub method: Method,
    pub trials: usize,
    pub exact: usize,
    pub canonical: usize,
    pub compatible: usize,
}

impl ResultRow {
    fn fraction(&self, count: usize) -> f64 {
        count as f64 / self.trials as f64
    }

    pub fn success_exact(&self) -> f64 {
        self.fraction(self.exact)
    }

    pub fn success_canonical(&self) -> f64 {
        self.fraction(self.canonical)
    }

    pub fn success_compatible(&self) -> f64 {
        self.fraction(self.compatible)
    }
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    method: &'static str,
    success_exact: f64,
    success_canonical: f64,
    success_compatible: f64,
}

/// Per-length, per-method success fractions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, n: usize, method: Method) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.n == n && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(CsvRow {
                n: r.n,
                method: r.method.name(),
                success_exact: r.success_exact(),
                success_canonical: r.success_canonical(),
                success_compatible: r.success_compatible(),
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }
}

impl fmt::Display for ResultTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>8}  {:<14} {:>7} {:>9} {:>10}",
            "n", "method", "exact", "canonical", "compatible"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>8}  {:<14} {:>7.3} {:>9.3} {:>10.3}",
                r.n,
                r.method.name(),
                r.success_exact(),
                r.success_canonical(),
                r.success_compatible()
            )?;
        }
        Ok(())
    }
}

/// Judgements of every method at every length for one trial, indexed
/// `[length][method]`.
pub fn run_trial(config: &ExperimentConfig, index: usize) -> Result<Vec<Vec<Judgement>>> {
    let trial = draw_trial(config, index)?;
    config
        .lengths
        .iter()
        .map(|&n| {
            config
                .methods
                .iter()
                .map(|&m| Ok(trial.truth.judge(&estimate(config, &trial, n, m)?)))
                .collect()
        })
        .collect()
}

/// Runs every trial and aggregates success fractions.
///
/// Trials run in parallel; each draws from seeds derived from the master
/// seed and its index, so the table does not depend on the thread count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let per_trial: Vec<Vec<Vec<Judgement>>> = (0..config.num_sequences)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (li, &n) in config.lengths.iter().enumerate() {
        for (mi, &method) in config.methods.iter().enumerate() {
            let js = per_trial.iter().map(|t| t[li][mi]);
            let mut row = ResultRow {
                n,
                method,
                trials: config.num_sequences,
                exact: 0,
                canonical: 0,
                compatible: 0,
            };
            for j in js {
                row.exact += j.exact as usize;
                row.canonical += j.canonical as usize;
                row.compatible += j.compatible as usize;
            }
            rows.push(row);
        }
    }
    Ok(ResultTable { rows })
}

/// Baseline success at one tolerance scale and length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub scale: f64,
    pub n: usize,
    pub success_exact: f64,
}

/// Calibration rows as CSV with columns `scale, n, success_exact`.
pub fn calibration_to_csv(rows: &[CalibrationRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

/// Baseline success fractions over a grid of tolerance scales, on the
/// trials of `config`.
pub fn calibrate_baseline(
    config: &ExperimentConfig,
    scales: &[f64],
) -> Result<Vec<CalibrationRow>> {
    config.validate()?;
    let trials: Vec<Trial> = (0..config.num_sequences)
        .into_par_iter()
        .map(|i| draw_trial(config, i))
        .collect::<Result<_>>()?;
    let alpha: usize = config.block_sizes.iter().sum();
    let mut rows = Vec::new();
    for &scale in scales {
        for &n in &config.lengths {
            let hits = trials
                .par_iter()
                .filter(|t| {
                    baseline_deinterleave(&t.sample[..n], alpha, scale) == t.truth.partition
                })
                .count();
            rows.push(CalibrationRow {
                scale,
                n,
                success_exact: hits as f64 / trials.len() as f64,
            });
        }
    }
    Ok(rows)
}
