//! Interleaved Markov processes.
//!
//! Sampling and exact likelihoods for interleaved Markov processes (IMPs),
//! their unifilar FSM representation, structural analysis (alphabet
//! domination, memoryless splits and merges, canonical and compatible
//! partitions), and a penalized maximum-likelihood deinterleaver with
//! exhaustive and randomized local-search variants.
//!
//! Numeric code is generic over [`Real`]; the `*64` aliases below fix the
//! scalar to `f64`, which is what the CLI and the experiment harness use.
//!
//! ```
//! use imp_core::deinterleave::{deinterleave_heuristic, SearchParams};
//! use imp_core::harness::{trial_model, ExperimentConfig, SwitchKind};
//! use imp_core::imp::OrderVector;
//! use imp_core::rng::seeded;
//!
//! # fn main() -> imp_core::Result<()> {
//! let config = ExperimentConfig::desk_scale(
//!     OrderVector::new(vec![1, 1, 1], 0),
//!     SwitchKind::MemorylessUniform,
//!     vec![20_000],
//! );
//! let model = trial_model(&config, 0)?;
//! let seq = model.sample(20_000, &mut seeded(7));
//! let est = deinterleave_heuristic(&seq, 15, 0.5, &SearchParams::default())?;
//! assert_eq!(&est.partition, model.partition());
//! # Ok(())
//! # }
//! ```

pub mod alphabet;
pub mod combinatorics;
pub mod deinterleave;
pub mod error;
pub mod harness;
pub mod imp;
pub mod io;
pub mod markov;
pub mod rng;
pub mod scalar;
pub mod structure;

pub use alphabet::{Alphabet, Symbol};
pub use error::{Error, Result};
pub use scalar::Real;

pub type MarkovModel64 = markov::MarkovModel<f64>;
pub type ImpModel64 = imp::ImpModel<f64>;
pub type FsmSource64 = imp::FsmSource<f64>;
