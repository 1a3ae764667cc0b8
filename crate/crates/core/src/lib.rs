//! Differential evolution driven by chaotic pseudo-random number generators.
//!
//! The crate is organised bottom-up:
//!
//! * [`chaos`] iterates the Gingerbread-man and Tinkerbell maps.
//! * [`normalize`] folds raw map output into the unit interval (Modulo,
//!   Bounds and Atan2 schemes).
//! * [`source`] wraps everything that produces unit samples behind the
//!   [`RandomSource`] trait: MT19937, chaotic sources and Mersenne Twister
//!   reshaped to a chaotic source's empirical distribution.
//! * [`benchmarks`] provides nine shifted/rotated CEC2013-style functions.
//! * [`de`] implements DE/rand/1/bin and DE/best/1/bin.
//! * [`stats`] holds summary statistics and the hypothesis tests.
//! * [`harness`] runs experiment grids and writes result files.

// `!(a < b)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod chaos;
pub mod de;
mod error;
pub mod harness;
pub mod normalize;
pub mod source;
pub mod stats;

pub use benchmarks::{BenchmarkId, BenchmarkInstance};
pub use chaos::{ChaoticMapKind, MapPoint, TinkerbellParams};
pub use de::{DeConfig, RunRecord, Variant};
pub use error::{Error, Result};
pub use normalize::{NormalizerKind, Scheme, UnitSample};
pub use source::{RandomSource, SourceSpec};
pub use stats::{StatConfig, SummaryStats, TestOutcome};
