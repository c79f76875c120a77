//! Two-photon polarization experiments, Bell/BCHS inequalities and the
//! marginal problem behind them.
//!
//! The crate is `no_std` with `alloc`. Everything here is a pure function
//! over immutable values; Monte-Carlo routines take an explicit seed and
//! split their work into fixed-size chunks whose random streams depend only
//! on `(seed, lane, chunk)`, so a parallel executor (see [`exec`]) produces
//! the same counts as the sequential one.
//!
//! Module map:
//!
//! * [`quantum`]: states, polarization projectors, correlations.
//! * [`povm`]: arm and pair POVMs of the generalized Aspect experiment.
//! * [`inequalities`]: Bell (CHSH form) and BCHS evaluation.
//! * [`joint`]: LP feasibility of a quadrivariate joint, explicit joints.
//! * [`hidden`]: quasi-objectivistic hidden-variables models.
//! * [`macrostate`]: context-dependent macrostate models.
//! * [`relaxation`]: the relaxation-time toy process.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod angle;
mod distribution;
mod error;
mod math;

pub mod exec;
pub mod generators;
pub mod hidden;
pub mod inequalities;
pub mod joint;
pub mod linalg;
pub mod macrostate;
pub mod povm;
pub mod quantum;
pub mod relaxation;
pub mod rng;
pub mod simplex;

pub use angle::{Angle, Settings};
pub use distribution::{
    marginal_pair, BivariateDistribution, Outcome, PairSelector, QuadrivariateDistribution,
};
pub use error::{Error, Result};
