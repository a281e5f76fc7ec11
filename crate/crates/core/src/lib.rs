//! Modelling toolkit for a reservoir-engineered degenerate OPO: squeezed-basis
//! noise spectra, thresholds, two-cavity comb co-resonance, beta-line
//! linewidths and the scalar fits used to calibrate the effective damping.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod comb;
pub mod commands;
pub mod descriptor;
pub mod error;
pub mod fitting;
pub mod grid;
pub mod linewidth;
pub mod spectrum;
pub mod table;
pub mod threshold;
pub mod variance;

pub use error::{Error, Result};
