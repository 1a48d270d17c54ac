//! Command-line harness for the renormalized-product experiments.
//!
//! Configuration parsing lives in [`config`], experiment execution in
//! [`run`], and the disc pictures in [`svg`]. The `renorm` binary is a thin
//! clap front end over these modules.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;
pub mod svg;
