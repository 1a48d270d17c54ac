//! Simultaneously renormalized matrix products.
//!
//! For a sequence `A_0, A_1, ...` of `d x d` complex matrices with Cesàro
//! mean `A`, the product `(I + (t/n) A_0) ... (I + (t/n) A_{n-1})` tends to
//! `exp(tA)`. This crate computes those products, the ordered symmetric sums
//! their expansion is built from, and the two-horocycle walk on the
//! hyperbolic plane that the construction specializes to for the pair of
//! unipotent generators of `SL_2(Z)`.
//!
//! Layout:
//!
//! * [`matcore`] dense complex matrices, norms and the matrix exponential.
//! * [`rng`] the counter-based generator behind the stochastic symbol models.
//! * [`sequences`] symbol streams, matrix sequences and Cesàro statistics.
//! * [`renorm`] products, symmetric sums, scalar and weighted-average limits.
//! * [`hyperwalk`] closed-form limits, Möbius action and disc trajectories.
//! * [`formats`] CSV and line-oriented text formats shared with the CLI.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod formats;
pub mod hyperwalk;
pub mod matcore;
pub mod renorm;
pub mod rng;
pub mod sequences;

pub use error::{Error, Result};
pub use matcore::{Matrix, NormKind};
pub use num_complex::Complex64;
