//! Saddle-point optimization with Bregman-regularized primal-dual methods.
//!
//! The crate solves convex-concave problems of the form
//!
//! ```text
//! min_{x ∈ X} max_{y ∈ Y}  f(x) + <Ax - b, y> - g(y)
//! ```
//!
//! with a symmetric primal-dual iteration (dual, primal, dual) and the
//! classical Arrow-Hurwicz and extrapolated (Chambolle-Pock) baselines.
//! Linearly constrained programs get their own one-block and multi-block
//! schemes in [`lcp`], and [`problems`] ships generators and metrics for
//! matrix games, basis pursuit, robust PCA and TV image restoration.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bregman;
pub mod error;
pub mod lcp;
pub mod linops;
pub mod problems;
pub mod proxmaps;
pub mod saddle;

mod rng;

pub use bregman::BregmanKernel;
pub use error::{Error, Result};
pub use linops::{LinearOperator, NormEstimate};
pub use proxmaps::{FeasibleSet, ProxOracle};
pub use saddle::{IterateState, Method, RunReport, SaddleProblem, SolverConfig, Termination};

/// Dense column vector used throughout the crate.
pub type Vector = nalgebra::DVector<f64>;
/// Dense column-major matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
