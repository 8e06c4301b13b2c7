//! Exact worst-case Chernoff-Cramer tail bounds for the sum of independent
//! random variables `X_i in [0, b_i]` whose expected sum `mu` is known.
//!
//! The bound `P(S >= s) <= exp(phi*)` is obtained by minimizing a convex
//! function of two dual variables; see [`engine::phi_star`]. It is never
//! looser than the general Hoeffding bound and coincides with Hoeffding's
//! unit-interval bound when every `b_i = 1`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod math;
pub mod opt;
pub mod oracle;
pub mod sim;

pub use engine::{
    compare_bounds, p_value, phi_star, phi_star_fixed_t, tail_bound, BoundReport, ComparisonRow,
    Diagnostics, EdgeCase, Method,
};
pub use error::{Error, Result};
pub use math::{DualPoint, Instance, TauVector};
pub use opt::{SolveConfig, SolveResult, Status};
pub use sim::{run_sweep, sample_simplex_lengths, SGrid, SweepRow, SweepSpec};
