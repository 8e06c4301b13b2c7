//! File formats, self-checks and the command-line front end for
//! [`tailbound_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod format;
pub mod lengths;
pub mod selfcheck;

pub use cli::parse_and_dispatch;
pub use format::{emit_table, TableFormat};
pub use lengths::{read_lengths, LengthsError};
