//! Command-line front end: TOML configs in; boundary CSV, summary JSON,
//! streamline CSV and SVG out.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod app;
pub mod checks;
pub mod config;
pub mod output;

pub use app::run;
