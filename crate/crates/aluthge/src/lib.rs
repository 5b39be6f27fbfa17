//! Command-line front end for `aluthge-core`: the charge expression
//! language, JSON and CSV report formats, and parallel suite runners.

pub mod expr;
pub mod json;
pub mod run;

pub use expr::{parse_measure, print_measure, ExprError};
