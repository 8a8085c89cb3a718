// `!(x >= 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Published coefficients and reference values keep all their digits.
#![allow(clippy::excessive_precision)]

pub mod bounds;
pub mod channel;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod special;
pub mod sweep;

pub use error::{Error, Result};
