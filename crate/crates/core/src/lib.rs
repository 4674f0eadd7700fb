#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod channel;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod metrics;
pub mod montecarlo;
pub mod quad;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
