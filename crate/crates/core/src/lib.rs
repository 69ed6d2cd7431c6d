#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod compensated;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod quadrature;
pub mod samplers;
pub mod sparse_approx;
pub mod specfun;

pub use error::{Error, Result};
