//! Recovery of ridge and radial functions from point queries.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod la;
pub mod models;
pub mod recovery;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
