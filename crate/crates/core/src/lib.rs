#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harness;
pub mod lp;
pub mod model;
pub mod report;
pub mod setdist;
pub mod stability;
pub mod tolerance;
pub mod transform;
pub mod vecops;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
