//! Experiment harness: random instances, perturbations, file formats and the
//! command-line front end.

pub mod cli;
pub mod experiments;
pub mod instances;
pub mod io;
pub mod perturb;
