//! Finite-difference solver and scalar optimal-control toolkit for steady
//! heat conduction on a rectangle with mixed Dirichlet/Neumann/Robin
//! boundaries.

pub mod analytic;
pub mod cli;
pub mod fdm;
pub mod metrics;
pub mod model;
pub mod optim;

pub use model::{Error, Result};
