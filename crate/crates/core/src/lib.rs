//! Norms in Lipschitz-free spaces over finite metric spaces, and
//! certificate-carrying classifiers for Daugavet points, Δ-points and
//! connectable pairs.

pub mod error;
pub mod classify;
pub mod corpus;
pub mod exec;
pub mod free;
pub mod io;
pub mod lipschitz;
pub mod lp;
pub mod metric;
pub mod tol;

pub use error::{Error, Result};
pub use tol::Tolerances;
