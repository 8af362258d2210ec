//! Numerical tolerances shared by every module.

use serde::{Deserialize, Serialize};

/// Tolerance record. Every operation that compares floats takes one of
/// these (usually `&Tolerances::default()`), so callers can override a
/// single threshold without touching the rest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Equality of distances and function values.
    pub tau: f64,
    /// Primal/dual feasibility of LP and transport solutions.
    pub feas: f64,
    /// Optimality gap allowed between the two free-norm routes.
    pub opt: f64,
    /// "Distance equals two" when two LP solves are composed.
    pub dist_two: f64,
}

impl Tolerances {
    pub const TAU: f64 = 1e-9;
    pub const FEAS: f64 = 1e-8;
    pub const OPT: f64 = 1e-7;
    pub const DIST_TWO: f64 = 1e-6;

    pub fn with_opt(mut self, opt: f64) -> Self {
        self.opt = opt;
        self
    }

    pub fn with_feas(mut self, feas: f64) -> Self {
        self.feas = feas;
        self
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau: Self::TAU,
            feas: Self::FEAS,
            opt: Self::OPT,
            dist_two: Self::DIST_TWO,
        }
    }
}
