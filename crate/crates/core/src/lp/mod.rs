//! Small dense LP and transportation solvers.
//!
//! The two algorithms share no code: [`solve_lp`] is a tableau simplex,
//! [`solve_transportation`] is successive shortest augmenting paths. Every
//! free norm can therefore be computed twice and compared.

mod simplex;
mod transport;

use serde::{Deserialize, Serialize};

pub use simplex::{solve_lp, solve_lp_with, LpOptions};
pub use transport::{solve_transportation, TransportPlan, TransportationInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize objective·x` subject to the constraints and per-variable
/// bounds (`None` means `(-inf, inf)` for every variable).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self { objective, ..Self::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn le(self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.constrain(coeffs, Relation::Le, rhs)
    }

    pub fn ge(self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.constrain(coeffs, Relation::Ge, rhs)
    }

    pub fn eq(self, coeffs: Vec<f64>, rhs: f64) -> Self {
        self.constrain(coeffs, Relation::Eq, rhs)
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = Some(bounds);
        self
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        if let Some(b) = &self.bounds {
            for (&(lo, hi), &v) in b.iter().zip(x) {
                worst = worst.max(lo - v).max(v - hi);
            }
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration cap reached before optimality was proven.
    Stalled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; NaN unless `status` is `Optimal`.
    pub value: f64,
    /// Optimizer; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final tableau, when requested through [`LpOptions::record_tableau`].
    pub tableau: Option<String>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn into_optimal(self) -> crate::Result<Self> {
        if self.is_optimal() {
            Ok(self)
        } else {
            Err(crate::Error::Solver { status: self.status })
        }
    }
}
