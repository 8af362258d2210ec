use serde::{Deserialize, Serialize};

use super::{free_norm, FreeElement, Molecule};
use crate::error::{domain, Result};
use crate::exec;
use crate::lipschitz::{lipschitz_constant, LipschitzFunction};
use crate::metric::{FiniteMetricSpace, Metric};
use crate::tol::Tolerances;

/// `S(f, α) = { μ : ‖μ‖ ≤ 1, f(μ) > 1 − α }` with `f` rescaled to norm one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    f: LipschitzFunction,
    alpha: f64,
}

impl SliceSpec {
    pub fn new(space: &FiniteMetricSpace, f: &LipschitzFunction, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain(format!("slice depth must lie in (0, 1], got {alpha}")));
        }
        let l = lipschitz_constant(space, f);
        if l <= Tolerances::TAU {
            return Err(domain("cannot slice with a constant function"));
        }
        Ok(Self { f: f.scaled(1.0 / l), alpha })
    }

    pub fn function(&self) -> &LipschitzFunction {
        &self.f
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn molecule_value(&self, space: &FiniteMetricSpace, x: usize, y: usize) -> f64 {
        self.f.slope(space, x, y)
    }

    pub fn contains_molecule(&self, space: &FiniteMetricSpace, x: usize, y: usize) -> bool {
        x != y && self.molecule_value(space, x, y) > 1.0 - self.alpha
    }

    pub fn contains(&self, space: &FiniteMetricSpace, mu: &FreeElement) -> Result<bool> {
        if self.f.apply(mu) <= 1.0 - self.alpha {
            return Ok(false);
        }
        Ok(free_norm(space, mu)?.value <= 1.0 + Tolerances::TAU)
    }
}

/// Every molecule `m_{u,v}` in the slice, ordered by `(u, v)`.
pub fn molecules_in_slice(space: &FiniteMetricSpace, slice: &SliceSpec) -> Vec<Molecule> {
    let n = space.len();
    exec::map_range(n, |u| {
        (0..n)
            .filter(|&v| slice.contains_molecule(space, u, v))
            .map(|v| Molecule { x: u, y: v })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Shortest molecule in the slice with its pair; `None` when the slice
/// holds no molecule.
pub fn slice_min_separation(space: &FiniteMetricSpace, slice: &SliceSpec) -> Option<(f64, Molecule)> {
    let n = space.len();
    exec::map_range(n, |u| {
        (0..n)
            .filter(|&v| slice.contains_molecule(space, u, v))
            .map(|v| (space.d(u, v), Molecule { x: u, y: v }))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    })
    .into_iter()
    .flatten()
    .min_by(|a, b| a.0.total_cmp(&b.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumBound {
    /// Minimum pairwise distance of `supp(μ) ∪ {base}`.
    pub theta: f64,
    pub bound: f64,
    pub actual: f64,
    pub holds: bool,
}

/// Compares `‖μ + m_{u,v}‖` with `2(1 − 1/n)` for a unit `μ` whose support
/// (with the base) is `θ`-separated and `d(u,v) ≤ θ/(2n)`.
pub fn sum_norm_lower_bound_check(
    space: &FiniteMetricSpace,
    mu: &FreeElement,
    u: usize,
    v: usize,
    n: usize,
    tol: &Tolerances,
) -> Result<SumBound> {
    space.check_distinct(u, v)?;
    if n < 2 {
        return Err(domain(format!("n must be at least 2, got {n}")));
    }
    let mut nodes = mu.support();
    nodes.push(space.base());
    let mut theta = f64::INFINITY;
    for (a, &p) in nodes.iter().enumerate() {
        for &q in &nodes[a + 1..] {
            theta = theta.min(space.d(p, q));
        }
    }
    if !theta.is_finite() {
        return Err(domain("element must be nonzero"));
    }
    let limit = theta / (2.0 * n as f64);
    if space.d(u, v) > limit + Tolerances::TAU {
        return Err(domain(format!(
            "d(u,v) = {} exceeds theta/(2n) = {limit} with theta = {theta}",
            space.d(u, v)
        )));
    }
    let norm = free_norm(space, mu)?.value;
    if (norm - 1.0).abs() > tol.opt {
        return Err(domain(format!("element must have norm 1, got {norm}")));
    }
    let m = FreeElement::molecule(space, u, v)?;
    let actual = free_norm(space, &mu.add(&m))?.value;
    let bound = 2.0 * (1.0 - 1.0 / n as f64);
    Ok(SumBound { theta, bound, actual, holds: actual >= bound - tol.opt })
}
