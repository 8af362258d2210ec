use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{constant_on, lipschitz_constant, mcshane_extend, Envelope, LipschitzFunction};
use crate::error::{domain, Result};
use crate::free::{free_norm, FreeElement};
use crate::metric::{FiniteMetricSpace, Metric};
use crate::tol::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FarCase {
    /// `u` lies off the support: `u` and `v` both join the domain.
    Separated,
    /// `u` is a support point (or the base): only `v` joins the domain.
    Anchored,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarFunction {
    pub h_tilde: LipschitzFunction,
    pub case: FarCase,
    /// Lipschitz constant of the prescribed values before scaling.
    pub domain_constant: f64,
    /// `h̃(μ) = g(μ)/(1+ε)`.
    pub value_on_element: f64,
    /// `h̃(m_{u,v}) = −1/(1+ε)`.
    pub value_on_molecule: f64,
}

/// Builds `h̃ = h/(1+ε)` where `h = g` on `supp(μ) ∪ {base, u}` and
/// `h(v) = g(u) + d(u,v)`, McShane-extended at constant `1 + ε`. Then
/// `h̃` stays in the slice `{ f : f(μ) > (1−α)‖μ‖ }` of the unit ball while
/// `h̃(m_{u,v}) = −1/(1+ε)`, so `h̃` is far from any `f` with
/// `f(m_{u,v})` close to 1.
pub fn construct_far_function(
    space: &FiniteMetricSpace,
    g: &LipschitzFunction,
    mu: &FreeElement,
    alpha: f64,
    u: usize,
    v: usize,
    eps: f64,
) -> Result<FarFunction> {
    space.check_distinct(u, v)?;
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain(format!("eps must be positive, got {eps}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if g.len() != space.len() {
        return Err(crate::Error::Structure("function does not match the space".into()));
    }
    let lg = lipschitz_constant(space, g);
    if lg > 1.0 + Tolerances::TAU {
        return Err(domain(format!("g must have norm at most 1, got {lg}")));
    }
    if mu.is_zero() {
        return Err(domain("element must be nonzero"));
    }
    let norm = free_norm(space, mu)?.value;
    let scaled = g.apply(mu) / (1.0 + eps);
    if scaled <= (1.0 - alpha) * norm {
        return Err(domain(format!(
            "g(mu)/(1+eps) = {scaled} does not exceed (1-alpha)*|mu| = {}",
            (1.0 - alpha) * norm
        )));
    }
    let support = mu.support();
    if v == space.base() || support.contains(&v) {
        return Err(domain(format!("{} must lie off the support and the base", space.name(v))));
    }
    let case = if u == space.base() || support.contains(&u) { FarCase::Anchored } else { FarCase::Separated };

    let mut prescribed: BTreeMap<usize, f64> = support.iter().map(|&p| (p, g.value(p))).collect();
    prescribed.insert(space.base(), 0.0);
    prescribed.insert(u, g.value(u));
    prescribed.insert(v, g.value(u) + space.d(u, v));
    let partial: Vec<(usize, f64)> = prescribed.into_iter().collect();

    let lip = 1.0 + eps;
    let (domain_constant, pair) = constant_on(space, &partial);
    if domain_constant > lip + Tolerances::TAU {
        let (p, q) = pair.expect("positive constant has a witness");
        return Err(domain(format!(
            "slope {domain_constant} between {} and {} exceeds 1+eps = {lip}",
            space.name(p),
            space.name(q)
        )));
    }
    let h = mcshane_extend(space, &partial, lip, Envelope::InfConvolution)?;
    let h_tilde = h.scaled(1.0 / lip);
    Ok(FarFunction {
        value_on_element: h_tilde.apply(mu),
        value_on_molecule: h_tilde.slope(space, u, v),
        h_tilde,
        case,
        domain_constant,
    })
}
