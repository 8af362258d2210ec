use serde::{Deserialize, Serialize};

use super::{constant_on, LipschitzFunction};
use crate::error::{domain, Result};
use crate::metric::{FiniteMetricSpace, Metric};
use crate::tol::Tolerances;

/// Which McShane envelope to build.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Envelope {
    /// `F(p) = min_n f(n) + L·d(p, n)`, the largest L-Lipschitz extension.
    #[default]
    InfConvolution,
    /// `F(p) = max_n f(n) − L·d(p, n)`, the smallest one.
    SupConvolution,
}

fn check_partial(space: &FiniteMetricSpace, partial: &[(usize, f64)], lip: f64) -> Result<()> {
    if partial.is_empty() {
        return Err(domain("cannot extend from an empty set"));
    }
    for &(p, v) in partial {
        space.check_index(p)?;
        if !v.is_finite() {
            return Err(domain(format!("non-finite value at {}", space.name(p))));
        }
    }
    let mut seen: Vec<usize> = partial.iter().map(|&(p, _)| p).collect();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain("a point is listed twice in the partial function"));
    }
    let (c, pair) = constant_on(space, partial);
    if c > lip + Tolerances::TAU {
        let (p, q) = pair.expect("positive constant has a witness");
        return Err(domain(format!(
            "partial function is not {lip}-Lipschitz: slope {c} between {} and {}",
            space.name(p),
            space.name(q)
        )));
    }
    Ok(())
}

/// Extend a function given on a subset to the whole space with constant `lip`.
/// Values on the subset are kept as given (before rebasing at the base point).
pub fn mcshane_extend(
    space: &FiniteMetricSpace,
    partial: &[(usize, f64)],
    lip: f64,
    envelope: Envelope,
) -> Result<LipschitzFunction> {
    if !(lip > 0.0 && lip.is_finite()) {
        return Err(domain(format!("Lipschitz bound must be positive, got {lip}")));
    }
    check_partial(space, partial, lip)?;
    let values = match envelope {
        Envelope::InfConvolution => inf_envelope(space, partial, lip),
        Envelope::SupConvolution => {
            let mut values: Vec<f64> = (0..space.len())
                .map(|p| partial.iter().map(|&(n, f)| f - lip * space.d(p, n)).fold(f64::NEG_INFINITY, f64::max))
                .collect();
            for &(n, f) in partial {
                values[n] = f;
            }
            values
        }
    };
    LipschitzFunction::new(space, values)
}

/// Unchecked inf envelope, exact on the given points.
pub(crate) fn inf_envelope(space: &FiniteMetricSpace, partial: &[(usize, f64)], lip: f64) -> Vec<f64> {
    let mut values: Vec<f64> = (0..space.len())
        .map(|p| partial.iter().map(|&(n, f)| f + lip * space.d(p, n)).fold(f64::INFINITY, f64::min))
        .collect();
    for &(n, f) in partial {
        values[n] = f;
    }
    values
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackExtension {
    pub g: LipschitzFunction,
    /// Value assigned to `u` by the inf formula (before rebasing).
    pub value_u: f64,
    /// Value assigned to `v` by the sup formula (before rebasing).
    pub value_v: f64,
    /// `g(u) − g(v) − d(u,v)`; nonnegative whenever the construction is valid.
    pub margin: f64,
}

/// Starting from a 1-Lipschitz `partial` on `N`, set
/// `g(u) = min_{x∈N} g(x) + c·d(x,u)` and
/// `g(v) = max_{x∈N∪{u}} g(x) − c·d(x,v)`, then complete by McShane at
/// constant `c`. The result satisfies `g(u) − g(v) ≥ d(u,v)`; when `u`
/// and `v` are too far apart relative to `N` for that to hold, this is a
/// domain error naming the pair.
pub fn extend_with_slack(
    space: &FiniteMetricSpace,
    partial: &[(usize, f64)],
    u: usize,
    v: usize,
    c: f64,
) -> Result<SlackExtension> {
    space.check_distinct(u, v)?;
    if !(c >= 1.0 && c.is_finite()) {
        return Err(domain(format!("slack factor must be >= 1, got {c}")));
    }
    if partial.iter().any(|&(p, _)| p == u || p == v) {
        return Err(domain(format!(
            "{} and {} must lie outside the extension domain",
            space.name(u),
            space.name(v)
        )));
    }
    check_partial(space, partial, 1.0)?;

    let value_u = partial
        .iter()
        .map(|&(x, f)| f + c * space.d(x, u))
        .fold(f64::INFINITY, f64::min);
    let value_v = partial
        .iter()
        .map(|&(x, f)| f - c * space.d(x, v))
        .fold(value_u - c * space.d(u, v), f64::max);
    let margin = value_u - value_v - space.d(u, v);
    if margin < -Tolerances::TAU * (1.0 + space.d(u, v)) {
        return Err(domain(format!(
            "slack too small: g({}) - g({}) falls short of d by {}",
            space.name(u),
            space.name(v),
            -margin
        )));
    }

    let mut domain_values = partial.to_vec();
    domain_values.push((u, value_u));
    domain_values.push((v, value_v));
    let g = mcshane_extend(space, &domain_values, c, Envelope::InfConvolution)?;
    Ok(SlackExtension { g, value_u, value_v, margin })
}

/// Two-level plateau between `y` and `x`: `0` on points within `alpha·d(x,y)`
/// of `y`, `(1 − alpha)·d(x,y)` on points within `alpha·d(x,y)` of `x`,
/// McShane-extended (inf envelope) at constant `max(1, slope on the plateaus)`.
pub fn plateau(space: &FiniteMetricSpace, x: usize, y: usize, alpha: f64) -> Result<LipschitzFunction> {
    space.check_distinct(x, y)?;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(domain(format!("plateau width must lie in (0, 1/2), got {alpha}")));
    }
    let d = space.d(x, y);
    let cut = alpha * d;
    let high = (1.0 - alpha) * d;
    let partial: Vec<(usize, f64)> = (0..space.len())
        .filter_map(|p| {
            if space.d(y, p) < cut {
                Some((p, 0.0))
            } else if space.d(x, p) < cut {
                Some((p, high))
            } else {
                None
            }
        })
        .collect();
    let lip = constant_on(space, &partial).0.max(1.0);
    mcshane_extend(space, &partial, lip, Envelope::InfConvolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipschitz::lipschitz_constant;
    use crate::metric::{EmbeddedPointSet, PNorm};

    fn line(k: usize) -> FiniteMetricSpace {
        let coords = (0..=k).map(|i| vec![i as f64 / k as f64]).collect();
        FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap(), None)
            .unwrap()
    }

    #[test]
    fn extension_from_base_is_distance_envelope() {
        let s = line(5);
        let f = mcshane_extend(&s, &[(0, 0.0)], 1.0, Envelope::InfConvolution).unwrap();
        for p in 0..s.len() {
            assert_eq!(f.value(p), s.d(p, 0));
        }
        let g = mcshane_extend(&s, &[(0, 0.0)], 1.0, Envelope::SupConvolution).unwrap();
        for p in 0..s.len() {
            assert_eq!(g.value(p), -s.d(p, 0));
        }
    }

    #[test]
    fn full_domain_is_identity() {
        let s = line(3);
        let vals = [0.0, 0.2, 0.1, 0.3];
        let partial: Vec<_> = vals.iter().copied().enumerate().collect();
        let f = mcshane_extend(&s, &partial, 1.0, Envelope::InfConvolution).unwrap();
        assert_eq!(f.values(), vals);
    }

    #[test]
    fn steep_partial_rejected_with_witness() {
        let s = line(4);
        let err = mcshane_extend(&s, &[(0, 0.0), (1, 1.0)], 1.0, Envelope::InfConvolution).unwrap_err();
        assert!(err.to_string().contains("slope"), "{err}");
    }

    #[test]
    fn slack_from_base_only() {
        let s = line(10);
        let (u, v) = (7, 4);
        let e = extend_with_slack(&s, &[(0, 0.0)], u, v, 1.0).unwrap();
        // g(u) = d(u, 0); g(v) = max(0 − d(0,v), g(u) − d(u,v)) = d(v, 0)
        assert!((e.value_u - 0.7).abs() < 1e-15);
        assert!((e.value_v - 0.4).abs() < 1e-12);
        assert!(e.margin >= -1e-12);
        assert!(lipschitz_constant(&s, &e.g) <= 1.0 + 1e-9);
    }

    #[test]
    fn slack_rejects_points_in_domain() {
        let s = line(3);
        assert!(extend_with_slack(&s, &[(0, 0.0), (2, 0.5)], 2, 1, 1.5).is_err());
        assert!(extend_with_slack(&s, &[(0, 0.0)], 2, 1, 0.5).is_err());
    }

    #[test]
    fn slack_fails_for_a_wide_pair() {
        // N = {0, 10} with f(1.0) = 1: g(5) = 0.5 and g(9) = 0.9 at c = 1
        let s = line(10);
        let err = extend_with_slack(&s, &[(0, 0.0), (10, 1.0)], 5, 9, 1.0).unwrap_err();
        assert!(err.to_string().contains("slack too small"), "{err}");
    }

    #[test]
    fn plateau_on_line_has_slope_in_the_middle() {
        let s = line(20);
        let f = plateau(&s, 20, 0, 0.1).unwrap();
        assert_eq!(f.value(0), 0.0);
        assert!((f.value(20) - 0.9).abs() < 1e-12);
        let l = lipschitz_constant(&s, &f);
        // plateau gap is 0.8 - 2/20 = 0.7 wide on a 20-grid; slope 0.9/0.7
        assert!(l > 1.0);
        assert!((f.slope(&s, 10, 9) - l).abs() < 1e-9);
    }
}
