//! Lipschitz functions on a finite pointed metric space: constants,
//! McShane extensions, the slack-inflated extension used to push molecules
//! apart, the two-point witness `f_xy`, locality profiles and the far
//! function construction for weak-star slices.

mod extend;
mod far;
mod locality;

use serde::{Deserialize, Serialize};

use crate::exec;
use crate::free::FreeElement;
use crate::metric::{FiniteMetricSpace, Metric};

pub(crate) use extend::inf_envelope;
pub use extend::{extend_with_slack, mcshane_extend, plateau, Envelope, SlackExtension};
pub use far::{construct_far_function, FarCase, FarFunction};
pub use locality::{locality_profile, LocalityProfile, ScaleRow};

/// A real function on the points of a space, vanishing at the base point.
/// Values are kept unshifted alongside the base value, so differences and
/// slopes never pick up rounding from the rebase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzFunction {
    raw: Vec<f64>,
    shift: f64,
}

impl LipschitzFunction {
    /// Subtracts `values[base]` so the result lies in Lip₀.
    pub fn new(space: &FiniteMetricSpace, values: Vec<f64>) -> crate::Result<Self> {
        if values.len() != space.len() {
            return Err(crate::Error::Structure(format!(
                "{} values for {} points",
                values.len(),
                space.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(crate::Error::Domain("function values must be finite".into()));
        }
        let shift = values[space.base()];
        Ok(Self::rebased(values, shift))
    }

    fn rebased(raw: Vec<f64>, shift: f64) -> Self {
        Self { raw, shift }
    }

    /// `d(·, p) − d(base, p)`, a norm-one function peaking away from `p`.
    pub fn distance_to(space: &FiniteMetricSpace, p: usize) -> Self {
        let values = (0..space.len()).map(|t| space.d(t, p)).collect();
        Self::rebased(values, space.d(space.base(), p))
    }

    pub fn zero(space: &FiniteMetricSpace) -> Self {
        Self { raw: vec![0.0; space.len()], shift: 0.0 }
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.raw.iter().map(|v| v - self.shift).collect()
    }

    pub fn value(&self, p: usize) -> f64 {
        self.raw[p] - self.shift
    }

    /// Pairing `⟨f, μ⟩ = Σ λ_p f(p)`.
    pub fn apply(&self, mu: &FreeElement) -> f64 {
        let (s, mass) = mu.iter().fold((0.0, 0.0), |(s, m), (p, c)| (s + c * self.raw[p], m + c));
        s - mass * self.shift
    }

    /// `f(m_{x,y}) = (f(x) − f(y)) / d(x,y)`.
    pub fn slope(&self, space: &FiniteMetricSpace, x: usize, y: usize) -> f64 {
        (self.raw[x] - self.raw[y]) / space.d(x, y)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { raw: self.raw.iter().map(|v| v * t).collect(), shift: self.shift * t }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            raw: self.raw.iter().zip(&other.raw).map(|(a, b)| a - b).collect(),
            shift: self.shift - other.shift,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            raw: self.raw.iter().zip(&other.raw).map(|(a, b)| a + b).collect(),
            shift: self.shift + other.shift,
        }
    }
}

/// Exact Lipschitz constant over all pairs, with a pair attaining it.
pub fn lipschitz_constant_witness(space: &FiniteMetricSpace, f: &LipschitzFunction) -> (f64, Option<(usize, usize)>) {
    let n = space.len();
    let rows = exec::map_range(n, |i| {
        let mut best = (0.0, None);
        for j in i + 1..n {
            let s = (f.raw[i] - f.raw[j]).abs() / space.d(i, j);
            if s > best.0 {
                best = (s, Some((i, j)));
            }
        }
        best
    });
    rows.into_iter().fold((0.0, None), |acc, r| if r.0 > acc.0 { r } else { acc })
}

pub fn lipschitz_constant(space: &FiniteMetricSpace, f: &LipschitzFunction) -> f64 {
    lipschitz_constant_witness(space, f).0
}

/// Largest Lipschitz ratio among pairs drawn from `points`.
pub(crate) fn constant_on(space: &FiniteMetricSpace, points: &[(usize, f64)]) -> (f64, Option<(usize, usize)>) {
    let mut best = (0.0, None);
    for (a, &(p, fp)) in points.iter().enumerate() {
        for &(q, fq) in &points[a + 1..] {
            if p == q {
                continue;
            }
            let s = (fp - fq).abs() / space.d(p, q);
            if s > best.0 {
                best = (s, Some((p, q)));
            }
        }
    }
    best
}

/// Raw two-point witness `(d(x,y)/2)·(d(t,y) − d(t,x)) / (d(t,y) + d(t,x))`.
pub fn f_xy_raw(space: &FiniteMetricSpace, x: usize, y: usize, t: usize) -> f64 {
    let (dy, dx) = (space.d(t, y), space.d(t, x));
    0.5 * space.d(x, y) * ((dy - dx) / (dy + dx))
}

/// The two-point witness rebased to vanish at the base point. Takes the
/// value 1 on the molecule `m_{x,y}` exactly.
pub fn f_xy(space: &FiniteMetricSpace, x: usize, y: usize) -> crate::Result<LipschitzFunction> {
    space.check_distinct(x, y)?;
    let values: Vec<f64> = (0..space.len()).map(|t| f_xy_raw(space, x, y, t)).collect();
    let shift = values[space.base()];
    Ok(LipschitzFunction::rebased(values, shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{EmbeddedPointSet, PNorm};

    fn line(k: usize) -> FiniteMetricSpace {
        let coords = (0..=k).map(|i| vec![i as f64 / k as f64]).collect();
        FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap(), None)
            .unwrap()
    }

    #[test]
    fn constants_of_simple_functions() {
        let s = line(10);
        let dist = LipschitzFunction::distance_to(&s, s.base());
        assert!((lipschitz_constant(&s, &dist) - 1.0).abs() < 1e-12);
        let zero = LipschitzFunction::zero(&s);
        assert_eq!(lipschitz_constant(&s, &zero), 0.0);
        assert_eq!(lipschitz_constant_witness(&s, &zero).1, None);
    }

    #[test]
    fn construction_rebases() {
        let s = line(2);
        let f = LipschitzFunction::new(&s, vec![3.0, 4.0, 5.0]).unwrap();
        assert_eq!(f.values(), vec![0.0, 1.0, 2.0]);
        assert!(LipschitzFunction::new(&s, vec![1.0]).is_err());
    }

    #[test]
    fn f_xy_endpoint_values() {
        let s = line(4);
        let (x, y) = (3, 1);
        let d = s.d(x, y);
        assert!((f_xy_raw(&s, x, y, x) - d / 2.0).abs() < 1e-15);
        assert!((f_xy_raw(&s, x, y, y) + d / 2.0).abs() < 1e-15);
        // point 2 is equidistant from 1 and 3
        assert_eq!(f_xy_raw(&s, x, y, 2), 0.0);
        let f = f_xy(&s, x, y).unwrap();
        assert_eq!(f.slope(&s, x, y), 1.0);
        assert_eq!(f.value(s.base()), 0.0);
        assert!(f_xy(&s, 1, 1).is_err());
    }
}
