//! Elements of the free space over a finite pointed metric space, the
//! free norm (computed twice, by LP and by transportation), distance-two
//! tests between molecules and slices of the unit ball.

mod norm;
mod slice;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metric::{FiniteMetricSpace, Metric};

pub use norm::{
    distance, free_norm, free_norm_checked, free_norm_with, is_distance_two_pair, is_extreme_molecule,
    transport_norm, DistanceTwo, NormCheck, NormOptions, NormResult,
};
pub use slice::{
    molecules_in_slice, slice_min_separation, sum_norm_lower_bound_check, SliceSpec, SumBound,
};


/// A finitely supported combination `Σ λ_p δ_p`. The base point never
/// appears in the support since `δ_base = 0`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FreeElement {
    coeffs: BTreeMap<usize, f64>,
}

impl FreeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Sums repeated indices, then drops the base point and zero terms.
    pub fn from_terms(space: &FiniteMetricSpace, terms: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (p, c) in terms {
            space.check_index(p)?;
            if !c.is_finite() {
                return Err(crate::Error::Domain(format!("non-finite coefficient at {}", space.name(p))));
            }
            *coeffs.entry(p).or_insert(0.0) += c;
        }
        Ok(Self::normalized(coeffs, space.base()))
    }

    fn normalized(mut coeffs: BTreeMap<usize, f64>, base: usize) -> Self {
        coeffs.remove(&base);
        coeffs.retain(|_, c| *c != 0.0);
        Self { coeffs }
    }

    pub fn delta(space: &FiniteMetricSpace, p: usize) -> Result<Self> {
        Self::from_terms(space, [(p, 1.0)])
    }

    pub fn molecule(space: &FiniteMetricSpace, x: usize, y: usize) -> Result<Self> {
        Molecule::new(space, x, y)?.to_element(space)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.coeffs.iter().map(|(&p, &c)| (p, c))
    }

    pub fn coefficient(&self, p: usize) -> f64 {
        self.coeffs.get(&p).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Sum of coefficients; the base point carries the negative of this in
    /// the balanced transport formulation.
    pub fn total_mass(&self) -> f64 {
        self.coeffs.values().sum()
    }

    fn combine(&self, other: &Self, t: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (&p, &c) in &other.coeffs {
            *coeffs.entry(p).or_insert(0.0) += t * c;
        }
        coeffs.retain(|_, c| *c != 0.0);
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, t: f64) -> Self {
        let mut coeffs: BTreeMap<usize, f64> = self.coeffs.iter().map(|(&p, &c)| (p, t * c)).collect();
        coeffs.retain(|_, c| *c != 0.0);
        Self { coeffs }
    }

    /// Renders as `"1*x - 0.5*y"` with names from `space`.
    pub fn display<'a>(&'a self, space: &'a FiniteMetricSpace) -> impl fmt::Display + 'a {
        DisplayElement { mu: self, space }
    }
}

struct DisplayElement<'a> {
    mu: &'a FreeElement,
    space: &'a FiniteMetricSpace,
}

impl fmt::Display for DisplayElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mu.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.mu.iter().enumerate() {
            let name = self.space.name(p);
            match (i, c < 0.0) {
                (0, false) => write!(f, "{c}*{name}")?,
                (0, true) => write!(f, "-{}*{name}", -c)?,
                (_, false) => write!(f, " + {c}*{name}")?,
                (_, true) => write!(f, " - {}*{name}", -c)?,
            }
        }
        Ok(())
    }
}

/// The ordered pair behind `m_{x,y} = (δ_x − δ_y) / d(x,y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Molecule {
    pub x: usize,
    pub y: usize,
}

impl Molecule {
    pub fn new(space: &FiniteMetricSpace, x: usize, y: usize) -> Result<Self> {
        space.check_distinct(x, y)?;
        Ok(Self { x, y })
    }

    pub fn reversed(self) -> Self {
        Self { x: self.y, y: self.x }
    }

    pub fn length(self, space: &FiniteMetricSpace) -> f64 {
        space.d(self.x, self.y)
    }

    pub fn to_element(self, space: &FiniteMetricSpace) -> Result<FreeElement> {
        let d = space.d(self.x, self.y);
        FreeElement::from_terms(space, [(self.x, 1.0 / d), (self.y, -1.0 / d)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> FiniteMetricSpace {
        let names = vec!["o".into(), "a".into(), "b".into()];
        FiniteMetricSpace::new(names, vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]], 0).unwrap()
    }

    #[test]
    fn base_coefficient_is_dropped() {
        let s = triangle();
        let mu = FreeElement::from_terms(&s, [(0, 3.0), (1, 1.0), (1, 1.0), (2, 0.0)]).unwrap();
        assert_eq!(mu.support(), vec![1]);
        assert_eq!(mu.coefficient(1), 2.0);
        assert!(FreeElement::delta(&s, 0).unwrap().is_zero());
    }

    #[test]
    fn algebra_is_coefficientwise() {
        let s = triangle();
        let a = FreeElement::delta(&s, 1).unwrap();
        let b = FreeElement::delta(&s, 2).unwrap().scale(2.0);
        let c = a.add(&b).sub(&a);
        assert_eq!(c, b);
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.neg().coefficient(1), -1.0);
    }

    #[test]
    fn molecule_reversal_negates() {
        let s = triangle();
        let m = Molecule::new(&s, 1, 2).unwrap();
        let e = m.to_element(&s).unwrap();
        assert_eq!(m.reversed().to_element(&s).unwrap(), e.neg());
        assert_eq!(e.coefficient(1), 0.5);
        assert!(Molecule::new(&s, 1, 1).is_err());
    }

    #[test]
    fn display_uses_names() {
        let s = triangle();
        let mu = FreeElement::from_terms(&s, [(1, 1.0), (2, -0.5)]).unwrap();
        assert_eq!(mu.display(&s).to_string(), "1*a - 0.5*b");
    }
}
