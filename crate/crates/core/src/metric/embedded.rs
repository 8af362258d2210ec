use super::Metric;
use crate::error::{Error, Result};

/// Exponent of an ℓp norm on ℝᵐ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(PNorm::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(PNorm::Finite(p))
        } else {
            Err(Error::Domain(format!("p must lie in [1, inf], got {p}")))
        }
    }

    /// Strict convexity of the unit ball, i.e. 1 < p < ∞.
    pub fn is_strictly_convex(self) -> bool {
        matches!(self, PNorm::Finite(p) if p > 1.0)
    }

    pub fn norm(self, v: impl Iterator<Item = f64>) -> f64 {
        match self {
            PNorm::Infinity => v.map(f64::abs).fold(0.0, f64::max),
            PNorm::Finite(p) if p == 1.0 => v.map(f64::abs).sum(),
            PNorm::Finite(p) if p == 2.0 => v.map(|t| t * t).sum::<f64>().sqrt(),
            PNorm::Finite(p) => v.map(|t| t.abs().powf(p)).sum::<f64>().powf(1.0 / p),
        }
    }

    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        self.norm(a.iter().zip(b).map(|(s, t)| s - t))
    }
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "{p}"),
            PNorm::Infinity => f.write_str("inf"),
        }
    }
}

/// Points of (ℝᵐ, ‖·‖ₚ) with a distinguished base point.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedPointSet {
    coords: Vec<Vec<f64>>,
    norm: PNorm,
    base: usize,
}

impl EmbeddedPointSet {
    pub fn new(coords: Vec<Vec<f64>>, norm: PNorm, base: usize) -> Result<Self> {
        let dim = coords
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Structure("empty point set".into()))?;
        if dim == 0 {
            return Err(Error::Structure("zero-dimensional coordinates".into()));
        }
        if let Some(i) = coords.iter().position(|c| c.len() != dim) {
            return Err(Error::Structure(format!(
                "point {i} has dimension {}, expected {dim}",
                coords[i].len()
            )));
        }
        if coords.iter().flatten().any(|t| !t.is_finite()) {
            return Err(Error::Structure("non-finite coordinate".into()));
        }
        if base >= coords.len() {
            return Err(Error::Structure(format!("base index {base} out of range")));
        }
        Ok(Self { coords, norm, base })
    }

    /// Regular grid over the axis-aligned box `[lo, hi]` in two dimensions,
    /// `spacing` apart, with the base at the grid point nearest the origin.
    pub fn grid_2d(lo: [f64; 2], hi: [f64; 2], spacing: f64, norm: PNorm) -> Result<Self> {
        if !(spacing > 0.0) || hi[0] < lo[0] || hi[1] < lo[1] {
            return Err(Error::Domain("grid needs spacing > 0 and lo <= hi".into()));
        }
        let steps = |a: f64, b: f64| ((b - a) / spacing + 1e-9).floor() as usize;
        let (nx, ny) = (steps(lo[0], hi[0]), steps(lo[1], hi[1]));
        let mut coords = Vec::with_capacity((nx + 1) * (ny + 1));
        for i in 0..=nx {
            for j in 0..=ny {
                coords.push(vec![lo[0] + i as f64 * spacing, lo[1] + j as f64 * spacing]);
            }
        }
        let origin = vec![0.0, 0.0];
        let base = nearest(&coords, &origin, norm).unwrap_or(0);
        Self::new(coords, norm, base)
    }

    pub fn coords(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    pub fn norm(&self) -> PNorm {
        self.norm
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.norm.is_strictly_convex()
    }

    /// Distance from an arbitrary ambient vector to point `i`.
    pub fn distance_to(&self, i: usize, v: &[f64]) -> f64 {
        self.norm.distance(&self.coords[i], v)
    }

    /// Index of the point closest to `v` (smallest index on ties).
    pub fn nearest(&self, v: &[f64]) -> Option<usize> {
        nearest(&self.coords, v, self.norm)
    }
}

fn nearest(coords: &[Vec<f64>], v: &[f64], norm: PNorm) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in coords.iter().enumerate() {
        let d = norm.distance(c, v);
        if best.is_none_or(|(_, b)| d < b) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

impl Metric for EmbeddedPointSet {
    fn len(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    fn d(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.norm.distance(&self.coords[i], &self.coords[j])
        }
    }
}
