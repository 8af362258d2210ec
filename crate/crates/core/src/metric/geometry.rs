use serde::{Deserialize, Serialize};

use super::{FiniteMetricSpace, Metric};
use crate::error::{domain, Result};
use crate::exec;
use crate::tol::Tolerances;

const TAU: f64 = Tolerances::TAU;

/// A pair `x ≠ y` with the discretization slack `eta` used when deciding
/// segment membership and the separation cutoff `h` below which pairs are
/// treated as grid neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentQuery {
    pub x: usize,
    pub y: usize,
    pub eta: f64,
    pub h: f64,
}

impl SegmentQuery {
    pub fn new(space: &FiniteMetricSpace, x: usize, y: usize, eta: f64, h: f64) -> Result<Self> {
        space.check_distinct(x, y)?;
        check_nonneg("eta", eta)?;
        check_nonneg("h", h)?;
        Ok(Self { x, y, eta, h })
    }
}

fn check_nonneg(what: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be a finite nonnegative number, got {v}")))
    }
}

fn check_pair<M: Metric + ?Sized>(m: &M, x: usize, y: usize) -> Result<()> {
    if x >= m.len() || y >= m.len() {
        return Err(domain("point index out of range"));
    }
    if x == y {
        return Err(domain("segment endpoints must be distinct"));
    }
    Ok(())
}

/// `[x, y]_η = { z : d(x,z) + d(z,y) ≤ d(x,y) + η }`, ascending indices.
pub fn metric_segment<M: Metric + ?Sized>(m: &M, x: usize, y: usize, eta: f64) -> Result<Vec<usize>> {
    check_pair(m, x, y)?;
    check_nonneg("eta", eta)?;
    let dxy = m.d(x, y);
    Ok((0..m.len())
        .filter(|&z| z == x || z == y || m.d(x, z) + m.d(z, y) <= dxy + eta + TAU)
        .collect())
}

/// Unordered pairs `(u, v)`, `u < v`, with `d(u,v) > h` whose η-segment is
/// exactly `{u, v}`. Lexicographic by index.
pub fn trivial_segment_pairs<M: Metric + ?Sized>(m: &M, eta: f64, h: f64) -> Result<Vec<(usize, usize)>> {
    check_nonneg("eta", eta)?;
    check_nonneg("h", h)?;
    let n = m.len();
    let pairs = exec::unordered_pairs(n);
    let keep = exec::map_slice(&pairs, |&(u, v)| {
        let duv = m.d(u, v);
        duv > h + TAU
            && (0..n).all(|z| z == u || z == v || m.d(u, z) + m.d(z, v) > duv + eta + TAU)
    });
    Ok(pairs.into_iter().zip(keep).filter_map(|(p, k)| k.then_some(p)).collect())
}

/// `Mid(x,y,δ) = B(x, (1+δ)/2·d) ∩ B(y, (1+δ)/2·d)` with closed balls.
pub fn mid_set<M: Metric + ?Sized>(m: &M, x: usize, y: usize, delta: f64) -> Result<Vec<usize>> {
    check_pair(m, x, y)?;
    check_nonneg("delta", delta)?;
    let radius = 0.5 * (1.0 + delta) * m.d(x, y);
    Ok((0..m.len())
        .filter(|&z| m.d(x, z) <= radius + TAU && m.d(y, z) <= radius + TAU)
        .collect())
}

/// `B(x, r + ε) ∩ B(y, d(x,y) − r + ε)` with closed balls, for `0 < r < d(x,y)`.
pub fn lens<M: Metric + ?Sized>(m: &M, x: usize, y: usize, r: f64, eps: f64) -> Result<Vec<usize>> {
    check_pair(m, x, y)?;
    check_nonneg("eps", eps)?;
    let dxy = m.d(x, y);
    if !(r > 0.0 && r < dxy) {
        return Err(domain(format!("radius {r} outside (0, {dxy})")));
    }
    let (rx, ry) = (r + eps + TAU, dxy - r + eps + TAU);
    let hits = exec::map_range(m.len(), |z| m.d(x, z) <= rx && m.d(y, z) <= ry);
    Ok(hits.into_iter().enumerate().filter_map(|(z, h)| h.then_some(z)).collect())
}

/// Largest pairwise distance within `points`; `None` marks the empty set.
pub fn lens_diameter<M: Metric + ?Sized>(m: &M, points: &[usize]) -> Option<f64> {
    if points.is_empty() {
        return None;
    }
    let row_max = exec::map_range(points.len(), |a| {
        points[a + 1..]
            .iter()
            .map(|&q| m.d(points[a], q))
            .fold(0.0, f64::max)
    });
    Some(row_max.into_iter().fold(0.0, f64::max))
}
