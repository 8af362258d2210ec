use serde::{Deserialize, Serialize};

use super::{FiniteMetricSpace, Metric};
use crate::error::{domain, Result};
use crate::tol::Tolerances;

const TAU: f64 = Tolerances::TAU;

/// Outcome of a step-bounded shortest path search. Being unreachable is an
/// ordinary answer, not an error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reach {
    /// `path` runs from `y` to `x`; consecutive points are within `step`.
    Connected { path: Vec<usize>, length: f64 },
    Disconnected,
}

impl Reach {
    pub fn length(&self) -> Option<f64> {
        match self {
            Reach::Connected { length, .. } => Some(*length),
            Reach::Disconnected => None,
        }
    }
}

/// Dijkstra from `y` over the graph whose edges are pairs at distance at
/// most `step`. Ties resolve to the smallest index.
pub fn shortest_constrained_path(space: &FiniteMetricSpace, x: usize, y: usize, step: f64) -> Result<Reach> {
    space.check_index(x)?;
    space.check_index(y)?;
    if !(step > 0.0) {
        return Err(domain(format!("step must be positive, got {step}")));
    }
    let n = space.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    dist[y] = 0.0;
    loop {
        let mut cur = None;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && cur.is_none_or(|c: usize| dist[v] < dist[c]) {
                cur = Some(v);
            }
        }
        let Some(c) = cur else { break };
        if c == x {
            break;
        }
        done[c] = true;
        let row = space.row(c);
        for v in 0..n {
            if done[v] || v == c || row[v] > step + TAU {
                continue;
            }
            let alt = dist[c] + row[v];
            if alt < dist[v] {
                dist[v] = alt;
                prev[v] = c;
            }
        }
    }
    if !dist[x].is_finite() {
        return Ok(Reach::Disconnected);
    }
    let mut path = vec![x];
    let mut cur = x;
    while cur != y {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    Ok(Reach::Connected { path, length: dist[x] })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Connectability {
    pub connectable: bool,
    pub distance: f64,
    pub budget: f64,
    pub reach: Reach,
}

/// Discrete connectability: a `step`-bounded path from `y` to `x` whose
/// length is at most `d(x,y) + eps`.
pub fn is_connectable(space: &FiniteMetricSpace, x: usize, y: usize, eps: f64, step: f64) -> Result<Connectability> {
    if !(eps >= 0.0) {
        return Err(domain(format!("eps must be nonnegative, got {eps}")));
    }
    let reach = shortest_constrained_path(space, x, y, step)?;
    let distance = space.d(x, y);
    let budget = distance + eps;
    let connectable = x != y && reach.length().is_some_and(|l| l <= budget + TAU);
    Ok(Connectability { connectable, distance, budget, reach })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentCoverage {
    pub covered: bool,
    /// Largest distance from a sample on the segment to the point set.
    pub worst_gap: f64,
    pub samples: usize,
    pub warning: Option<String>,
}

/// Whether the straight segment between points `x` and `y` of the embedded
/// set is covered by the set at tolerance `tol`, probing `n_samples`
/// equispaced convex combinations.
pub fn segment_in_set(space: &FiniteMetricSpace, x: usize, y: usize, tol: f64, n_samples: usize) -> Result<SegmentCoverage> {
    let emb = space
        .embedding()
        .ok_or_else(|| domain("segment containment needs an embedded point set"))?;
    space.check_index(x)?;
    space.check_index(y)?;
    if !(tol > 0.0) || n_samples < 2 {
        return Err(domain("need tol > 0 and at least two samples"));
    }
    let warning = (!emb.is_strictly_convex()).then(|| {
        format!(
            "ambient l{} norm is not strictly convex; segment containment is not known to be equivalent there",
            emb.norm()
        )
    });
    let (a, b) = (emb.point(x), emb.point(y));
    let mut worst_gap: f64 = 0.0;
    let mut sample = vec![0.0; a.len()];
    for s in 0..n_samples {
        let t = s as f64 / (n_samples - 1) as f64;
        for (k, v) in sample.iter_mut().enumerate() {
            *v = (1.0 - t) * a[k] + t * b[k];
        }
        let gap = (0..emb.len()).map(|i| emb.distance_to(i, &sample)).fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(gap);
    }
    Ok(SegmentCoverage { covered: worst_gap <= tol + TAU, worst_gap, samples: n_samples, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{EmbeddedPointSet, PNorm};

    fn grid(k: usize) -> FiniteMetricSpace {
        let coords = (0..=k).map(|i| vec![i as f64 / k as f64]).collect();
        let e = EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap();
        FiniteMetricSpace::from_embedded(e, None).unwrap()
    }

    #[test]
    fn collinear_grid_path() {
        let k = 10;
        let s = grid(k);
        let r = shortest_constrained_path(&s, k, 0, 1.0 / k as f64).unwrap();
        match r {
            Reach::Connected { path, length } => {
                assert_eq!(path, (0..=k).collect::<Vec<_>>());
                assert!((length - 1.0).abs() < 1e-12);
            }
            Reach::Disconnected => panic!("grid is connected"),
        }
        let c = is_connectable(&s, k, 0, 0.0, 1.0 / k as f64).unwrap();
        assert!(c.connectable);
    }

    #[test]
    fn clusters_disconnect() {
        let coords = vec![vec![0.0], vec![0.1], vec![5.0], vec![5.1]];
        let e = EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap();
        let s = FiniteMetricSpace::from_embedded(e, None).unwrap();
        assert_eq!(shortest_constrained_path(&s, 3, 0, 0.5).unwrap(), Reach::Disconnected);
        assert!(!is_connectable(&s, 3, 0, 100.0, 0.5).unwrap().connectable);
        assert!(shortest_constrained_path(&s, 3, 0, 0.0).is_err());
    }

    #[test]
    fn two_points_need_a_long_step() {
        let s = FiniteMetricSpace::new(vec!["x".into(), "y".into()], vec![vec![0., 1.], vec![1., 0.]], 0)
            .unwrap();
        assert!(!is_connectable(&s, 0, 1, 10.0, 0.9).unwrap().connectable);
        assert!(is_connectable(&s, 0, 1, 0.0, 1.0).unwrap().connectable);
    }

    #[test]
    fn adjacent_samples_cover() {
        let s = grid(4);
        let c = segment_in_set(&s, 1, 2, 1e-6, 2).unwrap();
        assert!(c.covered);
        assert!(c.warning.is_none());
    }

    #[test]
    fn sup_norm_warns() {
        let e = EmbeddedPointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], PNorm::Infinity, 0).unwrap();
        let s = FiniteMetricSpace::from_embedded(e, None).unwrap();
        let c = segment_in_set(&s, 0, 1, 0.6, 3).unwrap();
        assert!(c.covered);
        assert!(c.warning.is_some());
    }
}
