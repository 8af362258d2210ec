use serde::{Deserialize, Serialize};

use super::{lipschitz_constant, LipschitzFunction};
use crate::error::{domain, Result};
use crate::exec;
use crate::metric::{FiniteMetricSpace, Metric};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub scale: f64,
    /// Largest `f(m_{u,v})` over pairs with `0 < d(u,v) < scale`; `None`
    /// when no pair is that short.
    pub best_slope: Option<f64>,
    pub best_pair: Option<(usize, usize)>,
    /// Points `t` with some near-optimal short pair inside the open ball
    /// `B(t, scale)`. A pair is near-optimal when `d(u,v) < scale` and
    /// `f(m_{u,v}) > ‖f‖ − scale`.
    pub epsilon_points: Vec<usize>,
    /// `best_slope > ‖f‖ − scale`.
    pub local: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityProfile {
    pub lipschitz_constant: f64,
    pub rows: Vec<ScaleRow>,
}

pub fn locality_profile(space: &FiniteMetricSpace, f: &LipschitzFunction, scales: &[f64]) -> Result<LocalityProfile> {
    if scales.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(domain("scales must be positive"));
    }
    if scales.windows(2).any(|w| w[1] >= w[0]) {
        return Err(domain("scales must be strictly decreasing"));
    }
    let l = lipschitz_constant(space, f);
    let n = space.len();
    let rows = scales
        .iter()
        .map(|&scale| {
            let per_row = exec::map_range(n, |u| {
                let mut best: Option<(f64, (usize, usize))> = None;
                let mut near = Vec::new();
                for v in 0..n {
                    let d = space.d(u, v);
                    if v == u || d >= scale {
                        continue;
                    }
                    let s = f.slope(space, u, v);
                    if best.is_none_or(|(b, _)| s > b) {
                        best = Some((s, (u, v)));
                    }
                    if s > l - scale {
                        near.push((u, v));
                    }
                }
                (best, near)
            });
            let mut best: Option<(f64, (usize, usize))> = None;
            let mut near = Vec::new();
            for (b, pairs) in per_row {
                if let Some((s, p)) = b {
                    if best.is_none_or(|(bs, _)| s > bs) {
                        best = Some((s, p));
                    }
                }
                near.extend(pairs);
            }
            let hits = exec::map_range(n, |t| {
                near.iter().any(|&(u, v)| space.d(t, u) < scale && space.d(t, v) < scale)
            });
            let epsilon_points = hits.into_iter().enumerate().filter_map(|(t, h)| h.then_some(t)).collect();
            ScaleRow {
                scale,
                best_slope: best.map(|b| b.0),
                best_pair: best.map(|b| b.1),
                epsilon_points,
                local: best.is_some_and(|(s, _)| s > l - scale),
            }
        })
        .collect();
    Ok(LocalityProfile { lipschitz_constant: l, rows })
}
