//! Deterministic generators for the example spaces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::metric::{EmbeddedPointSet, FiniteMetricSpace, PNorm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleKind {
    /// `{−1} ∪ {i/k}` on the real line, base `0`.
    HalflineInterval,
    /// `[0,1]×{0}` sampled at `i/k`, plus `(0,r)` and `(1,r)`; Euclidean, base `(0,0)`.
    Bridge,
    /// Points `x_t`, `t = i/k`, with `d(x_t, x_s) = min{t+s, 2−t−s}`, base `x0`.
    QuotientMetric,
    /// `{i/k}` on the real line, base `0`.
    Interval,
    /// `k` equally spaced points on the unit circle, geodesic distance, base `c0`.
    Circle,
    /// `k` seeded uniform points in the unit square, Euclidean, base `p0`.
    Random,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 6] = [
        Self::HalflineInterval,
        Self::Bridge,
        Self::QuotientMetric,
        Self::Interval,
        Self::Circle,
        Self::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::HalflineInterval => "halfline-interval",
            Self::Bridge => "bridge",
            Self::QuotientMetric => "quotient-metric",
            Self::Interval => "interval",
            Self::Circle => "circle",
            Self::Random => "random",
        }
    }

    pub fn names() -> String {
        Self::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown example {s:?}; known: {}", Self::names())))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub kind: ExampleKind,
    pub k: usize,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
}

impl ExampleSpec {
    pub fn new(kind: ExampleKind, k: usize) -> Self {
        Self { kind, k, params: BTreeMap::new(), seed: 0 }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    pub fn generate(&self) -> Result<FiniteMetricSpace> {
        let k = self.k;
        if k == 0 {
            return Err(domain("resolution k must be positive"));
        }
        if let Some(key) = self.params.keys().find(|key| !(self.kind == ExampleKind::Bridge && *key == "r")) {
            return Err(domain(format!("{} takes no parameter {key:?}", self.kind)));
        }
        match self.kind {
            ExampleKind::HalflineInterval => {
                let mut ts = vec![-1.0];
                ts.extend(grid(k));
                line(ts, 1)
            }
            ExampleKind::Interval => line(grid(k).collect(), 0),
            ExampleKind::Bridge => {
                let r = self.param("r", 0.4);
                if !(r > 0.0 && r < 1.0) {
                    return Err(domain(format!("bridge height r must lie in (0, 1), got {r}")));
                }
                let mut coords: Vec<Vec<f64>> = grid(k).map(|t| vec![t, 0.0]).collect();
                coords.push(vec![0.0, r]);
                coords.push(vec![1.0, r]);
                let names = coords.iter().map(|c| format!("({},{})", num(c[0]), num(c[1]))).collect();
                FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0)?, Some(names))
            }
            ExampleKind::QuotientMetric => {
                let ts: Vec<f64> = grid(k).collect();
                let names = ts.iter().map(|&t| format!("x{}", num(t))).collect();
                let rows = ts
                    .iter()
                    .map(|&t| ts.iter().map(|&s| if t == s { 0.0 } else { (t + s).min(2.0 - t - s) }).collect())
                    .collect();
                FiniteMetricSpace::new(names, rows, 0)
            }
            ExampleKind::Circle => {
                if k < 2 {
                    return Err(domain("a circle needs at least two points"));
                }
                let step = std::f64::consts::TAU / k as f64;
                let names = (0..k).map(|i| format!("c{i}")).collect();
                let rows = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                let gap = i.abs_diff(j);
                                gap.min(k - gap) as f64 * step
                            })
                            .collect()
                    })
                    .collect();
                FiniteMetricSpace::new(names, rows, 0)
            }
            ExampleKind::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let coords = (0..k).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
                FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0)?, None)
            }
        }
    }
}

fn grid(k: usize) -> impl Iterator<Item = f64> {
    (0..=k).map(move |i| i as f64 / k as f64)
}

fn line(ts: Vec<f64>, base: usize) -> Result<FiniteMetricSpace> {
    let names = ts.iter().map(|&t| num(t)).collect();
    let coords = ts.into_iter().map(|t| vec![t]).collect();
    FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), base)?, Some(names))
}

/// Shortest decimal for a grid coordinate: `0.05`, not `0.05000000000000000277`.
pub fn num(t: f64) -> String {
    let s = format!("{t:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".to_string() } else { s.to_string() }
}
