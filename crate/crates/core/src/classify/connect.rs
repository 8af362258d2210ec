use serde::{Deserialize, Serialize};

use super::{ClassificationReport, CrossCheck, NamedSlice, Verdict, Witness};
use crate::error::{domain, Result};
use crate::exec;
use crate::metric::{
    is_connectable, lens, lens_diameter, mid_set, segment_in_set, EmbeddedPointSet, FiniteMetricSpace, Metric, Reach,
};
use crate::tol::Tolerances;

/// Connectability of `x` and `y` by a `step`-bounded path of length at most
/// `d(x,y) + eps`. For a connected pair, every slice in `family` gets a
/// step witness: a path step `(p, q)` with `f(m_{q,p}) ≥ (1−α)·d/(d+eps)`.
/// For embedded spaces the straight segment is also probed.
pub fn classify_connectable(
    space: &FiniteMetricSpace,
    x: usize,
    y: usize,
    eps: f64,
    step: f64,
    family: &[NamedSlice],
) -> Result<ClassificationReport> {
    space.check_distinct(x, y)?;
    let c = is_connectable(space, x, y, eps, step)?;
    let mut report = ClassificationReport::new("connectable", space, &[x, y]).param("eps", eps).param("step", step);
    let d = c.distance;
    match &c.reach {
        Reach::Connected { path, length } if c.connectable => {
            let mut w = Witness::new("path", space, path).with("length", *length).with("budget", c.budget);
            w.values.insert("distance".into(), d);
            report.witnesses.push(w);
            let mut worst: f64 = 0.0;
            for named in family {
                let f = named.slice.function();
                let alpha = named.slice.alpha();
                let (mut best, mut at) = (f64::NEG_INFINITY, (y, y));
                for pair in path.windows(2) {
                    let s = f.slope(space, pair[1], pair[0]);
                    if s > best {
                        best = s;
                        at = (pair[0], pair[1]);
                    }
                }
                let bound = (1.0 - alpha) * d / (d + eps);
                worst = worst.max(bound - best);
                let mut w = Witness::new("step-witness", space, &[at.0, at.1])
                    .with("step_slope", best)
                    .with("bound", bound)
                    .with("alpha", alpha);
                w.kind = format!("step-witness:{}", named.name);
                report.witnesses.push(w);
            }
            if !family.is_empty() {
                report.cross_checks.push(CrossCheck::below("step-witness", worst.max(0.0), 2.0 * Tolerances::TAU));
            }
            report.verdict = Verdict::Positive;
        }
        Reach::Connected { length, .. } => {
            report.witnesses.push(
                Witness::new("path-too-long", space, &[x, y])
                    .with("length", *length)
                    .with("budget", c.budget)
                    .with("distance", d),
            );
            report.verdict = Verdict::Negative;
        }
        Reach::Disconnected => {
            report.witnesses.push(Witness::new("disconnected", space, &[x, y]).with("budget", c.budget).with("distance", d));
            report.verdict = Verdict::Negative;
        }
    }

    if let Some(emb) = space.embedding() {
        let samples = ((d / step).ceil() as usize + 1).max(2);
        let cover = segment_in_set(space, x, y, step, samples)?;
        report.witnesses.push(
            Witness::new("segment-coverage", space, &[x, y])
                .with("worst_gap", cover.worst_gap)
                .with("samples", samples as f64)
                .with("covered", if cover.covered { 1.0 } else { 0.0 }),
        );
        if emb.is_strictly_convex() {
            let agree = cover.covered == c.connectable;
            report.cross_checks.push(CrossCheck::below("segment-equivalence", if agree { 0.0 } else { 1.0 }, 1.0));
        }
        if let Some(w) = cover.warning {
            report.notes.push(w);
        }
    }
    report.notes.push(format!(
        "paths use steps of at most {step}; a positive verdict is the discrete form of connectability at this resolution"
    ));
    Ok(report)
}

/// Per-pair midpoint budget for the length-space test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MidBudget {
    /// The same δ for every pair: radius `(1+δ)/2·d(x,y)`.
    Relative(f64),
    /// `δ = 2ε/d(x,y)`: radius `d(x,y)/2 + ε`.
    Absolute(f64),
}

impl MidBudget {
    fn delta(self, d: f64) -> f64 {
        match self {
            MidBudget::Relative(delta) => delta,
            MidBudget::Absolute(eps) => 2.0 * eps / d,
        }
    }
}

/// Positive when `Mid(x, y, δ)` is nonempty for every pair.
pub fn length_space_test(space: &FiniteMetricSpace, budget: MidBudget) -> Result<ClassificationReport> {
    let (key, v) = match budget {
        MidBudget::Relative(d) => ("delta", d),
        MidBudget::Absolute(e) => ("eps", e),
    };
    if !(v > 0.0 && v.is_finite()) {
        return Err(domain(format!("{key} must be positive, got {v}")));
    }
    let pairs = exec::unordered_pairs(space.len());
    let empty = exec::map_slice(&pairs, |&(x, y)| -> Result<bool> {
        Ok(mid_set(space, x, y, budget.delta(space.d(x, y)))?.is_empty())
    });
    let mut report = ClassificationReport::new("length-space", space, &[]).param(key, v);
    for (&(x, y), e) in pairs.iter().zip(empty) {
        if e? {
            let d = space.d(x, y);
            report
                .witnesses
                .push(Witness::new("empty-mid-set", space, &[x, y]).with("distance", d).with("delta", budget.delta(d)));
        }
    }
    report.verdict = if pairs.is_empty() || !report.witnesses.is_empty() { Verdict::Negative } else { Verdict::Positive };
    report.notes.push(format!("{} pair(s) examined", pairs.len()));
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensRow {
    pub n: usize,
    pub eps: f64,
    pub size: usize,
    /// `None` for an empty lens.
    pub diameter: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LensScan {
    pub norm: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub r: f64,
    pub rows: Vec<LensRow>,
    pub strictly_convex: bool,
    pub nonincreasing: bool,
    /// Set for non-strictly-convex norms whose last diameter is still at
    /// least half the first: the lens does not shrink to a point.
    pub plateau: bool,
}

/// Diameters of `B(x, r+1/n) ∩ B(y, ‖x−y‖−r+1/n)` over a dense sample, for
/// increasing `n`.
pub fn lens_diameter_scan(points: &EmbeddedPointSet, x: usize, y: usize, r: f64, n_list: &[usize]) -> Result<LensScan> {
    if n_list.is_empty() || n_list.contains(&0) || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("n_list must be positive and strictly increasing"));
    }
    let rows = n_list
        .iter()
        .map(|&n| {
            let eps = 1.0 / n as f64;
            let set = lens(points, x, y, r, eps)?;
            Ok(LensRow { n, eps, size: set.len(), diameter: lens_diameter(points, &set) })
        })
        .collect::<Result<Vec<_>>>()?;
    let diam: Vec<f64> = rows.iter().map(|r| r.diameter.unwrap_or(0.0)).collect();
    let nonincreasing = diam.windows(2).all(|w| w[1] <= w[0] + Tolerances::TAU);
    let strictly_convex = points.is_strictly_convex();
    let plateau = !strictly_convex && diam.last().copied().unwrap_or(0.0) >= 0.5 * diam[0] && diam[0] > 0.0;
    Ok(LensScan {
        norm: points.norm().to_string(),
        x: points.point(x).to_vec(),
        y: points.point(y).to_vec(),
        r,
        rows,
        strictly_convex,
        nonincreasing,
        plateau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{builtin_slices, SliceFamilyOptions};
    use crate::corpus::{ExampleKind, ExampleSpec};
    use crate::metric::PNorm;

    #[test]
    fn bridge_base_pair_connects_top_pair_does_not() {
        let k = 10;
        let s = ExampleSpec::new(ExampleKind::Bridge, k).generate().unwrap();
        let step = 1.0 / k as f64;
        let (x, y) = (s.index_of("(1,0)").unwrap(), s.index_of("(0,0)").unwrap());
        let (family, _) = builtin_slices(&s, x, y, &SliceFamilyOptions::default()).unwrap();
        let r = classify_connectable(&s, x, y, 0.0, step, &family).unwrap();
        assert_eq!(r.verdict, Verdict::Positive, "{}", r.to_table());
        assert!(r.all_checks_passed(), "{}", r.to_table());
        assert_eq!(r.witnesses[0].points.len(), k + 1);

        let (u, v) = (s.index_of("(1,0.4)").unwrap(), s.index_of("(0,0.4)").unwrap());
        let r = classify_connectable(&s, u, v, 0.1, step, &[]).unwrap();
        assert_eq!(r.verdict, Verdict::Negative);
        assert!(r.all_checks_passed());
        let r = classify_connectable(&s, u, v, 0.1, 0.4, &[]).unwrap();
        assert_eq!(r.witnesses[0].kind, "path-too-long");
        assert!((r.witnesses[0].value("length").unwrap() - 1.8).abs() < 1e-12);
    }

    #[test]
    fn adjacent_points_connect_directly() {
        let s = ExampleSpec::new(ExampleKind::Interval, 4).generate().unwrap();
        let r = classify_connectable(&s, 1, 0, 0.0, 0.25, &[]).unwrap();
        assert_eq!(r.verdict, Verdict::Positive);
    }

    #[test]
    fn length_test_on_corpus() {
        let c = ExampleSpec::new(ExampleKind::Circle, 32).generate().unwrap();
        let step = std::f64::consts::TAU / 32.0;
        assert!(length_space_test(&c, MidBudget::Absolute(step)).unwrap().is_positive());
        let h = ExampleSpec::new(ExampleKind::HalflineInterval, 10).generate().unwrap();
        let r = length_space_test(&h, MidBudget::Absolute(0.1)).unwrap();
        assert_eq!(r.verdict, Verdict::Negative);
        assert!(r.witnesses.iter().any(|w| w.points == ["-1", "0"]));
        let two = FiniteMetricSpace::new(vec!["a".into(), "b".into()], vec![vec![0.0, 1.0], vec![1.0, 0.0]], 0).unwrap();
        assert_eq!(length_space_test(&two, MidBudget::Relative(0.5)).unwrap().verdict, Verdict::Negative);
    }

    #[test]
    fn lens_scans() {
        let grid = EmbeddedPointSet::grid_2d([-2.0, -2.0], [2.0, 2.0], 0.05, PNorm::Finite(2.0)).unwrap();
        let (x, y) = (grid.nearest(&[-1.0, 0.0]).unwrap(), grid.nearest(&[1.0, 0.0]).unwrap());
        let scan = lens_diameter_scan(&grid, x, y, 1.0, &[4, 16, 64]).unwrap();
        assert!(scan.nonincreasing);
        assert!(!scan.plateau);
        let sup = EmbeddedPointSet::grid_2d([-2.0, -2.0], [2.0, 2.0], 0.05, PNorm::Infinity).unwrap();
        let scan = lens_diameter_scan(&sup, x, y, 1.0, &[4, 16, 64]).unwrap();
        assert!(scan.plateau);
        assert!(lens_diameter_scan(&sup, x, y, 1.0, &[4, 4]).is_err());
    }
}
