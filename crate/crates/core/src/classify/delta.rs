use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassificationReport, Verdict, Witness};
use crate::error::{domain, Result};
use crate::exec;
use crate::free::{free_norm, slice_min_separation, FreeElement, SliceSpec};
use crate::lipschitz::{f_xy, plateau};
use crate::metric::{lens, lens_diameter, FiniteMetricSpace, Metric};
use crate::tol::Tolerances;

/// Ball-intersection test: `B(x, r+ε) ∩ B(y, d(x,y)−r+ε)` must be nonempty
/// for each radius. Radii default to the realizable distances
/// `{d(x,z)} ∩ (0, d(x,y))`. A failure refutes Δ-pointness; passing proves
/// nothing.
pub fn delta_ball_test(
    space: &FiniteMetricSpace,
    x: usize,
    y: usize,
    radii: Option<&[f64]>,
    eps: f64,
) -> Result<ClassificationReport> {
    space.check_distinct(x, y)?;
    let dxy = space.d(x, y);
    let radii: Vec<f64> = match radii {
        Some(r) => r.to_vec(),
        None => {
            let mut r: Vec<f64> = (0..space.len()).map(|z| space.d(x, z)).filter(|&r| r > 0.0 && r < dxy).collect();
            r.sort_by(f64::total_cmp);
            r.dedup();
            r
        }
    };
    let lenses = exec::map_slice(&radii, |&r| lens(space, x, y, r, eps));
    let mut report = ClassificationReport::new("delta-ball", space, &[x, y]).param("eps", eps);
    report = report.param("radii", radii.len() as f64);
    let (mut smallest, mut widest) = (usize::MAX, 0.0f64);
    for (&r, l) in radii.iter().zip(lenses) {
        let l = l?;
        if l.is_empty() {
            report.witnesses.push(Witness::new("empty-lens", space, &[x, y]).with("r", r).with("eps", eps));
        } else {
            smallest = smallest.min(l.len());
            widest = widest.max(lens_diameter(space, &l).unwrap_or(0.0));
        }
    }
    report.verdict = if report.witnesses.is_empty() { Verdict::Positive } else { Verdict::Negative };
    if report.verdict == Verdict::Positive && !radii.is_empty() {
        report.witnesses.push(
            Witness::new("lens-summary", space, &[x, y])
                .with("radii", radii.len() as f64)
                .with("smallest_lens", smallest as f64)
                .with("largest_diameter", widest),
        );
    }
    report
        .notes
        .push("nonempty lenses are necessary for a delta-point, not sufficient".into());
    Ok(report)
}

/// A slice with the label used in reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedSlice {
    pub name: String,
    pub slice: SliceSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceFamilyOptions {
    pub alpha: f64,
    /// Number of slices from perturbed LP objectives.
    pub random: usize,
    pub seed: u64,
}

impl Default for SliceFamilyOptions {
    fn default() -> Self {
        Self { alpha: 0.1, random: 4, seed: 0 }
    }
}

/// Slices containing `m_{x,y}`:
/// - `certificate`: the LP certificate of `‖m_{x,y}‖`, depth α;
/// - `fxy`: the two-point witness, depth α;
/// - `plateau`: the two-level plateau of width α, depth 2α;
/// - `random-i`: certificates of `m_{x,y} + (α/4)·ν` for random unit
///   combinations `ν` of molecules, depth α.
///
/// Slices that fail to contain `m_{x,y}` are skipped and named in the
/// returned notes.
pub fn builtin_slices(
    space: &FiniteMetricSpace,
    x: usize,
    y: usize,
    opts: &SliceFamilyOptions,
) -> Result<(Vec<NamedSlice>, Vec<String>)> {
    space.check_distinct(x, y)?;
    let alpha = opts.alpha;
    let mxy = FreeElement::molecule(space, x, y)?;
    let mut candidates = vec![
        ("certificate".to_string(), free_norm(space, &mxy)?.certificate, alpha),
        ("fxy".to_string(), f_xy(space, x, y)?, alpha),
    ];
    if alpha < 0.5 {
        candidates.push(("plateau".to_string(), plateau(space, x, y, alpha)?, (2.0 * alpha).min(1.0)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = space.len();
    for i in 0..opts.random {
        let terms = 3.min(n * (n - 1));
        let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let total: f64 = weights.iter().map(|w| w.abs()).sum();
        if total == 0.0 {
            continue;
        }
        weights.iter_mut().for_each(|w| *w /= total);
        let points: Vec<usize> = (0..n).collect();
        let mut nu = FreeElement::zero();
        for w in weights {
            let pair: Vec<usize> = points.choose_multiple(&mut rng, 2).copied().collect();
            nu = nu.add(&FreeElement::molecule(space, pair[0], pair[1])?.scale(w));
        }
        let objective = mxy.add(&nu.scale(alpha / 4.0));
        candidates.push((format!("random-{i}"), free_norm(space, &objective)?.certificate, alpha));
    }

    let mut slices = vec![];
    let mut notes = vec![];
    for (name, f, depth) in candidates {
        match SliceSpec::new(space, &f, depth) {
            Ok(slice) if slice.contains_molecule(space, x, y) => slices.push(NamedSlice { name, slice }),
            Ok(slice) => notes.push(format!(
                "slice {name} skipped: value {} on m_xy is not above 1 - {depth}",
                slice.molecule_value(space, x, y)
            )),
            Err(e) => notes.push(format!("slice {name} skipped: {e}")),
        }
    }
    Ok((slices, notes))
}

/// Slice test at resolution `scale`: negative when some slice containing
/// `m_{x,y}` holds no molecule shorter than `scale`.
pub fn delta_slice_test(
    space: &FiniteMetricSpace,
    x: usize,
    y: usize,
    family: &[NamedSlice],
    scale: f64,
) -> Result<ClassificationReport> {
    space.check_distinct(x, y)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(format!("scale must be positive, got {scale}")));
    }
    if let Some(s) = family.iter().find(|s| !s.slice.contains_molecule(space, x, y)) {
        return Err(domain(format!("slice {} does not contain m_xy", s.name)));
    }
    let mut report = ClassificationReport::new("delta-slice", space, &[x, y]).param("scale", scale);
    let mut refuted = false;
    for named in family {
        let s = &named.slice;
        let value = s.molecule_value(space, x, y);
        let (sep, m) = slice_min_separation(space, s).expect("slice contains m_xy");
        let kind = if sep > scale + Tolerances::TAU {
            refuted = true;
            "slice-refutation"
        } else {
            "short-molecule"
        };
        let mut w = Witness::new(kind, space, &[m.x, m.y])
            .with("alpha", s.alpha())
            .with("min_separation", sep)
            .with("molecule_value", s.molecule_value(space, m.x, m.y))
            .with("value_on_m_xy", value);
        w.kind = format!("{kind}:{}", named.name);
        report.witnesses.push(w);
    }
    report.verdict = if refuted { Verdict::Negative } else { Verdict::Positive };
    report.notes.push(format!(
        "slices: {}",
        family.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(", ")
    ));
    if !refuted {
        report.notes.push(
            "positive means unrefuted at this scale only; a delta-point needs short molecules at every scale".into(),
        );
    }
    Ok(report)
}
