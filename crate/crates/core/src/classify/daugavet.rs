use super::{ClassificationReport, CrossCheck, Verdict, Witness};
use crate::error::{domain, Result};
use crate::exec;
use crate::free::{distance, free_norm, free_norm_checked, is_distance_two_pair, FreeElement};
use crate::metric::{trivial_segment_pairs, FiniteMetricSpace};
use crate::tol::Tolerances;

const DENTING_NOTE: &str = "denting points of the unit ball are taken to be the molecules m_{u,v} over pairs \
with d(u,v) > h whose eta-segment is {u,v}; on a finite space extreme, preserved extreme and denting \
molecules coincide";

fn resolution_note(eta: f64, h: f64) -> String {
    format!("segment slack eta = {eta}, separation cutoff h = {h}")
}

/// `m_{x,y}` is a Daugavet point iff `d(x,y) + d(u,v) ≤ min{d(x,u)+d(y,v), d(x,v)+d(y,u)}`
/// for every denting pair `(u,v)`. Each pair is also checked by LP:
/// `‖m_{x,y} ± m_{u,v}‖ = 2`. Disagreement makes the verdict inconclusive.
pub fn classify_daugavet_molecule(
    space: &FiniteMetricSpace,
    x: usize,
    y: usize,
    eta: f64,
    h: f64,
    tol: &Tolerances,
) -> Result<ClassificationReport> {
    space.check_distinct(x, y)?;
    let pairs = trivial_segment_pairs(space, eta, h)?;
    let mxy = FreeElement::molecule(space, x, y)?;
    let rows = exec::map_slice(&pairs, |&(u, v)| -> Result<_> {
        let crit = is_distance_two_pair(space, (x, y), (u, v))?;
        let muv = FreeElement::molecule(space, u, v)?;
        let sum = distance(space, &mxy, &muv.neg())?;
        let diff = distance(space, &mxy, &muv)?;
        Ok((u, v, crit, sum, diff))
    });

    let mut report = ClassificationReport::new("daugavet-molecule", space, &[x, y]).param("eta", eta).param("h", h);
    let (mut failing, mut disagree, mut lp_residual) = (vec![], vec![], 0.0f64);
    for row in rows {
        let (u, v, crit, sum, diff) = row?;
        let lp_two = (sum - 2.0).abs() < tol.dist_two && (diff - 2.0).abs() < tol.dist_two;
        if crit.holds {
            lp_residual = lp_residual.max((sum - 2.0).abs()).max((diff - 2.0).abs());
        }
        let w = Witness::new("denting-pair", space, &[u, v])
            .with("lhs", crit.lhs)
            .with("rhs", crit.rhs())
            .with("rhs_sum", crit.rhs_sum)
            .with("rhs_difference", crit.rhs_difference)
            .with("lp_sum_norm", sum)
            .with("lp_difference_norm", diff);
        if crit.holds != lp_two {
            disagree.push(Witness { kind: "criteria-disagree".into(), ..w });
        } else if !crit.holds {
            failing.push(Witness { kind: "distance-two-violation".into(), ..w });
        } else {
            report.witnesses.push(w);
        }
    }

    report.verdict = if !disagree.is_empty() {
        Verdict::Inconclusive
    } else if failing.is_empty() {
        Verdict::Positive
    } else {
        Verdict::Negative
    };
    report.cross_checks.push(CrossCheck::below("lp-distance-two", lp_residual, tol.dist_two));
    report.cross_checks.push(CrossCheck::below("criteria-agree", disagree.len() as f64, 1.0));
    if report.verdict != Verdict::Positive {
        // refutations first; the passing pairs add nothing to a negative verdict
        report.witnesses = disagree.into_iter().chain(failing).collect();
    }
    report.notes.push(resolution_note(eta, h));
    report.notes.push(format!("{} denting pair(s) examined", pairs.len()));
    report.notes.push(DENTING_NOTE.into());
    Ok(report)
}

/// A unit element is a Daugavet point iff it lies at distance 2 from every
/// `±m_{u,v}` over denting pairs.
pub fn classify_daugavet_element(
    space: &FiniteMetricSpace,
    mu: &FreeElement,
    eta: f64,
    h: f64,
    tol: &Tolerances,
) -> Result<ClassificationReport> {
    let norm = free_norm(space, mu)?.value;
    if (norm - 1.0).abs() > tol.opt {
        return Err(domain(format!("element must have norm 1, got {norm}")));
    }
    let pairs = trivial_segment_pairs(space, eta, h)?;
    let rows = exec::map_slice(&pairs, |&(u, v)| -> Result<_> {
        let muv = FreeElement::molecule(space, u, v)?;
        Ok((u, v, distance(space, mu, &muv)?, distance(space, mu, &muv.neg())?))
    });

    let mut report = ClassificationReport::new("daugavet-element", space, &[]).param("eta", eta).param("h", h);
    report.query.element = Some(mu.display(space).to_string());
    let mut closest: Option<(f64, Witness)> = None;
    let mut failures = 0usize;
    for row in rows {
        let (u, v, to_plus, to_minus) = row?;
        let near = to_plus.min(to_minus);
        if (to_plus - 2.0).abs() >= tol.dist_two || (to_minus - 2.0).abs() >= tol.dist_two {
            failures += 1;
        }
        let w = Witness::new("closest-denting-pair", space, &[u, v])
            .with("distance_to_molecule", to_plus)
            .with("distance_to_negative", to_minus);
        if closest.as_ref().is_none_or(|(d, _)| near < *d) {
            closest = Some((near, w));
        }
    }
    report.verdict = if failures == 0 { Verdict::Positive } else { Verdict::Negative };
    report.cross_checks.push(CrossCheck::below("unit-norm", (norm - 1.0).abs(), tol.opt.max(Tolerances::TAU)));
    let check = free_norm_checked(space, mu, tol)?;
    report.cross_checks.push(CrossCheck::below("dual-primal-gap", check.gap, tol.opt));
    if let Some((_, w)) = closest {
        report.witnesses.push(w);
    }
    report.notes.push(resolution_note(eta, h));
    report.notes.push(format!("{} denting pair(s) examined, {failures} at distance below 2", pairs.len()));
    report.notes.push(DENTING_NOTE.into());
    Ok(report)
}
