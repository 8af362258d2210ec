use serde::{Deserialize, Serialize};

use super::FreeElement;
use crate::error::Result;
use crate::lipschitz::{inf_envelope, lipschitz_constant, LipschitzFunction};
use crate::lp::{solve_lp_with, solve_transportation, LinearProgram, LpOptions, TransportPlan, TransportationInstance};
use crate::metric::{FiniteMetricSpace, Metric};
use crate::tol::Tolerances;

/// Relative slack under which a pair constraint counts as implied by a
/// path through a third point.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NormOptions {
    pub tol: Tolerances,
    /// Drop pair constraints implied by the triangle inequality.
    pub prune: bool,
    pub record_tableau: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { tol: Tolerances::default(), prune: true, record_tableau: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    /// A 1-Lipschitz function attaining the norm.
    pub certificate: LipschitzFunction,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<String>,
}

/// Free norm by the dual LP
/// `max Σ λ_p f(p)` s.t. `|f(p) − f(q)| ≤ d(p,q)`, `f(base) = 0`,
/// posed on `supp(μ) ∪ {base}` and extended to the whole space by the inf
/// envelope.
pub fn free_norm(space: &FiniteMetricSpace, mu: &FreeElement) -> Result<NormResult> {
    free_norm_with(space, mu, &NormOptions::default())
}

pub fn free_norm_with(space: &FiniteMetricSpace, mu: &FreeElement, opts: &NormOptions) -> Result<NormResult> {
    let support = mu.support();
    for &p in &support {
        space.check_index(p)?;
    }
    if support.is_empty() {
        return Ok(NormResult {
            value: 0.0,
            certificate: LipschitzFunction::zero(space),
            iterations: 0,
            dump: None,
        });
    }
    let base = space.base();
    let k = support.len();
    let objective: Vec<f64> = support.iter().map(|&p| mu.coefficient(p)).collect();
    let bounds: Vec<(f64, f64)> = support.iter().map(|&p| (-space.d(p, base), space.d(p, base))).collect();
    let mut lp = LinearProgram::maximize(objective).with_bounds(bounds);

    let mut nodes = support.clone();
    nodes.push(base);
    for a in 0..k {
        for b in a + 1..k {
            let (p, q) = (support[a], support[b]);
            let dpq = space.d(p, q);
            let implied = opts.prune
                && nodes
                    .iter()
                    .any(|&r| r != p && r != q && space.d(p, r) + space.d(r, q) <= dpq * (1.0 + PRUNE_SLACK));
            if implied {
                continue;
            }
            let mut row = vec![0.0; k];
            row[a] = 1.0;
            row[b] = -1.0;
            lp = lp.le(row.clone(), dpq);
            row[a] = -1.0;
            row[b] = 1.0;
            lp = lp.le(row, dpq);
        }
    }

    let lp_opts = LpOptions { tol: opts.tol, max_iterations: None, record_tableau: opts.record_tableau };
    let sol = solve_lp_with(&lp, &lp_opts)?.into_optimal()?;
    let mut partial: Vec<(usize, f64)> = support.iter().copied().zip(sol.x.iter().copied()).collect();
    partial.push((base, 0.0));
    let certificate = LipschitzFunction::new(space, inf_envelope(space, &partial, 1.0))?;
    Ok(NormResult {
        value: sol.value.max(0.0),
        certificate,
        iterations: sol.iterations,
        dump: sol.tableau,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportNorm {
    pub value: f64,
    /// Built from the transport potentials; attains `value`.
    pub certificate: LipschitzFunction,
    /// Space index of each source row and sink column of `plan`.
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub plan: TransportPlan,
}

/// Free norm as a minimum-cost transport: positive coefficients ship to
/// negative ones, the base point balancing the total mass.
pub fn transport_norm(space: &FiniteMetricSpace, mu: &FreeElement, tol: &Tolerances) -> Result<TransportNorm> {
    let base = space.base();
    let (mut sources, mut supply, mut sinks, mut demand) = (vec![], vec![], vec![], vec![]);
    for (p, c) in mu.iter() {
        space.check_index(p)?;
        if c > 0.0 {
            sources.push(p);
            supply.push(c);
        } else {
            sinks.push(p);
            demand.push(-c);
        }
    }
    let total = mu.total_mass();
    if total > 0.0 {
        sinks.push(base);
        demand.push(total);
    } else if total < 0.0 {
        sources.push(base);
        supply.push(-total);
    }
    // Rounding in the total can leave the instance a few ulps off balance.
    let (s, t): (f64, f64) = (supply.iter().sum(), demand.iter().sum());
    if let Some(last) = demand.last_mut() {
        if s != t && sinks.last() == Some(&base) {
            *last += s - t;
        }
    }
    if let Some(last) = supply.last_mut() {
        if s != t && sources.last() == Some(&base) {
            *last += t - s;
        }
    }

    if sources.is_empty() || sinks.is_empty() {
        return Ok(TransportNorm {
            value: 0.0,
            certificate: LipschitzFunction::zero(space),
            sources,
            sinks,
            plan: TransportPlan {
                cost: 0.0,
                flow: vec![],
                source_potential: vec![],
                sink_potential: vec![],
                augmentations: 0,
            },
        });
    }

    let cost = sources.iter().map(|&i| sinks.iter().map(|&j| space.d(i, j)).collect()).collect();
    let inst = TransportationInstance { supply, demand, cost };
    let plan = solve_transportation(&inst, tol)?;

    // f(sink j) = −v_j satisfies f(i) − f(j) ≤ d(i,j) against f(i) = −u_i,
    // so the inf envelope over sinks is 1-Lipschitz, ≤ f on sinks and ≥ f
    // on sources.
    let partial: Vec<(usize, f64)> = sinks.iter().zip(&plan.sink_potential).map(|(&j, &v)| (j, -v)).collect();
    let mut values = vec![0.0; space.len()];
    for (t, slot) in values.iter_mut().enumerate() {
        *slot = partial.iter().map(|&(j, f)| f + space.d(t, j)).fold(f64::INFINITY, f64::min);
    }
    let certificate = LipschitzFunction::new(space, values)?;
    Ok(TransportNorm { value: plan.cost, certificate, sources, sinks, plan })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormCheck {
    /// LP value.
    pub dual: f64,
    /// Transport cost.
    pub primal: f64,
    pub gap: f64,
    /// Largest `|d(i,j) − (f(i) − f(j))|` over arcs carrying flow, with `f`
    /// the LP certificate.
    pub slackness_residual: f64,
    /// `max(0, ‖f‖_L − 1)` for the LP certificate.
    pub lipschitz_excess: f64,
    /// `|f(μ) − dual|` for the LP certificate after extension.
    pub certificate_residual: f64,
    pub certificate: LipschitzFunction,
}

impl NormCheck {
    pub fn value(&self) -> f64 {
        self.dual
    }
}

/// Both norms, and the residuals that tie them together.
pub fn free_norm_checked(space: &FiniteMetricSpace, mu: &FreeElement, tol: &Tolerances) -> Result<NormCheck> {
    let opts = NormOptions { tol: *tol, ..NormOptions::default() };
    let dual = free_norm_with(space, mu, &opts)?;
    let primal = transport_norm(space, mu, tol)?;
    let f = &dual.certificate;
    let mut slackness: f64 = 0.0;
    for (a, &i) in primal.sources.iter().enumerate() {
        for (b, &j) in primal.sinks.iter().enumerate() {
            if primal.plan.flow[a][b] > tol.feas {
                slackness = slackness.max((space.d(i, j) - (f.value(i) - f.value(j))).abs());
            }
        }
    }
    Ok(NormCheck {
        dual: dual.value,
        primal: primal.value,
        gap: (dual.value - primal.value).abs(),
        slackness_residual: slackness,
        lipschitz_excess: (lipschitz_constant(space, f) - 1.0).max(0.0),
        certificate_residual: (f.apply(mu) - dual.value).abs(),
        certificate: dual.certificate,
    })
}

/// `‖a − b‖`.
pub fn distance(space: &FiniteMetricSpace, a: &FreeElement, b: &FreeElement) -> Result<f64> {
    Ok(free_norm(space, &a.sub(b))?.value)
}

/// Both sides of `d(x,y) + d(u,v) ≤ min{d(x,u) + d(y,v), d(x,v) + d(y,u)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceTwo {
    pub lhs: f64,
    /// `d(x,v) + d(y,u)`; `lhs ≤` this iff `‖m_{x,y} + m_{u,v}‖ = 2`.
    pub rhs_sum: f64,
    /// `d(x,u) + d(y,v)`; `lhs ≤` this iff `‖m_{x,y} − m_{u,v}‖ = 2`.
    pub rhs_difference: f64,
    pub holds: bool,
}

impl DistanceTwo {
    pub fn rhs(&self) -> f64 {
        self.rhs_sum.min(self.rhs_difference)
    }
}

pub fn is_distance_two_pair(
    space: &FiniteMetricSpace,
    (x, y): (usize, usize),
    (u, v): (usize, usize),
) -> Result<DistanceTwo> {
    space.check_distinct(x, y)?;
    space.check_distinct(u, v)?;
    let lhs = space.d(x, y) + space.d(u, v);
    let rhs_sum = space.d(x, v) + space.d(y, u);
    let rhs_difference = space.d(x, u) + space.d(y, v);
    let holds = lhs <= rhs_sum.min(rhs_difference) + Tolerances::TAU;
    Ok(DistanceTwo { lhs, rhs_sum, rhs_difference, holds })
}

/// Whether `m_{u,v}` is extreme at resolution `(eta, h)`: `d(u,v) > h` and
/// the η-segment `[u,v]_η` is `{u, v}`.
pub fn is_extreme_molecule(space: &FiniteMetricSpace, u: usize, v: usize, eta: f64, h: f64) -> Result<bool> {
    space.check_distinct(u, v)?;
    let duv = space.d(u, v);
    let bare = (0..space.len())
        .all(|z| z == u || z == v || space.d(u, z) + space.d(z, v) > duv + eta + Tolerances::TAU);
    Ok(duv > h + Tolerances::TAU && bare)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::Molecule;
    use crate::metric::{EmbeddedPointSet, PNorm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> FiniteMetricSpace {
        let names = vec!["o".into(), "a".into(), "b".into()];
        FiniteMetricSpace::new(names, vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 2.0], vec![2.0, 2.0, 0.0]], 0).unwrap()
    }

    fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
        let coords = (0..n).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
        FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap(), None).unwrap()
    }

    #[test]
    fn delta_norm_is_distance_to_base() {
        let s = triangle();
        for p in 1..3 {
            let mu = FreeElement::delta(&s, p).unwrap();
            let r = free_norm(&s, &mu).unwrap();
            assert!((r.value - s.d(p, 0)).abs() < 1e-12);
            assert!((transport_norm(&s, &mu, &Tolerances::default()).unwrap().value - s.d(p, 0)).abs() < 1e-12);
        }
        assert_eq!(free_norm(&s, &FreeElement::zero()).unwrap().value, 0.0);
    }

    #[test]
    fn molecules_have_norm_one_and_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_space(&mut rng, 7);
        for x in 0..7 {
            for y in 0..7 {
                if x == y {
                    continue;
                }
                let m = FreeElement::molecule(&s, x, y).unwrap();
                let c = free_norm_checked(&s, &m, &Tolerances::default()).unwrap();
                assert!((c.dual - 1.0).abs() < 1e-9, "{x} {y} {}", c.dual);
                assert!(c.gap < 1e-9);
                assert!(c.lipschitz_excess < 1e-9);
                assert!(c.certificate_residual < 1e-9);
            }
        }
    }

    #[test]
    fn dual_matches_primal_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..=10);
            let s = random_space(&mut rng, n);
            let mu = FreeElement::from_terms(&s, (0..n).map(|p| (p, rng.gen_range(-1.0..1.0)))).unwrap();
            let c = free_norm_checked(&s, &mu, &Tolerances::default()).unwrap();
            assert!(c.gap < 1e-7, "gap {}", c.gap);
            assert!(c.slackness_residual < 1e-6, "cs {}", c.slackness_residual);
            let t = transport_norm(&s, &mu, &Tolerances::default()).unwrap();
            assert!((t.certificate.apply(&mu) - t.value).abs() < 1e-7);
            assert!(lipschitz_constant(&s, &t.certificate) <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn pruning_does_not_change_value() {
        let coords = (0..8).map(|i| vec![i as f64 * 0.125]).collect();
        let s = FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap(), None).unwrap();
        let mu = FreeElement::from_terms(&s, [(1, 1.0), (3, -2.0), (5, 0.5), (7, 1.0)]).unwrap();
        let a = free_norm_with(&s, &mu, &NormOptions { prune: false, ..NormOptions::default() }).unwrap();
        let b = free_norm(&s, &mu).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn homogeneity_and_reversal() {
        let s = triangle();
        let m = Molecule::new(&s, 1, 2).unwrap().to_element(&s).unwrap();
        assert!((distance(&s, &m, &m.neg()).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(distance(&s, &m, &m).unwrap(), 0.0);
        let t = free_norm(&s, &m.scale(-3.5)).unwrap().value;
        assert!((t - 3.5).abs() < 1e-12);
    }

    #[test]
    fn distance_two_criterion_sides() {
        let s = triangle();
        let r = is_distance_two_pair(&s, (1, 2), (1, 2)).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rhs_difference, 0.0);
        assert_eq!(r.rhs_sum, 4.0);
        assert_eq!(r.lhs, 4.0);
        assert!(is_distance_two_pair(&s, (1, 1), (1, 2)).is_err());
    }

    #[test]
    fn two_point_molecule_is_extreme() {
        let s = FiniteMetricSpace::new(vec!["a".into(), "b".into()], vec![vec![0.0, 1.0], vec![1.0, 0.0]], 0).unwrap();
        assert!(is_extreme_molecule(&s, 0, 1, 0.0, 0.0).unwrap());
        assert!(!is_extreme_molecule(&s, 0, 1, 0.0, 1.0).unwrap());
        let coords = (0..=4).map(|i| vec![i as f64 / 4.0]).collect();
        let line = FiniteMetricSpace::from_embedded(EmbeddedPointSet::new(coords, PNorm::Finite(2.0), 0).unwrap(), None).unwrap();
        assert!(!is_extreme_molecule(&line, 0, 2, 0.0, 0.0).unwrap());
        assert!(is_extreme_molecule(&line, 0, 1, 0.0, 0.0).unwrap());
    }
}
