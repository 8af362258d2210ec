use proptest::prelude::*;

use lipfree::free::{free_norm, free_norm_checked, transport_norm, FreeElement};
use lipfree::lipschitz::{lipschitz_constant, mcshane_extend, Envelope};
use lipfree::metric::{EmbeddedPointSet, FiniteMetricSpace, Metric, PNorm};
use lipfree::Tolerances;

fn space_from(coords: &[(f64, f64)]) -> Option<FiniteMetricSpace> {
    let pts: Vec<Vec<f64>> = coords.iter().map(|&(a, b)| vec![a, b]).collect();
    let e = EmbeddedPointSet::new(pts, PNorm::Finite(2.0), 0).ok()?;
    FiniteMetricSpace::from_embedded(e, None).ok()
}

fn points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..8)
}

fn element(space: &FiniteMetricSpace, coeffs: &[f64]) -> FreeElement {
    FreeElement::from_terms(space, coeffs.iter().copied().enumerate().take(space.len())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_homogeneous_and_subadditive(
        pts in points(),
        a in prop::collection::vec(-2.0..2.0f64, 8),
        b in prop::collection::vec(-2.0..2.0f64, 8),
        t in -3.0..3.0f64,
    ) {
        let Some(space) = space_from(&pts) else { return Ok(()) };
        prop_assume!(space.min_distance().unwrap() > 1e-3);
        let (mu, nu) = (element(&space, &a), element(&space, &b));
        let n = |e: &FreeElement| free_norm(&space, e).unwrap().value;
        let scale = 1.0 + n(&mu);
        prop_assert!((n(&mu.scale(t)) - t.abs() * n(&mu)).abs() < 1e-9 * scale * (1.0 + t.abs()));
        prop_assert!(n(&mu.add(&nu)) <= n(&mu) + n(&nu) + 1e-9 * (scale + n(&nu)));
    }

    #[test]
    fn molecules_have_norm_one(pts in points(), i in 0usize..8, j in 0usize..8) {
        let Some(space) = space_from(&pts) else { return Ok(()) };
        let (x, y) = (i % space.len(), j % space.len());
        prop_assume!(x != y && space.d(x, y) > 1e-3);
        let m = FreeElement::molecule(&space, x, y).unwrap();
        prop_assert!((free_norm(&space, &m).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn solvers_agree_and_certificates_attain(pts in points(), a in prop::collection::vec(-2.0..2.0f64, 8)) {
        let Some(space) = space_from(&pts) else { return Ok(()) };
        prop_assume!(space.min_distance().unwrap() > 1e-3);
        let mu = element(&space, &a);
        let check = free_norm_checked(&space, &mu, &Tolerances::default()).unwrap();
        prop_assert!(check.gap < 1e-7);
        prop_assert!(check.lipschitz_excess < 1e-9);
        let t = transport_norm(&space, &mu, &Tolerances::default()).unwrap();
        prop_assert!((t.certificate.apply(&mu) - t.value).abs() < 1e-7 * (1.0 + t.value));
    }

    #[test]
    fn mcshane_keeps_the_constant(
        pts in points(),
        vals in prop::collection::vec(-1.0..1.0f64, 8),
        mask in prop::collection::vec(any::<bool>(), 8),
        sup in any::<bool>(),
    ) {
        let Some(space) = space_from(&pts) else { return Ok(()) };
        prop_assume!(space.min_distance().unwrap() > 1e-3);
        let partial: Vec<(usize, f64)> =
            (0..space.len()).filter(|&p| mask[p]).map(|p| (p, vals[p])).collect();
        prop_assume!(!partial.is_empty());
        let mut lip: f64 = 1.0;
        for &(p, fp) in &partial {
            for &(q, fq) in &partial {
                if p != q {
                    lip = lip.max((fp - fq).abs() / space.d(p, q));
                }
            }
        }
        let env = if sup { Envelope::SupConvolution } else { Envelope::InfConvolution };
        let f = mcshane_extend(&space, &partial, lip, env).unwrap();
        prop_assert!(lipschitz_constant(&space, &f) <= lip * (1.0 + 1e-9));
        let shift = partial[0].1 - f.value(partial[0].0);
        for &(p, fp) in &partial {
            prop_assert!((f.value(p) + shift - fp).abs() < 1e-9);
        }
    }
}
