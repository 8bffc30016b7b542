//! Cross-module checks: symbols through matrices, sweeps and closed forms.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use nrc_core::comparison::{compare, numeric_support, ClosedForm, UPPER_BOUND_TOL};
use nrc_core::disk_maps::EllipticSymbol;
use nrc_core::hardy_operator::{eigenspace_basis, OperatorMatrix};
use nrc_core::numrange::{hull_from_support, support_function, symmetry_defect, uniform_angles, EigenOptions};
use nrc_core::order3::{envelope_point, DualCubic, Order3Geometry, SexticCurve};
use nrc_core::spectral_bounds::{extremal_family, extremal_terms, quadratic_form_identity};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn order_two_sweep_approaches_ellipse_from_inside() {
    let sym = EllipticSymbol::new(c(0.5, 0.0), 2, 1).unwrap();
    let closed = ClosedForm::for_symbol(&sym).unwrap().unwrap();
    let angles = uniform_angles(64);
    let mut previous = f64::INFINITY;
    for n in [32, 64, 128] {
        let s = numeric_support(&sym, n, &angles).unwrap();
        let mut gap = 0.0f64;
        for x in &s {
            let d = closed.support(x.alpha).unwrap() - x.lambda;
            assert!(d >= -UPPER_BOUND_TOL, "n = {n}, alpha = {}: {d}", x.alpha);
            gap = gap.max(d);
            assert!(x.consistency() <= 1e-9);
        }
        assert!(gap < previous);
        previous = gap;
    }
}

#[test]
fn order_three_sweep_stays_below_support_cubic() {
    for a in [c(0.5, 0.0), c(0.0, -0.4)] {
        let sym = EllipticSymbol::new(a, 3, 1).unwrap();
        let geo = Order3Geometry::new(a).unwrap();
        let angles = uniform_angles(60);
        for n in [24, 48, 96] {
            for s in numeric_support(&sym, n, &angles).unwrap() {
                assert!(s.lambda <= geo.lambda0(s.alpha).unwrap() + UPPER_BOUND_TOL);
            }
        }
    }
}

#[test]
fn comparison_reports_shrinking_gaps() {
    let sym = EllipticSymbol::new(c(0.5, 0.0), 3, 1).unwrap();
    let r = compare(&sym, 96, &uniform_angles(90)).unwrap();
    assert_eq!(r.monotonicity_ok, Some(true));
    assert!(r.hausdorff.unwrap() < 0.05);
    assert!(r.upper_bound_excess.unwrap() <= UPPER_BOUND_TOL);
    let json = serde_json::to_value(&r).unwrap();
    for key in ["hausdorff", "sup_support_gap", "monotonicity_ok", "symmetry_defect"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn hull_contains_closed_form_point_at_quarter_turn() {
    // The support line at pi/2 touches the ellipse at (0, B).
    let sym = EllipticSymbol::new(c(0.5, 0.0), 2, 1).unwrap();
    let samples = numeric_support(&sym, 128, &uniform_angles(72)).unwrap();
    let hull = hull_from_support(&samples).unwrap();
    assert!(hull.is_convex(1e-9));
    let quarter = samples.iter().find(|s| (s.alpha - FRAC_PI_2).abs() < 1e-12).unwrap();
    let gap = 4.0 / 3.0 - quarter.lambda;
    assert!(gap >= 0.0 && gap < 2e-2, "{gap}");
}

#[test]
fn guyker_restriction_stays_below_conjugate_support() {
    // W(C^*) is the conjugate of W(C): Lambda_{C^*}(alpha) = Lambda_C(-alpha).
    let sym = EllipticSymbol::new(c(0.4, 0.0), 3, 1).unwrap();
    let angles = uniform_angles(24);
    let guyker = OperatorMatrix::guyker_adjoint(&sym, 160).unwrap();
    let g = support_function(guyker.entries(), &angles, &EigenOptions::default()).unwrap();
    let geo = Order3Geometry::new(sym.fixed_point()).unwrap();
    for s in &g {
        let closed = geo.lambda0(-s.alpha).unwrap();
        assert!(s.lambda <= closed + UPPER_BOUND_TOL && closed - s.lambda < 1e-2, "alpha = {}", s.alpha);
    }
    assert!(symmetry_defect(&g, 3).unwrap() < 1e-3);
}

#[test]
fn extremal_family_satisfies_identities_against_matrix() {
    let a = c(0.3, 0.3);
    let sym = EllipticSymbol::new(a, 3, 2).unwrap();
    let adj = OperatorMatrix::composition(&sym, 192).unwrap().adjoint();
    let fam = extremal_family([0.3, 1.2, -0.4], 0.5, a, extremal_terms(0.5).unwrap(), 192).unwrap();
    let s = c(1.0 / 3f64.sqrt(), 0.0);
    let [f1, f2, f3] = fam.f.map(|f| f.scaled(s));
    let r = quadratic_form_identity(&sym, &f1, &f2, &f3, &adj).unwrap();
    assert!(r.residual_1 <= 1e-8 && r.residual_2 <= 1e-8, "{r:?}");
}

#[test]
fn eigenspace_vectors_are_adjoint_eigenvectors() {
    let sym = EllipticSymbol::new(c(0.2, 0.5), 4, 1).unwrap();
    let adj = OperatorMatrix::composition(&sym, 256).unwrap().adjoint();
    for r in 0..4 {
        let basis = eigenspace_basis(&sym, r, 6, 256).unwrap();
        for v in basis.vectors() {
            let mut d = adj.apply(v).unwrap();
            d.add_scaled(-basis.eigenvalue(), v).unwrap();
            assert!(d.norm() <= 1e-10 + basis.truncation_error(), "r = {r}: {}", d.norm());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn envelope_lies_on_curve_for_any_fixed_point(r in 0.05f64..0.9, arg in 0.0f64..TAU, alpha in 0.0f64..TAU) {
        let geo = Order3Geometry::new(Complex64::from_polar(r, arg)).unwrap();
        let curve = SexticCurve::new(geo.l).unwrap();
        let (x, y) = envelope_point(alpha, geo.l).unwrap();
        prop_assert!(curve.normalized(x, y).abs() <= 1e-8);
        let l0 = geo.lambda0(alpha).unwrap();
        let cubic = DualCubic::new(geo.l).unwrap();
        prop_assert!(cubic.normalized(c(alpha.cos(), 0.0), c(alpha.sin(), 0.0), c(-l0, 0.0)).norm() <= 1e-10);
        // The touching point lies on the support line.
        prop_assert!((x * alpha.cos() + y * alpha.sin() - l0).abs() <= 1e-10 * (1.0 + l0));
    }

    #[test]
    fn geometry_depends_on_modulus_only(r in 0.05f64..0.95, arg in 0.0f64..TAU) {
        let g1 = Order3Geometry::new(c(r, 0.0)).unwrap();
        let g2 = Order3Geometry::new(Complex64::from_polar(r, arg)).unwrap();
        prop_assert!((g1.l - g2.l).abs() <= 1e-12 * g1.l);
        prop_assert!(g1.delta > 0.0 && g1.delta < 0.5 && g1.l > 0.75);
    }

    #[test]
    fn symbols_have_their_order(re in -0.7f64..0.7, im in -0.7f64..0.7, p in 2u32..7) {
        prop_assume!(re.hypot(im) > 1e-3);
        let sym = EllipticSymbol::new(c(re, im), p, 1).unwrap();
        prop_assert!(sym.order_residual().unwrap() <= 1e-12);
        prop_assert!(sym.fixed_point_residual() <= 1e-12);
    }
}
