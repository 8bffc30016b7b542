//! Check suites over the order-3 closed forms.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::curve::{foci_check, inflexional_tangent_defect, singularity_report, DualCubic, SexticCurve, CUSP_TOL, FOCAL_TOL};
use super::geometry::{chebyshev_zeta, det_m_identity, envelope_point, Order3Geometry};
use crate::error::Result;
use crate::numrange::uniform_angles;
use crate::report::{CheckComponent, CheckReport};

pub const AGREEMENT_TOL: f64 = 1e-9;
pub const DET_TOL: f64 = 1e-10;
pub const INCIDENCE_TOL: f64 = 1e-10;
pub const ENVELOPE_TOL: f64 = 1e-8;
pub const FACTOR_TOL: f64 = 1e-12;
pub const PERIOD_TOL: f64 = 1e-13;

/// Structural checks on the boundary curve for one value of `L`: the x-axis
/// factorization, the three real cusps, the focal lines, the inflexional
/// tangent, the four real x-axis tangents and the Plücker class count.
pub fn curve_suite(l: f64) -> Result<CheckReport> {
    let curve = SexticCurve::new(l)?;
    let sing = singularity_report(&curve)?;
    let foci = foci_check(l)?;
    let cusp_gradient = sing.real_cusps.iter().map(|c| c.gradient).fold(0.0, f64::max);
    let cusp_value = sing.real_cusps.iter().map(|c| c.value).fold(0.0, f64::max);
    let roots = curve.x_axis_roots().len() as f64;
    let (qx, qy) = curve.quarter_turn_point();
    let components = vec![
        CheckComponent::upper("x-axis-factorization", curve.factorization_error(), FACTOR_TOL, false),
        CheckComponent::upper("cusp-value", cusp_value, CUSP_TOL, false),
        CheckComponent::upper("cusp-gradient", cusp_gradient, CUSP_TOL, false),
        CheckComponent::upper("focal-lines", foci.worst, FOCAL_TOL, false),
        CheckComponent::upper("inflexional-tangent", inflexional_tangent_defect(l)?, FACTOR_TOL, false),
        CheckComponent::upper("x-axis-distinct-roots-minus-4", (roots - 4.0).abs(), 0.0, false),
        CheckComponent::upper("quarter-turn-point", curve.normalized(qx, qy).abs(), FACTOR_TOL, false),
        CheckComponent::upper("plucker-class-minus-3", (sing.class_from_plucker - 3.0).abs(), 1e-9, false),
    ];
    Ok(CheckReport::new("order3-curve", 1, 0, components))
}

fn worst<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Closed-form consistency at fixed point `a`: `Lambda_0` against the
/// determinant root at `(Delta, Delta, Delta)`, periodicity, monotonicity in
/// `delta`, the determinant identity on random draws, support lines on the
/// tangential cubic, envelope points on the curve and symmetry of the curve,
/// followed by [`curve_suite`].
pub fn order3_suite(a: Complex64, angles: usize, draws: usize, seed: u64) -> Result<CheckReport> {
    let geo = Order3Geometry::new(a)?;
    let curve = SexticCurve::new(geo.l)?;
    let cubic = DualCubic::new(geo.l)?;
    let grid = uniform_angles(angles.max(1));
    let per_angle = grid
        .par_iter()
        .map(|&alpha| -> Result<[f64; 4]> {
            let l0 = geo.lambda0(alpha)?;
            let lp = geo.lambda_prime(alpha, [geo.delta; 3])?;
            let shifted = geo.lambda0(alpha + TAU / 3.0)?;
            let c = |x: f64| Complex64::new(x, 0.0);
            let incidence = cubic.normalized(c(alpha.cos()), c(alpha.sin()), c(-l0)).norm();
            let (x, y) = envelope_point(alpha, geo.l)?;
            Ok([(l0 - lp).abs(), (l0 - shifted).abs(), incidence, curve.normalized(x, y).abs()])
        })
        .collect::<Result<Vec<_>>>()?;
    let col = |k: usize| worst(per_angle.iter().map(|r| r[k]));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut det = 0.0f64;
    let mut monotone_violations = 0.0;
    let mut symmetry = 0.0f64;
    for _ in 0..draws {
        let lambda = rng.random_range(0.01..3.0);
        let alpha = rng.random_range(0.0..TAU);
        let delta: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..0.5));
        det = det.max(det_m_identity(lambda, chebyshev_zeta(alpha), delta)?.relative_error);

        let lo: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.01..0.45));
        let mut hi = lo;
        let j = rng.random_range(0..3);
        hi[j] += rng.random_range(0.01..0.5 - lo[j]);
        if geo.lambda_prime(alpha, lo)? >= geo.lambda_prime(alpha, hi)? {
            monotone_violations += 1.0;
        }

        let (x, y) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let (s, c) = (TAU / 3.0).sin_cos();
        let g = curve.normalized(x, y);
        symmetry = symmetry
            .max((g - curve.normalized(c * x - s * y, s * x + c * y)).abs())
            .max((g - curve.normalized(x, -y)).abs());
    }

    let mut components = vec![
        CheckComponent::upper("lambda0-vs-lambda-prime", col(0), AGREEMENT_TOL, false),
        CheckComponent::upper("lambda0-period", col(1), PERIOD_TOL, false),
        CheckComponent::upper("lambda-prime-monotone-violations", monotone_violations, 0.0, false),
        CheckComponent::upper("det-identity", det, DET_TOL, false),
        CheckComponent::upper("dual-cubic-incidence", col(2), INCIDENCE_TOL, false),
        CheckComponent::upper("envelope-on-curve", col(3), ENVELOPE_TOL, false),
        CheckComponent::upper("curve-symmetry", symmetry, FACTOR_TOL, false),
    ];
    components.extend(curve_suite(geo.l)?.components);
    Ok(CheckReport::new("order3", angles + draws, seed, components))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_suite_passes_for_admissible_constants() {
        for l in [1.0, 2.0634764402027792, 40.0] {
            let r = curve_suite(l).unwrap();
            assert!(r.pass, "L = {l}: {r:?}");
        }
    }

    #[test]
    fn order3_suite_passes() {
        for a in [Complex64::new(0.3, 0.0), Complex64::new(0.0, 0.7)] {
            let r = order3_suite(a, 360, 200, 4).unwrap();
            assert!(r.pass, "{}", serde_json::to_string_pretty(&r).unwrap());
        }
    }
}
