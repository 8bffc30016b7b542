use std::f64::consts::{FRAC_PI_3, TAU};

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cubic::{depressed_cubic_roots, largest_root_by_scan};
use crate::error::{Error, Result};

/// Above this modulus `1 - 4 Delta^2` drops below 0.003.
pub const NEAR_BOUNDARY: f64 = 0.95;
/// Tolerance on the unsquared support equation after solving the cubic.
pub const EQC_TOL: f64 = 1e-9;
const ROOT_TOL: f64 = 1e-12;
const SCAN_STEPS: usize = 512;

/// `Delta = |a| / (1 + |a|^2)` and the support-cubic constant `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Order3Geometry {
    pub a: Complex64,
    pub delta: f64,
    pub l: f64,
}

/// `L` from `|a|`. The factor `1 - 4 Delta^2` is formed as
/// `((1 - r^2) / (1 + r^2))^2` so nothing cancels as `r -> 1`.
pub fn l_constant(r: f64) -> f64 {
    let r2 = r * r;
    let d = r / (1.0 + r2);
    let d2 = d * d;
    let gap = (1.0 - r) * (1.0 + r) / (1.0 + r2);
    let num = 3.0 + 6.0 * d2 * d * (3.0 - 3.0 * d2).sqrt() - 6.0 * d2 * d2 - 6.0 * d2;
    num / (4.0 * (1.0 - d2) * gap * gap)
}

impl Order3Geometry {
    pub fn new(a: Complex64) -> Result<Self> {
        let r = a.norm();
        if !r.is_finite() || r >= 1.0 {
            return Err(Error::OutsideDisk { modulus: r });
        }
        if r == 0.0 {
            return Err(Error::ZeroFixedPoint);
        }
        if r > NEAR_BOUNDARY {
            log::warn!("|a| = {r} is close to the circle; L = {:.6e}", l_constant(r));
        }
        Ok(Self {
            a,
            delta: r / (1.0 + r * r),
            l: l_constant(r),
        })
    }

    /// Largest root of `lambda^3 - L lambda = cos^3 alpha - 3/4 cos alpha`,
    /// re-validated against the unsquared support equation.
    pub fn lambda0(&self, alpha: f64) -> Result<f64> {
        let lambda = support_root(alpha, self.l)?;
        let residual = eqc_residual(lambda, alpha, self.delta);
        if residual.is_finite() && residual <= EQC_TOL {
            Ok(lambda)
        } else {
            Err(Error::ResidualCheck { residual })
        }
    }

    /// Largest root of `det M(lambda, Phi) = 0` in
    /// `[max zeta, 1 + sum delta + L]`.
    pub fn lambda_prime(&self, alpha: f64, delta: [f64; 3]) -> Result<f64> {
        if let Some(&bad) = delta.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::InvalidArgument(format!("correlation {bad} must be a nonnegative number")));
        }
        let zeta = chebyshev_zeta(alpha);
        let lo = zeta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let hi = 1.0 + delta.iter().sum::<f64>() + self.l;
        largest_root_by_scan(|x| det_closed(x, zeta, delta).0, lo, hi, SCAN_STEPS, ROOT_TOL)
            .ok_or(Error::NoSignChange { lo, hi })
    }

    pub fn envelope_point(&self, alpha: f64) -> Result<(f64, f64)> {
        envelope_point(alpha, self.l)
    }
}

/// `(cos alpha, cos(alpha - 2 pi / 3), cos(alpha + 2 pi / 3))`, the roots of
/// `4 zeta^3 - 3 zeta = cos 3 alpha`.
pub fn chebyshev_zeta(alpha: f64) -> [f64; 3] {
    let t = TAU / 3.0;
    [alpha.cos(), (alpha - t).cos(), (alpha + t).cos()]
}

/// `cos^3 alpha - 3/4 cos alpha`, computed as `cos(3 alpha) / 4` after
/// reducing `alpha` modulo `2 pi / 3`.
fn support_constant(alpha: f64) -> f64 {
    0.25 * (3.0 * alpha.rem_euclid(TAU / 3.0)).cos()
}

/// Largest real root of `x^3 - L x - (cos^3 alpha - 3/4 cos alpha)`.
pub fn support_root(alpha: f64, l: f64) -> Result<f64> {
    if !(l.is_finite() && l > 0.75) {
        return Err(Error::InvalidArgument(format!("L = {l} must exceed 3/4")));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite angle {alpha}")));
    }
    let c = support_constant(alpha);
    let f = |x: f64| (x * x - l) * x - c;
    match depressed_cubic_roots(-l, -c).first() {
        Some(&x) if x.is_finite() => Ok(x),
        _ => {
            let hi = 1.0 + l;
            largest_root_by_scan(f, 0.0, hi, SCAN_STEPS, ROOT_TOL).ok_or(Error::NoSignChange { lo: 0.0, hi })
        }
    }
}

/// Relative residual of
/// `prod(lambda - zeta) - Delta^2 sum(lambda^3 - zeta^3) - 2 Delta^3 prod s`
/// with `s_j = sqrt(lambda^2 + lambda zeta_j + zeta_j^2)`, scaled by the sum
/// of the absolute term magnitudes.
pub fn eqc_residual(lambda: f64, alpha: f64, delta: f64) -> f64 {
    let (value, scale) = det_closed(lambda, chebyshev_zeta(alpha), [delta; 3]);
    if scale > 0.0 {
        value.abs() / scale
    } else {
        value.abs()
    }
}

fn stationary_radius(lambda: f64, zeta: f64) -> f64 {
    (lambda * lambda + lambda * zeta + zeta * zeta).max(0.0).sqrt()
}

/// Closed form of `det M(lambda, Phi)` and the sum of the absolute values of
/// its three terms.
pub fn det_closed(lambda: f64, zeta: [f64; 3], delta: [f64; 3]) -> (f64, f64) {
    let diag: f64 = zeta.iter().map(|z| lambda - z).product();
    let quad: f64 = zeta
        .iter()
        .zip(delta)
        .map(|(z, d)| (lambda.powi(3) - z.powi(3)) * d * d)
        .sum();
    let cross: f64 = 2.0
        * zeta
            .iter()
            .zip(delta)
            .map(|(&z, d)| stationary_radius(lambda, z) * d)
            .product::<f64>();
    let quad_abs: f64 = zeta
        .iter()
        .zip(delta)
        .map(|(z, d)| ((lambda.powi(3) - z.powi(3)) * d * d).abs())
        .sum();
    (diag - quad - cross, diag.abs() + quad_abs + cross.abs())
}

/// `M(lambda, phi)` built entry by entry.
#[rustfmt::skip]
pub fn m_matrix(lambda: f64, zeta: [f64; 3], delta: [f64; 3], phi: [f64; 3]) -> Matrix3<f64> {
    let off = |k: usize| (lambda * phi[k].cos() + zeta[k] * (phi[k] - FRAC_PI_3).cos()) * delta[k];
    let (m1, m2, m3) = (off(0), off(1), off(2));
    Matrix3::new(
        lambda - zeta[0], m3, m2,
        m3, lambda - zeta[1], m1,
        m2, m1, lambda - zeta[2],
    )
}

/// Angles minimizing `x M x^T` over `phi` for positive `x`.
pub fn stationary_angles(lambda: f64, zeta: [f64; 3]) -> Result<[f64; 3]> {
    let mut phi = [0.0; 3];
    for (k, &z) in zeta.iter().enumerate() {
        let s2 = lambda * lambda + lambda * z + z * z;
        if !(s2 > f64::EPSILON * (lambda * lambda + z * z).max(f64::MIN_POSITIVE)) {
            return Err(Error::DegenerateAngle);
        }
        let s = s2.sqrt();
        let sin = -3f64.sqrt() * z / (2.0 * s);
        let cos = (-2.0 * lambda - z) / (2.0 * s);
        phi[k] = sin.atan2(cos);
    }
    Ok(phi)
}

/// Numeric and closed-form determinant of `M(lambda, Phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetIdentity {
    pub numeric: f64,
    pub closed: f64,
    /// `|numeric - closed| / max(|closed|, sum of |terms|)`.
    pub relative_error: f64,
}

pub fn det_m_identity(lambda: f64, zeta: [f64; 3], delta: [f64; 3]) -> Result<DetIdentity> {
    let phi = stationary_angles(lambda, zeta)?;
    let numeric = m_matrix(lambda, zeta, delta, phi).determinant();
    let (closed, scale) = det_closed(lambda, zeta, delta);
    let denom = closed.abs().max(scale);
    let diff = (numeric - closed).abs();
    Ok(DetIdentity {
        numeric,
        closed,
        relative_error: if denom > 0.0 { diff / denom } else { diff },
    })
}

/// `Lambda_0'(alpha)` from implicit differentiation of the support cubic.
pub fn support_derivative(alpha: f64, lambda: f64, l: f64) -> Result<f64> {
    let denom = 3.0 * lambda * lambda - l;
    if denom.abs() < 1e-12 {
        return Err(Error::SingularEnvelope(denom));
    }
    let c = alpha.cos();
    Ok(alpha.sin() * (0.75 - 3.0 * c * c) / denom)
}

/// Boundary point where the support line at `alpha` touches the curve.
pub fn envelope_point(alpha: f64, l: f64) -> Result<(f64, f64)> {
    let lambda = support_root(alpha, l)?;
    let dl = support_derivative(alpha, lambda, l)?;
    let (s, c) = alpha.sin_cos();
    Ok((lambda * c - dl * s, lambda * s + dl * c))
}

/// Envelope samples `(alpha, x, y)` over the given angles.
pub fn envelope(angles: &[f64], l: f64) -> Result<Vec<(f64, f64, f64)>> {
    angles
        .iter()
        .map(|&a| envelope_point(a, l).map(|(x, y)| (a, x, y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numrange::uniform_angles;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn geo(r: f64) -> Order3Geometry {
        Order3Geometry::new(Complex64::new(r, 0.0)).unwrap()
    }

    #[test]
    fn l_constant_against_reference() {
        for (r, l) in [
            (0.3, 1.05533092335532032474),
            (0.5, 2.06347644020277916010),
            (0.7, 6.39302570185600244504),
            (0.9, 68.0621112179113830263),
            (0.05, 0.7559651142709304079751),
        ] {
            assert!((l_constant(r) - l).abs() <= 1e-14 * l, "r = {r}");
        }
        for (r, l) in [(0.96, 450.5624396078094587457), (0.99, 7425.562496318708256053), (0.999, 749250.5624999635053062)] {
            assert!((l_constant(r) - l).abs() <= 1e-12 * l, "r = {r}: {}", l_constant(r));
        }
        assert_abs_diff_eq!(l_constant(1e-9), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn geometry_fields_and_errors() {
        let g = geo(0.5);
        assert_abs_diff_eq!(g.delta, 0.4, epsilon = 1e-16);
        let gi = Order3Geometry::new(Complex64::new(0.0, 0.5)).unwrap();
        assert_eq!((gi.delta, gi.l), (g.delta, g.l));
        assert_eq!(Order3Geometry::new(Complex64::new(0.0, 0.0)).unwrap_err(), Error::ZeroFixedPoint);
        assert!(matches!(Order3Geometry::new(Complex64::new(1.0, 0.0)), Err(Error::OutsideDisk { .. })));
        assert!(Order3Geometry::new(Complex64::new(f64::NAN, 0.0)).is_err());
        let near = geo(0.97);
        assert!(near.delta < 0.5 && near.l > 0.75 && near.l.is_finite());
    }

    proptest! {
        #[test]
        fn geometry_invariants(r in 1e-6f64..0.999, t in 0.0f64..TAU) {
            let g = Order3Geometry::new(Complex64::from_polar(r, t)).unwrap();
            prop_assert!(g.delta > 0.0 && g.delta < 0.5);
            prop_assert!(g.l > 0.75);
        }

        #[test]
        fn zeta_vieta(alpha in -10.0f64..10.0) {
            let z = chebyshev_zeta(alpha);
            let c3 = (3.0 * alpha).cos();
            for x in z {
                prop_assert!((4.0 * x * x * x - 3.0 * x - c3).abs() <= 1e-14);
            }
            prop_assert!(z.iter().sum::<f64>().abs() <= 1e-14);
            prop_assert!((z[0] * z[1] + z[0] * z[2] + z[1] * z[2] + 0.75).abs() <= 1e-14);
            prop_assert!((z[0] * z[1] * z[2] - 0.25 * c3).abs() <= 1e-14);
        }
    }

    #[test]
    fn zeta_examples() {
        let z = chebyshev_zeta(0.0);
        for (x, y) in z.iter().zip([1.0, -0.5, -0.5]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
        let z = chebyshev_zeta(PI / 3.0);
        for (x, y) in z.iter().zip([0.5, 0.5, -1.0]) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn lambda0_examples() {
        let g = geo(0.5);
        assert_abs_diff_eq!(g.lambda0(FRAC_PI_2).unwrap(), g.l.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(g.lambda0(0.0).unwrap(), 1.4936052609337942, epsilon = 1e-14);
        assert_abs_diff_eq!(g.lambda0(1.0).unwrap(), 1.372267995290208332, epsilon = 1e-14);
        assert_abs_diff_eq!(g.lambda0(2.5).unwrap(), 1.457035540489037346, epsilon = 1e-14);
        assert!(support_root(0.0, 0.7).is_err());
        assert!(support_root(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn lambda0_periodicity() {
        let g = geo(0.7);
        for alpha in uniform_angles(720) {
            let a = g.lambda0(alpha).unwrap();
            let b = g.lambda0(alpha + TAU / 3.0).unwrap();
            assert!((a - b).abs() <= 1e-13 * a, "alpha = {alpha}");
        }
    }

    #[test]
    fn lambda0_near_the_circle() {
        let g = geo(0.99);
        for alpha in uniform_angles(90) {
            g.lambda0(alpha).unwrap();
        }
        assert!((g.lambda0(FRAC_PI_2).unwrap() - g.l.sqrt()).abs() <= 1e-12 * g.l.sqrt());
    }

    #[test]
    fn residual_rejects_other_roots() {
        let g = geo(0.5);
        let c = support_constant(0.0);
        let roots = depressed_cubic_roots(-g.l, -c);
        assert!(eqc_residual(roots[0], 0.0, g.delta) <= 1e-14);
        assert!(eqc_residual(roots[2], 0.0, g.delta) > EQC_TOL);
    }

    #[test]
    fn lambda_prime_examples() {
        let g = geo(0.5);
        for alpha in [0.0, 0.3, 1.0] {
            let z = chebyshev_zeta(alpha);
            let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            assert_abs_diff_eq!(g.lambda_prime(alpha, [0.0; 3]).unwrap(), top, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(g.lambda_prime(0.0, [0.0; 3]).unwrap(), 1.0, epsilon = 1e-12);
        let full = g.lambda_prime(0.0, [0.4; 3]).unwrap();
        assert_abs_diff_eq!(full, g.lambda0(0.0).unwrap(), epsilon = 1e-9);
        assert!(g.lambda_prime(0.0, [0.3; 3]).unwrap() < full);
        assert!(g.lambda_prime(0.0, [-0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn lambda_prime_matches_lambda0() {
        for r in [0.3, 0.5, 0.7] {
            let g = geo(r);
            for alpha in uniform_angles(720) {
                let a = g.lambda0(alpha).unwrap();
                let b = g.lambda_prime(alpha, [g.delta; 3]).unwrap();
                assert!((a - b).abs() <= 1e-9, "r = {r}, alpha = {alpha}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lambda_prime_monotone_in_each_correlation() {
        let g = geo(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let alpha = rng.random_range(0.0..TAU);
            let lo: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.01..0.45));
            let mut hi = lo;
            let k = rng.random_range(0..3);
            hi[k] = rng.random_range(lo[k] + 1e-3..0.49);
            let (x, y) = (g.lambda_prime(alpha, lo).unwrap(), g.lambda_prime(alpha, hi).unwrap());
            assert!(x < y, "alpha {alpha}, {lo:?} -> {hi:?}: {x} vs {y}");
        }
    }

    #[test]
    fn det_identity_examples() {
        let z = chebyshev_zeta(0.0);
        let d = det_m_identity(1.2, z, [0.0; 3]).unwrap();
        let prod: f64 = z.iter().map(|x| 1.2 - x).product();
        assert_abs_diff_eq!(d.numeric, prod, epsilon = 1e-15);
        assert_abs_diff_eq!(d.closed, prod, epsilon = 1e-15);
        let g = geo(0.5);
        let root = g.lambda0(0.0).unwrap();
        let d = det_m_identity(root, z, [0.4; 3]).unwrap();
        assert!(d.closed.abs() < 1e-12 && d.numeric.abs() < 1e-12, "{d:?}");
        assert_eq!(det_m_identity(0.0, [0.0, 0.5, -0.5], [0.1; 3]).unwrap_err(), Error::DegenerateAngle);
    }

    #[test]
    fn det_identity_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let lambda = rng.random_range(0.01..3.0);
            let alpha = rng.random_range(0.0..TAU);
            let delta: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..0.5));
            let d = det_m_identity(lambda, chebyshev_zeta(alpha), delta).unwrap();
            assert!(d.relative_error <= 1e-10, "{d:?}");
        }
    }

    #[test]
    fn stationary_angles_minimize_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let lambda = rng.random_range(0.1..2.0);
            let zeta = chebyshev_zeta(rng.random_range(0.0..TAU));
            let delta: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..0.5));
            let x = nalgebra::Vector3::from_fn(|_, _| rng.random_range(0.01..1.0));
            let phi = stationary_angles(lambda, zeta).unwrap();
            let best = (x.transpose() * m_matrix(lambda, zeta, delta, phi) * x)[(0, 0)];
            let other: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
            let trial = (x.transpose() * m_matrix(lambda, zeta, delta, other) * x)[(0, 0)];
            assert!(best <= trial + 1e-14, "{best} > {trial}");
        }
    }

    #[test]
    fn envelope_examples() {
        let g = geo(0.5);
        let (x, y) = g.envelope_point(0.0).unwrap();
        let roots = depressed_cubic_roots(-g.l, -0.25);
        assert_abs_diff_eq!(x, roots[0], epsilon = 1e-14);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        let (px, py) = g.envelope_point(PI / 3.0).unwrap();
        let (qx, qy) = g.envelope_point(-PI / 3.0).unwrap();
        let rotated = Complex64::new(qx, qy) * Complex64::from_polar(1.0, TAU / 3.0);
        assert_abs_diff_eq!(rotated.re, px, epsilon = 1e-13);
        assert_abs_diff_eq!(rotated.im, py, epsilon = 1e-13);
        let (x, y) = g.envelope_point(FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(x, -3.0 / (8.0 * g.l), epsilon = 1e-14);
        assert_abs_diff_eq!(y, g.l.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn envelope_points_lie_on_support_lines() {
        let g = geo(0.3);
        for (alpha, x, y) in envelope(&uniform_angles(360), g.l).unwrap() {
            let lambda = g.lambda0(alpha).unwrap();
            assert!((x * alpha.cos() + y * alpha.sin() - lambda).abs() <= 1e-14);
        }
    }

    #[test]
    fn derivative_guard() {
        assert!(matches!(support_derivative(1.0, 1.0, 3.0), Err(Error::SingularEnvelope(_))));
    }
}
