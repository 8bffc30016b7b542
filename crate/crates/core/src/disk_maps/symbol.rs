use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MoebiusMap;
use crate::error::{Error, Result};

/// Fixed-point moduli above this trigger a warning; coefficient decay and the
/// order-3 constant degrade as the fixed point approaches the circle.
pub const DEFAULT_MODULUS_CAP: f64 = 0.95;

/// A disk automorphism of finite order `p` with interior fixed point `a`,
/// built as `phi_a ∘ (z -> omega z) ∘ phi_a` with `omega = exp(2 pi i k / p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticSymbol {
    fixed_point: Complex64,
    order: u32,
    multiplier_index: u32,
    map: MoebiusMap,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl EllipticSymbol {
    pub fn new(a: Complex64, p: u32, k: u32) -> Result<Self> {
        Self::with_modulus_cap(a, p, k, DEFAULT_MODULUS_CAP)
    }

    /// Like [`EllipticSymbol::new`] but warns only when `|a| > cap`.
    pub fn with_modulus_cap(a: Complex64, p: u32, k: u32, cap: f64) -> Result<Self> {
        let modulus = a.norm();
        if !modulus.is_finite() || modulus >= 1.0 {
            return Err(Error::OutsideDisk { modulus });
        }
        if p < 2 {
            return Err(Error::InvalidOrder(p));
        }
        if k == 0 || k >= p || gcd(k, p) != 1 {
            return Err(Error::NotPrimitive { k, p });
        }
        if modulus > cap {
            log::warn!("fixed point modulus {modulus} exceeds {cap}; expect slow coefficient decay");
        }
        let omega = Complex64::from_polar(1.0, TAU * f64::from(k) / f64::from(p));
        // phi_a ∘ (z -> omega z) ∘ phi_a, multiplied out.
        let one = Complex64::new(1.0, 0.0);
        let r2 = a.norm_sqr();
        let map = MoebiusMap::new(
            omega - r2,
            a * (one - omega),
            a.conj() * (omega - one),
            one - r2 * omega,
        )?;
        Ok(Self {
            fixed_point: a,
            order: p,
            multiplier_index: k,
            map,
        })
    }

    pub fn fixed_point(&self) -> Complex64 {
        self.fixed_point
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn multiplier_index(&self) -> u32 {
        self.multiplier_index
    }

    pub fn map(&self) -> &MoebiusMap {
        &self.map
    }

    /// `phi'(a) = exp(2 pi i k / p)`.
    pub fn multiplier(&self) -> Complex64 {
        Complex64::from_polar(
            1.0,
            TAU * f64::from(self.multiplier_index) / f64::from(self.order),
        )
    }

    /// `conj(phi'(a))`, the non-trivial eigenvalue generator of the adjoint.
    pub fn adjoint_eigenvalue(&self) -> Complex64 {
        self.multiplier().conj()
    }

    /// Relative distance of the `p`-fold self-composition from the identity.
    pub fn order_residual(&self) -> Result<f64> {
        Ok(self.map.power(self.order)?.identity_residual())
    }

    pub fn fixed_point_residual(&self) -> f64 {
        (self.map.eval(self.fixed_point) - self.fixed_point).norm()
    }

    pub fn multiplier_residual(&self) -> f64 {
        (self.map.derivative(self.fixed_point) - self.multiplier()).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rotation_when_fixed_point_is_origin() {
        let s = EllipticSymbol::new(c(0.0, 0.0), 3, 1).unwrap();
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        let z = c(0.3, 0.2);
        assert_abs_diff_eq!((s.map().eval(z) - w * z).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn order_two_at_one_half() {
        let s = EllipticSymbol::new(c(0.5, 0.0), 2, 1).unwrap();
        let z = c(-0.1, 0.6);
        let direct = (c(0.8, 0.0) - z) / (c(1.0, 0.0) - 0.8 * z);
        assert_abs_diff_eq!((s.map().eval(z) - direct).norm(), 0.0, epsilon = 1e-15);
        assert!(s.fixed_point_residual() < 1e-15);
        assert_abs_diff_eq!((s.multiplier() - c(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert!(s.multiplier_residual() < 1e-14);
    }

    #[test]
    fn order_three_at_one_half() {
        let s = EllipticSymbol::new(c(0.5, 0.0), 3, 1).unwrap();
        assert!(s.fixed_point_residual() < 1e-15);
        assert!(s.multiplier_residual() < 1e-14);
        assert!(s.order_residual().unwrap() < 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            EllipticSymbol::new(c(1.0, 0.0), 3, 1),
            Err(Error::OutsideDisk { .. })
        ));
        assert_eq!(
            EllipticSymbol::new(c(0.2, 0.0), 4, 2).unwrap_err(),
            Error::NotPrimitive { k: 2, p: 4 }
        );
        assert_eq!(EllipticSymbol::new(c(0.2, 0.0), 1, 1).unwrap_err(), Error::InvalidOrder(1));
        assert!(EllipticSymbol::new(c(0.2, 0.0), 3, 3).is_err());
        assert!(EllipticSymbol::new(c(0.2, 0.0), 3, 0).is_err());
    }

    #[test]
    fn invariants_over_random_symbols() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let r = 0.9 * rng.random::<f64>().sqrt();
            let a = Complex64::from_polar(r, TAU * rng.random::<f64>());
            let p = rng.random_range(2..=7u32);
            let k = (1..p).filter(|&k| gcd(k, p) == 1).last().unwrap();
            let s = EllipticSymbol::new(a, p, k).unwrap();
            assert!(s.order_residual().unwrap() < 1e-12, "order residual for {a} p={p}");
            assert!(s.multiplier_residual() < 1e-12);
        }
    }

    #[test]
    fn involution_is_self_inverse_up_to_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let a = Complex64::from_polar(0.95 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
            let inv = MoebiusMap::involution(a).unwrap();
            assert!(inv.compose(&inv).unwrap().identity_residual() < 1e-12);
        }
    }

    #[test]
    fn order_residual_near_cap_is_conditioning_limited() {
        // Rounding the entries alone perturbs the p-th power by about
        // p * eps * cond(phi_a)^2, with cond(phi_a) = (1 + |a|) / (1 - |a|).
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let r = 0.9 + 0.05 * rng.random::<f64>();
            let a = Complex64::from_polar(r, TAU * rng.random::<f64>());
            let p = rng.random_range(2..=7u32);
            let s = EllipticSymbol::new(a, p, 1).unwrap();
            let cond = (1.0 + r) / (1.0 - r);
            let bound = 4.0 * f64::from(p) * f64::EPSILON * cond * cond;
            assert!(s.order_residual().unwrap() <= bound.max(1e-12));
        }
    }
}
