use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::TaylorSeries;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative determinant below which a matrix is treated as degenerate.
const DEGENERATE_DET: f64 = 1e-14;

/// Linear fractional map `z -> (a z + b) / (c z + d)`.
///
/// The matrix is kept scaled to unit Frobenius norm; scaling does not change
/// the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    m: [[Complex64; 2]; 2],
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = [[a, b], [c, d]];
        if m.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Moebius entry".into()));
        }
        let frob2: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
        let det = (a * d - b * c).norm();
        if frob2 == 0.0 || det / frob2 < DEGENERATE_DET {
            return Err(Error::DegenerateMoebius {
                det: if frob2 == 0.0 { 0.0 } else { det / frob2 },
            });
        }
        let s = 1.0 / frob2.sqrt();
        Ok(Self {
            m: [[a * s, b * s], [c * s, d * s]],
        })
    }

    pub fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE).expect("identity is non-degenerate")
    }

    /// `z -> omega z`.
    pub fn rotation(omega: Complex64) -> Result<Self> {
        Self::new(omega, ZERO, ZERO, ONE)
    }

    /// The involution `z -> (a - z) / (1 - conj(a) z)` exchanging 0 and `a`.
    pub fn involution(a: Complex64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDisk { modulus: a.norm() });
        }
        Self::new(-ONE, a, -a.conj(), ONE)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let [[a, b], [c, d]] = self.m;
        (a * z + b) / (c * z + d)
    }

    /// Derivative by the quotient rule, `(ad - bc) / (cz + d)^2`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let [_, [c, d]] = self.m;
        let den = c * z + d;
        self.det() / (den * den)
    }

    /// `self ∘ inner`, i.e. `z -> self(inner(z))`.
    pub fn compose(&self, inner: &MoebiusMap) -> Result<Self> {
        let [[a, b], [c, d]] = self.m;
        let [[e, f], [g, h]] = inner.m;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    /// `n`-fold self-composition; `n = 0` is the identity.
    pub fn power(&self, n: u32) -> Result<Self> {
        let mut acc = Self::identity();
        for _ in 0..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Pole `-d/c`, or `None` for an affine map.
    pub fn pole(&self) -> Option<Complex64> {
        let [_, [c, d]] = self.m;
        if c.norm() <= f64::EPSILON * d.norm() {
            None
        } else {
            Some(-d / c)
        }
    }

    /// Distance between the two matrices up to a complex scale factor.
    ///
    /// Both matrices have unit Frobenius norm, so the best scale is the
    /// Frobenius inner product and the result lies in `[0, 1]`.
    pub fn projective_distance(&self, other: &MoebiusMap) -> f64 {
        let lhs = self.m.iter().flatten();
        let rhs = other.m.iter().flatten();
        let scale: Complex64 = lhs.clone().zip(rhs.clone()).map(|(x, y)| x * y.conj()).sum();
        lhs.zip(rhs)
            .map(|(x, y)| (x - scale * y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Relative distance of the matrix from a multiple of the identity.
    pub fn identity_residual(&self) -> f64 {
        self.projective_distance(&Self::identity())
    }

    /// Taylor coefficients about 0 up to degree `n - 1`.
    ///
    /// Requires the pole to lie strictly outside the closed unit disk.
    pub fn to_series(&self, n: usize) -> Result<TaylorSeries> {
        if n == 0 {
            return Err(Error::InvalidTruncation("series needs at least one term".into()));
        }
        if let Some(p) = self.pole() {
            if p.norm() <= 1.0 {
                return Err(Error::PoleInDisk { modulus: p.norm() });
            }
        }
        let [[a, b], [c, d]] = self.m;
        // (a z + b) / d * sum (-c/d)^k z^k
        let ratio = -c / d;
        let mut coeffs = Vec::with_capacity(n);
        let mut geo = ONE;
        let mut prev_geo = ZERO;
        for k in 0..n {
            let term = if k == 0 { b / d } else { (b * geo + a * prev_geo) / d };
            coeffs.push(term);
            prev_geo = geo;
            geo *= ratio;
        }
        TaylorSeries::new(coeffs)
    }
}

impl Default for MoebiusMap {
    fn default() -> Self {
        Self::identity()
    }
}
