use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MoebiusMap;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Taylor coefficients of a function on the disk, truncated to `len()` terms.
///
/// Index `n` holds the coefficient of `z^n`. With the Hardy-space inner
/// product the coefficient vector is an isometric image of the function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidTruncation("series needs at least one term".into()));
        }
        if let Some(i) = coeffs.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "truncation order must be positive");
        Self {
            coeffs: vec![ZERO; n],
        }
    }

    /// The constant function 1.
    pub fn one(n: usize) -> Self {
        Self::monomial(0, n)
    }

    /// `z^k`, truncated to `n` terms (zero if `k >= n`).
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut s = Self::zeros(n);
        if k < n {
            s.coeffs[k] = ONE;
        }
        s
    }

    /// Normalized reproducing kernel `k_w(z) = sqrt(1 - |w|^2) / (1 - conj(w) z)`.
    pub fn kernel(w: Complex64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTruncation("series needs at least one term".into()));
        }
        let modulus = w.norm();
        if modulus >= 1.0 {
            return Err(Error::OutsideDisk { modulus });
        }
        let scale = ((1.0 - modulus) * (1.0 + modulus)).sqrt();
        let wc = w.conj();
        let mut coeffs = Vec::with_capacity(n);
        let mut p = Complex64::new(scale, 0.0);
        for _ in 0..n {
            coeffs.push(p);
            p *= wc;
        }
        Self::new(coeffs)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    fn check_len(&self, other: &TaylorSeries) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::TruncationMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    /// Truncated Cauchy product.
    pub fn multiply(&self, other: &TaylorSeries) -> Result<TaylorSeries> {
        self.check_len(other)?;
        let n = self.len();
        let mut out = vec![ZERO; n];
        for (i, &u) in self.coeffs.iter().enumerate() {
            if u == ZERO {
                continue;
            }
            for (o, &v) in out[i..].iter_mut().zip(&other.coeffs) {
                *o += u * v;
            }
        }
        Ok(Self { coeffs: out })
    }

    /// `k`-fold truncated product; `k = 0` gives the constant 1.
    pub fn power(&self, k: u32) -> TaylorSeries {
        let mut acc = Self::one(self.len());
        for _ in 0..k {
            acc = acc.multiply(self).expect("same truncation");
        }
        acc
    }

    /// Multiply by the Moebius function `(a z + b) / (c z + d)` in linear time.
    ///
    /// Equivalent to `multiply(&f.to_series(n))` but runs the division as a
    /// first-order recurrence; it is stable because the pole lies outside the
    /// unit disk.
    pub fn mul_moebius(&self, f: &MoebiusMap) -> Result<TaylorSeries> {
        if let Some(p) = f.pole() {
            if p.norm() <= 1.0 {
                return Err(Error::PoleInDisk { modulus: p.norm() });
            }
        }
        let [[a, b], [c, d]] = f.matrix();
        let mut out = Vec::with_capacity(self.len());
        let mut prev_in = ZERO;
        let mut prev_out = ZERO;
        for &x in &self.coeffs {
            let t = b * x + a * prev_in;
            let y = (t - c * prev_out) / d;
            out.push(y);
            prev_in = x;
            prev_out = y;
        }
        Ok(Self { coeffs: out })
    }

    /// First `len` coefficients of `self ∘ f`, by Horner's rule with
    /// [`TaylorSeries::mul_moebius`]; requires `f` to map the disk into itself.
    pub fn compose_moebius(&self, f: &MoebiusMap) -> Result<TaylorSeries> {
        let n = self.len();
        let mut acc = TaylorSeries::zeros(n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul_moebius(f)?;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Hardy inner product `sum u_n conj(v_n)`.
    pub fn inner(&self, other: &TaylorSeries) -> Result<Complex64> {
        self.check_len(other)?;
        Ok(inner_unchecked(&self.coeffs, &other.coeffs))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> TaylorSeries {
        Self {
            coeffs: self.coeffs.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &TaylorSeries) -> Result<()> {
        self.check_len(other)?;
        for (x, &y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += s * y;
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<TaylorSeries> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    /// Keep the first `n` coefficients.
    pub fn truncated(&self, n: usize) -> Result<TaylorSeries> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidTruncation(format!(
                "cannot truncate {} terms to {n}",
                self.len()
            )));
        }
        Ok(Self {
            coeffs: self.coeffs[..n].to_vec(),
        })
    }

    /// l2 norm of the coefficients with index `>= from`.
    pub fn tail_norm(&self, from: usize) -> f64 {
        self.coeffs
            .get(from..)
            .unwrap_or(&[])
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn inner_unchecked(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(x, y)| x * y.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn composition_with_moebius_matches_powers() {
        let f = TaylorSeries::new((0..12).map(|k| c(1.0 / (k as f64 + 1.0), 0.3 * k as f64)).collect()).unwrap();
        let phi = MoebiusMap::involution(c(0.4, -0.2)).unwrap();
        let got = f.compose_moebius(&phi).unwrap();
        let series = phi.to_series(12).unwrap();
        let mut want = TaylorSeries::zeros(12);
        for (k, &coef) in f.coeffs().iter().enumerate() {
            want.add_scaled(coef, &series.power(k as u32)).unwrap();
        }
        for (x, y) in got.coeffs().iter().zip(want.coeffs()) {
            assert!((x - y).norm() <= 1e-13, "{x} vs {y}");
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn series(v: &[f64]) -> TaylorSeries {
        TaylorSeries::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn product_of_one_plus_and_minus_z() {
        let p = series(&[1.0, 1.0, 0.0]).multiply(&series(&[1.0, -1.0, 0.0])).unwrap();
        assert_eq!(p.coeffs(), series(&[1.0, 0.0, -1.0]).coeffs());
    }

    #[test]
    fn cube_of_z() {
        let z = TaylorSeries::monomial(1, 5);
        assert_eq!(z.power(3).coeffs(), TaylorSeries::monomial(3, 5).coeffs());
        assert_eq!(z.power(0).coeffs(), TaylorSeries::one(5).coeffs());
    }

    #[test]
    fn mismatched_truncation_rejected() {
        let e = TaylorSeries::one(3).multiply(&TaylorSeries::one(4)).unwrap_err();
        assert_eq!(e, Error::TruncationMismatch { left: 3, right: 4 });
        assert!(TaylorSeries::one(3).inner(&TaylorSeries::one(2)).is_err());
    }

    #[test]
    fn invalid_coefficients_rejected() {
        assert!(TaylorSeries::new(vec![]).is_err());
        assert_eq!(TaylorSeries::new(vec![ONE, c(f64::NAN, 0.0)]).unwrap_err(), Error::NonFinite(1));
    }

    #[test]
    fn kernel_coefficients() {
        let k0 = TaylorSeries::kernel(ZERO, 4).unwrap();
        assert_eq!(k0.coeffs(), TaylorSeries::one(4).coeffs());
        let k = TaylorSeries::kernel(c(0.5, 0.0), 3).unwrap();
        let s = 0.75f64.sqrt();
        for (x, y) in k.coeffs().iter().zip([s, s * 0.5, s * 0.25]) {
            assert_abs_diff_eq!((x - c(y, 0.0)).norm(), 0.0, epsilon = 1e-16);
        }
        let k64 = TaylorSeries::kernel(c(0.5, 0.0), 64).unwrap();
        assert_abs_diff_eq!(k64.norm().powi(2), 1.0 - 0.5f64.powi(128), epsilon = 1e-15);
        assert!(matches!(
            TaylorSeries::kernel(c(0.6, 0.8), 4),
            Err(Error::OutsideDisk { .. })
        ));
    }

    #[test]
    fn inner_product_basics() {
        let z = TaylorSeries::monomial(1, 4);
        assert_eq!(z.inner(&z).unwrap(), ONE);
        let k = TaylorSeries::kernel(c(0.3, -0.4), 16).unwrap();
        let expected = 1.0 - 0.25f64.powi(16);
        assert_abs_diff_eq!(k.inner(&k).unwrap().re, expected, epsilon = 1e-15);
    }

    #[test]
    fn moebius_multiplication_matches_cauchy_product() {
        let f = MoebiusMap::involution(c(0.4, 0.3)).unwrap();
        let u = TaylorSeries::kernel(c(-0.2, 0.5), 40).unwrap();
        let fast = u.mul_moebius(&f).unwrap();
        let slow = u.multiply(&f.to_series(40).unwrap()).unwrap();
        for (x, y) in fast.coeffs().iter().zip(slow.coeffs()) {
            assert_abs_diff_eq!((x - y).norm(), 0.0, epsilon = 1e-14);
        }
    }

    fn arb_series(n: usize) -> impl Strategy<Value = TaylorSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n)
            .prop_map(|v| TaylorSeries::new(v.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn power_agrees_with_repeated_product(u in arb_series(12), k in 0u32..=8) {
            let mut acc = TaylorSeries::one(12);
            for _ in 0..k {
                acc = acc.multiply(&u).unwrap();
            }
            let p = u.power(k);
            for (x, y) in p.coeffs().iter().zip(acc.coeffs()) {
                prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
            }
        }

        #[test]
        fn product_is_commutative(u in arb_series(10), v in arb_series(10)) {
            let uv = u.multiply(&v).unwrap();
            let vu = v.multiply(&u).unwrap();
            for (x, y) in uv.coeffs().iter().zip(vu.coeffs()) {
                prop_assert!((x - y).norm() <= 1e-13);
            }
        }
    }
}
