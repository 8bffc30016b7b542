//! Truncated matrices of composition operators on the Hardy space, the
//! Guyker basis `e_j = k_a phi_a^j`, and eigenspace bases of the adjoint.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk_maps::{EllipticSymbol, MoebiusMap, TaylorSeries};
use crate::error::{Error, Result};

/// Default truncation order for a fixed point of the given modulus.
pub fn default_truncation(modulus: f64) -> usize {
    if modulus <= 0.6 {
        256
    } else if modulus <= 0.8 {
        512
    } else {
        1024
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Monomial,
    Guyker,
}

/// Dense `N x N` compression of an operator on the Hardy space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    basis: Basis,
    symbol: Option<EllipticSymbol>,
}

impl OperatorMatrix {
    /// Wrap an arbitrary square matrix (monomial basis, no symbol).
    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "operator matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if let Some(i) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            entries,
            basis: Basis::Monomial,
            symbol: None,
        })
    }

    /// Monomial-basis matrix of `C_phi`: column `k` holds the Taylor
    /// coefficients of `phi^k`.
    pub fn composition(symbol: &EllipticSymbol, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTruncation(format!("need N >= 2, got {n}")));
        }
        let map = symbol.map();
        let mut entries = DMatrix::<Complex64>::zeros(n, n);
        let mut column = TaylorSeries::one(n);
        for k in 0..n {
            entries.column_mut(k).copy_from_slice(column.coeffs());
            if k + 1 < n {
                column = column.mul_moebius(map)?;
            }
        }
        Ok(Self {
            entries,
            basis: Basis::Monomial,
            symbol: Some(*symbol),
        })
    }

    /// Matrix of `C_phi^*` on `span{e_0, ..., e_{m-1}}` in the Guyker basis.
    /// The span is invariant, so this is a restriction rather than a
    /// truncation: `T[m][m] = mu^m` and `T[j][m] = a^{m-j} mu^j (1 - mu)` for
    /// `j < m`, with `mu` the adjoint eigenvalue.
    pub fn guyker_adjoint(symbol: &EllipticSymbol, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidTruncation(format!("need N >= 2, got {m}")));
        }
        let a = symbol.fixed_point();
        if a.norm() == 0.0 {
            return Err(Error::ZeroFixedPoint);
        }
        let mu = symbol.adjoint_eigenvalue();
        let one_minus = Complex64::new(1.0, 0.0) - mu;
        let mu_pow: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |z| Some(z * mu))
            .take(m)
            .collect();
        let entries = DMatrix::from_fn(m, m, |j, k| match j.cmp(&k) {
            std::cmp::Ordering::Equal => mu_pow[k],
            std::cmp::Ordering::Less => a.powu((k - j) as u32) * mu_pow[j] * one_minus,
            std::cmp::Ordering::Greater => Complex64::new(0.0, 0.0),
        });
        Ok(Self {
            entries,
            basis: Basis::Guyker,
            symbol: Some(*symbol),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn symbol(&self) -> Option<&EllipticSymbol> {
        self.symbol.as_ref()
    }

    /// Conjugate transpose. Compression commutes with the adjoint, so this is
    /// also the compression of the adjoint operator.
    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            basis: self.basis,
            symbol: self.symbol,
        }
    }

    pub fn apply(&self, f: &TaylorSeries) -> Result<TaylorSeries> {
        if f.len() != self.dim() {
            return Err(Error::TruncationMismatch {
                left: self.dim(),
                right: f.len(),
            });
        }
        let x = DVector::from_column_slice(f.coeffs());
        let y = &self.entries * x;
        TaylorSeries::new(y.as_slice().to_vec())
    }

    /// `<T f, f>`.
    pub fn quadratic_form(&self, f: &TaylorSeries) -> Result<Complex64> {
        self.apply(f)?.inner(f)
    }

    pub fn to_export(&self) -> MatrixExport {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixExport {
            n,
            basis: self.basis,
            symbol: self.symbol.as_ref().map(SymbolExport::from),
            entries,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolExport {
    pub a_re: f64,
    pub a_im: f64,
    pub p: u32,
    pub k: u32,
}

impl From<&EllipticSymbol> for SymbolExport {
    fn from(s: &EllipticSymbol) -> Self {
        Self {
            a_re: s.fixed_point().re,
            a_im: s.fixed_point().im,
            p: s.order(),
            k: s.multiplier_index(),
        }
    }
}

/// JSON layout of an exported matrix; `entries` is row-major `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub n: usize,
    pub basis: Basis,
    pub symbol: Option<SymbolExport>,
    pub entries: Vec<[f64; 2]>,
}

/// `e_j = k_a phi_a^j` for `j < J`, truncated to `N` coefficients.
///
/// The vectors are generated at length `2N`; the coefficient mass falling in
/// `[N, 2N)` is kept as the truncation estimate.
#[derive(Debug, Clone)]
pub struct GuykerBasis {
    a: Complex64,
    vectors: Vec<TaylorSeries>,
    tails: Vec<f64>,
}

impl GuykerBasis {
    pub fn new(a: Complex64, count: usize, n: usize) -> Result<Self> {
        let modulus = a.norm();
        if modulus >= 1.0 {
            return Err(Error::OutsideDisk { modulus });
        }
        if count == 0 || 2 * count > n {
            return Err(Error::InvalidTruncation(format!(
                "need 1 <= J <= N/2, got J = {count}, N = {n}"
            )));
        }
        let phi_a = MoebiusMap::involution(a)?;
        let mut current = TaylorSeries::kernel(a, 2 * n)?;
        let mut vectors = Vec::with_capacity(count);
        let mut tails = Vec::with_capacity(count);
        for j in 0..count {
            tails.push(current.tail_norm(n));
            vectors.push(current.truncated(n)?);
            if j + 1 < count {
                current = current.mul_moebius(&phi_a)?;
            }
        }
        Ok(Self { a, vectors, tails })
    }

    pub fn fixed_point(&self) -> Complex64 {
        self.a
    }

    pub fn vectors(&self) -> &[TaylorSeries] {
        &self.vectors
    }

    pub fn truncation(&self) -> usize {
        self.vectors[0].len()
    }

    /// Estimated coefficient mass lost to truncation, per vector.
    pub fn tails(&self) -> &[f64] {
        &self.tails
    }

    pub fn truncation_error(&self) -> f64 {
        self.tails.iter().copied().fold(0.0, f64::max)
    }

    /// `max |<e_i, e_j> - delta_ij|`.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, u) in self.vectors.iter().enumerate() {
            for (j, v) in self.vectors.iter().enumerate().skip(i) {
                let g = u.inner(v).expect("same truncation");
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Orthonormal basis of `Ker(C_phi^* - mu^r)` truncated to `jmax` vectors:
/// `e_0` (when `r = 0`) and `(e_{pj+r} - a e_{pj+r-1}) / sqrt(1 + |a|^2)`.
#[derive(Debug, Clone)]
pub struct EigenspaceBasis {
    residue: u32,
    eigenvalue: Complex64,
    vectors: Vec<TaylorSeries>,
    truncation_error: f64,
}

impl EigenspaceBasis {
    pub fn residue(&self) -> u32 {
        self.residue
    }

    /// `mu^r` with `mu = conj(phi'(a))`.
    pub fn eigenvalue(&self) -> Complex64 {
        self.eigenvalue
    }

    pub fn vectors(&self) -> &[TaylorSeries] {
        &self.vectors
    }

    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    /// Orthogonal projection `sum <f, b_j> b_j`.
    pub fn project(&self, f: &TaylorSeries) -> Result<TaylorSeries> {
        let mut out = TaylorSeries::zeros(f.len());
        for b in &self.vectors {
            out.add_scaled(f.inner(b)?, b)?;
        }
        Ok(out)
    }
}

/// Eigenspace basis from an already-built Guyker basis.
pub fn eigenspace_basis_from(
    symbol: &EllipticSymbol,
    guyker: &GuykerBasis,
    r: u32,
    jmax: usize,
) -> Result<EigenspaceBasis> {
    let a = symbol.fixed_point();
    if a.norm() == 0.0 {
        return Err(Error::ZeroFixedPoint);
    }
    if (guyker.fixed_point() - a).norm() > 0.0 {
        return Err(Error::InvalidArgument("Guyker basis built for a different fixed point".into()));
    }
    let p = symbol.order();
    if r >= p {
        return Err(Error::InvalidArgument(format!("residue {r} must be below order {p}")));
    }
    if jmax == 0 {
        return Err(Error::InvalidArgument("need at least one eigenspace vector".into()));
    }
    let needed = p as usize * (jmax - 1) + r as usize + 1;
    if guyker.vectors().len() < needed {
        return Err(Error::InvalidTruncation(format!(
            "Guyker basis has {} vectors, {needed} needed",
            guyker.vectors().len()
        )));
    }
    let e = guyker.vectors();
    let tails = guyker.tails();
    let scale = Complex64::new(1.0 / (1.0 + a.norm_sqr()).sqrt(), 0.0);
    let mut vectors = Vec::with_capacity(jmax);
    let mut err = 0.0f64;
    for j in 0..jmax {
        let idx = p as usize * j + r as usize;
        if idx == 0 {
            vectors.push(e[0].clone());
            err = err.max(tails[0]);
        } else {
            let mut v = e[idx].clone();
            v.add_scaled(-a, &e[idx - 1])?;
            vectors.push(v.scaled(scale));
            err = err.max((tails[idx] + a.norm() * tails[idx - 1]) * scale.re);
        }
    }
    Ok(EigenspaceBasis {
        residue: r,
        eigenvalue: symbol.adjoint_eigenvalue().powu(r),
        vectors,
        truncation_error: err,
    })
}

/// Eigenspace basis of the adjoint for residue `r`, see [`EigenspaceBasis`].
pub fn eigenspace_basis(
    symbol: &EllipticSymbol,
    r: u32,
    jmax: usize,
    n: usize,
) -> Result<EigenspaceBasis> {
    if symbol.fixed_point().norm() == 0.0 {
        return Err(Error::ZeroFixedPoint);
    }
    let count = symbol.order() as usize * jmax.max(1);
    let guyker = GuykerBasis::new(symbol.fixed_point(), count, n)?;
    eigenspace_basis_from(symbol, &guyker, r, jmax)
}

/// Smallest power-of-two multiple of `start` for which the Guyker vectors
/// `e_0 .. e_{count-1}` lose at most `tol` to truncation.
pub fn adaptive_truncation(a: Complex64, count: usize, start: usize, tol: f64) -> Result<usize> {
    let mut n = start.max(2 * count);
    loop {
        let basis = GuykerBasis::new(a, count, n)?;
        if basis.truncation_error() <= tol {
            return Ok(n);
        }
        if n >= 1 << 16 {
            return Err(Error::InvalidTruncation(format!(
                "no truncation below {} reaches tail {tol:e}",
                1 << 16
            )));
        }
        n *= 2;
    }
}

/// Normalized linear combination `sum c_j b_j`.
pub fn eigenspace_sample(basis: &[TaylorSeries], coeffs: &[Complex64]) -> Result<TaylorSeries> {
    if basis.is_empty() || basis.len() != coeffs.len() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients for {} basis vectors",
            coeffs.len(),
            basis.len()
        )));
    }
    if coeffs.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::ZeroVector);
    }
    let mut f = TaylorSeries::zeros(basis[0].len());
    for (b, &c) in basis.iter().zip(coeffs) {
        f.add_scaled(c, b)?;
    }
    f.normalized()
}
