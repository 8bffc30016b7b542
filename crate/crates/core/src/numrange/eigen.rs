//! Largest eigenpair of a Hermitian matrix.
//!
//! Small matrices go through a full dense eigendecomposition. Larger ones use
//! Lanczos with full (two-pass classical Gram-Schmidt) reorthogonalization,
//! a fixed-seed start vector and residual-controlled stopping. The top Ritz
//! pair of the tridiagonal is found by Sturm bisection and inverse iteration.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Stop when `||H v - lambda v|| <= tol * ||H||`.
    pub tol: f64,
    /// Matrices up to this order are solved densely.
    pub dense_limit: usize,
    /// Seed of the Lanczos start (and restart) vectors.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            dense_limit: 64,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit vector; its largest-modulus entry is real and positive.
    pub vector: DVector<Complex64>,
    /// `||H v - value v||`.
    pub residual: f64,
    /// Estimate of `||H||` used for the relative stopping rule.
    pub norm_estimate: f64,
    /// Lanczos steps taken; zero for the dense path.
    pub steps: usize,
}

/// `y = H x` for a column-major dense matrix.
pub(crate) fn matvec(h: &DMatrix<Complex64>, x: &[Complex64], y: &mut [Complex64]) {
    y.fill(ZERO);
    let n = h.nrows();
    let data = h.as_slice();
    for (j, &xj) in x.iter().enumerate() {
        if xj == ZERO {
            continue;
        }
        let col = &data[j * n..(j + 1) * n];
        for (yi, &hij) in y.iter_mut().zip(col) {
            *yi += hij * xj;
        }
    }
}

fn norm(u: &[Complex64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn residual_norm(h: &DMatrix<Complex64>, v: &[Complex64], lambda: f64) -> f64 {
    let mut hv = vec![ZERO; v.len()];
    matvec(h, v, &mut hv);
    axpy(Complex64::new(-lambda, 0.0), v, &mut hv);
    norm(&hv)
}

/// Scale so the largest-modulus entry is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let pivot = v
        .iter()
        .copied()
        .enumerate()
        .fold((0usize, -1.0f64), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
        .0;
    let p = v[pivot];
    if p.norm() > 0.0 {
        let rot = p.conj() / p.norm();
        v.iter_mut().for_each(|z| *z *= rot);
        v[pivot] = Complex64::new(v[pivot].re, 0.0);
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|z| *z *= s);
    v
}

/// Number of eigenvalues of the symmetric tridiagonal `(d, e)` below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = f64::EPSILON * (d[i].abs() + 1.0).max(1e-300);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalue number `k` (ascending, zero-based) of a symmetric tridiagonal.
fn tridiagonal_eigenvalue(d: &[f64], e: &[f64], k: usize) -> f64 {
    let m = d.len();
    let mut radius = 0.0f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < m { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
        radius = radius.max(d[i].abs() + r);
    }
    let pad = f64::EPSILON * radius.max(1e-300);
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * radius {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve `(T - shift I) x = b` for symmetric tridiagonal `T` by Gaussian
/// elimination with partial pivoting.
fn tridiagonal_solve(d: &[f64], e: &[f64], shift: f64, b: &[f64]) -> Vec<f64> {
    let m = d.len();
    if m == 1 {
        let p = d[0] - shift;
        return vec![b[0] / if p == 0.0 { f64::EPSILON } else { p }];
    }
    // Row i holds (u0, u1, u2) at columns i, i+1, i+2 after elimination.
    let mut u0: Vec<f64> = (0..m).map(|i| d[i] - shift).collect();
    let mut u1: Vec<f64> = (0..m).map(|i| if i + 1 < m { e[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0f64; m];
    let mut lower: Vec<f64> = (0..m).map(|i| if i > 0 { e[i - 1] } else { 0.0 }).collect();
    let mut rhs = b.to_vec();
    let tiny = f64::EPSILON * d.iter().chain(e).fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    for i in 0..m - 1 {
        // Candidate pivot rows: i (u0[i], u1[i], u2[i]) and i+1 (lower[i+1], u0[i+1], u1[i+1]).
        if lower[i + 1].abs() > u0[i].abs() {
            let (a0, a1, a2) = (lower[i + 1], u0[i + 1], u1[i + 1]);
            let (b0, b1, b2) = (u0[i], u1[i], u2[i]);
            u0[i] = a0;
            u1[i] = a1;
            u2[i] = a2;
            rhs.swap(i, i + 1);
            let f = b0 / a0;
            u0[i + 1] = b1 - f * a1;
            u1[i + 1] = b2 - f * a2;
            rhs[i + 1] -= f * rhs[i];
        } else {
            if u0[i] == 0.0 {
                u0[i] = tiny;
            }
            let f = lower[i + 1] / u0[i];
            u0[i + 1] -= f * u1[i];
            u1[i + 1] -= f * u2[i];
            rhs[i + 1] -= f * rhs[i];
        }
        lower[i + 1] = 0.0;
    }
    if u0[m - 1] == 0.0 {
        u0[m - 1] = tiny;
    }
    let mut x = vec![0.0f64; m];
    for i in (0..m).rev() {
        let mut s = rhs[i];
        if i + 1 < m {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < m {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / u0[i];
    }
    x
}

/// Largest eigenpair of a symmetric tridiagonal matrix.
fn tridiagonal_top(d: &[f64], e: &[f64]) -> (f64, Vec<f64>) {
    let m = d.len();
    let theta = tridiagonal_eigenvalue(d, e, m - 1);
    let scale = d.iter().chain(e).fold(0.0f64, |s, x| s.max(x.abs())).max(1e-300);
    let shift = theta + 8.0 * f64::EPSILON * scale;
    let mut x = vec![1.0f64; m];
    for _ in 0..3 {
        let y = tridiagonal_solve(d, e, shift, &x);
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / n).collect();
    }
    (theta, x)
}

/// Dense Hermitian eigensolve; also serves as the test oracle.
pub fn dense_top_eigenpair(h: &DMatrix<Complex64>) -> Result<EigenPair> {
    let n = h.nrows();
    if n == 0 || !h.is_square() {
        return Err(Error::InvalidArgument("empty or non-square matrix".into()));
    }
    let eig = SymmetricEigen::new(h.clone());
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let mut v: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
    let s = 1.0 / norm(&v);
    v.iter_mut().for_each(|z| *z *= s);
    fix_phase(&mut v);
    let norm_estimate = eig.eigenvalues.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let residual = residual_norm(h, &v, value);
    Ok(EigenPair {
        value,
        vector: DVector::from_vec(v),
        residual,
        norm_estimate,
        steps: 0,
    })
}

/// Complex vector stored as separate real and imaginary parts so the inner
/// loops vectorize.
#[derive(Clone)]
struct Split {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Split {
    fn zeros(n: usize) -> Self {
        Self {
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    fn from_complex(v: &[Complex64]) -> Self {
        Self {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }

    fn norm(&self) -> f64 {
        let s: f64 = self.re.iter().zip(&self.im).map(|(r, i)| r * r + i * i).sum();
        s.sqrt()
    }

    /// `conj(self) . other`.
    fn dot(&self, other: &Split) -> Complex64 {
        // Four independent accumulators so the reduction vectorizes.
        let mut re = [0.0f64; 4];
        let mut im = [0.0f64; 4];
        let n = self.re.len();
        let body = n - n % 4;
        for k in (0..body).step_by(4) {
            for l in 0..4 {
                let (ar, ai, br, bi) = (self.re[k + l], self.im[k + l], other.re[k + l], other.im[k + l]);
                re[l] += ar * br + ai * bi;
                im[l] += ar * bi - ai * br;
            }
        }
        for k in body..n {
            re[0] += self.re[k] * other.re[k] + self.im[k] * other.im[k];
            im[0] += self.re[k] * other.im[k] - self.im[k] * other.re[k];
        }
        Complex64::new(re.iter().sum(), im.iter().sum())
    }

    /// `self += c x`.
    fn axpy(&mut self, c: Complex64, x: &Split) {
        let (cr, ci) = (c.re, c.im);
        for k in 0..self.re.len() {
            self.re[k] += cr * x.re[k] - ci * x.im[k];
            self.im[k] += cr * x.im[k] + ci * x.re[k];
        }
    }

    fn scale(&mut self, s: f64) {
        self.re.iter_mut().chain(self.im.iter_mut()).for_each(|x| *x *= s);
    }
}

/// Column-major matrix with split real and imaginary parts.
struct SplitMatrix {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl SplitMatrix {
    fn new(h: &DMatrix<Complex64>) -> Self {
        Self {
            n: h.nrows(),
            re: h.iter().map(|z| z.re).collect(),
            im: h.iter().map(|z| z.im).collect(),
        }
    }

    fn apply(&self, x: &Split, y: &mut Split) {
        let n = self.n;
        y.re.fill(0.0);
        y.im.fill(0.0);
        for j in 0..n {
            let (xr, xi) = (x.re[j], x.im[j]);
            let cr = &self.re[j * n..(j + 1) * n];
            let ci = &self.im[j * n..(j + 1) * n];
            for k in 0..n {
                y.re[k] += cr[k] * xr - ci[k] * xi;
                y.im[k] += cr[k] * xi + ci[k] * xr;
            }
        }
    }
}

/// One classical Gram-Schmidt pass against `basis`, repeated once more when
/// the norm drops by more than `1/sqrt(2)`; returns the norm left.
fn reorthogonalize(basis: &[Split], w: &mut Split) -> f64 {
    let mut before = w.norm();
    for _ in 0..2 {
        let coeffs: Vec<Complex64> = basis.iter().map(|q| q.dot(w)).collect();
        for (q, c) in basis.iter().zip(coeffs) {
            w.axpy(-c, q);
        }
        let after = w.norm();
        if after > std::f64::consts::FRAC_1_SQRT_2 * before {
            return after;
        }
        before = after;
    }
    before
}

/// Lanczos top eigenpair, independent of the dense limit.
pub fn lanczos_top_eigenpair(h: &DMatrix<Complex64>, opts: &EigenOptions) -> Result<EigenPair> {
    let n = h.nrows();
    if n == 0 || !h.is_square() {
        return Err(Error::InvalidArgument("empty or non-square matrix".into()));
    }
    let hs = SplitMatrix::new(h);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Split> = Vec::with_capacity(n.min(256));
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = Split::from_complex(&random_unit(&mut rng, n));
    let mut w = Split::zeros(n);
    let mut best = f64::INFINITY;
    let check_every = 8;

    loop {
        hs.apply(&q, &mut w);
        let alpha = q.dot(&w).re;
        w.axpy(Complex64::new(-alpha, 0.0), &q);
        if let (Some(prev), Some(&b)) = (basis.last(), betas.last()) {
            w.axpy(Complex64::new(-b, 0.0), prev);
        }
        basis.push(q);
        alphas.push(alpha);
        let beta = reorthogonalize(&basis, &mut w);
        let m = basis.len();

        let exhausted = m == n;
        let scale = alphas
            .iter()
            .chain(betas.iter())
            .fold(0.0f64, |s, x| s.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        let breakdown = beta <= 1e-13 * scale;
        if exhausted || breakdown || m % check_every == 0 {
            let (theta, s) = tridiagonal_top(&alphas, &betas);
            let lo = tridiagonal_eigenvalue(&alphas, &betas, 0);
            let norm_estimate = theta.abs().max(lo.abs()).max(f64::MIN_POSITIVE);
            let estimate = beta * s[m - 1].abs();
            best = best.min(estimate);
            if estimate <= opts.tol * norm_estimate || exhausted {
                let mut acc = Split::zeros(n);
                for (qi, &si) in basis.iter().zip(&s) {
                    acc.axpy(Complex64::new(si, 0.0), qi);
                }
                let mut v: Vec<Complex64> = acc.re.iter().zip(&acc.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
                let inv = 1.0 / norm(&v);
                v.iter_mut().for_each(|z| *z *= inv);
                let residual = residual_norm(h, &v, theta);
                if residual <= 10.0 * opts.tol * norm_estimate || exhausted {
                    fix_phase(&mut v);
                    return Ok(EigenPair {
                        value: theta,
                        vector: DVector::from_vec(v),
                        residual,
                        norm_estimate,
                        steps: m,
                    });
                }
                best = best.min(residual);
            }
        }
        if exhausted {
            return Err(Error::NoConvergence { residual: best });
        }
        if breakdown {
            // Invariant subspace: continue with a fresh direction.
            let mut fresh = Split::from_complex(&random_unit(&mut rng, n));
            let left = reorthogonalize(&basis, &mut fresh);
            if left <= 1e-8 {
                return Err(Error::NoConvergence { residual: best });
            }
            fresh.scale(1.0 / left);
            betas.push(0.0);
            q = fresh;
        } else {
            betas.push(beta);
            w.scale(1.0 / beta);
            q = std::mem::replace(&mut w, Split::zeros(n));
        }
    }
}

/// Largest eigenvalue and a unit eigenvector of a Hermitian matrix.
pub fn top_eigenpair(h: &DMatrix<Complex64>, opts: &EigenOptions) -> Result<EigenPair> {
    debug_assert!(
        (h - h.adjoint()).camax() <= 1e-12 * h.camax().max(1.0),
        "matrix is not Hermitian"
    );
    if h.nrows() <= opts.dense_limit {
        dense_top_eigenpair(h)
    } else {
        lanczos_top_eigenpair(h, opts)
    }
}
