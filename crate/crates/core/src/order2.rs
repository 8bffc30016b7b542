//! Order-2 symbols: the closed-form elliptical numerical range and the
//! sampling machinery behind the strict boundary exclusion.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disk_maps::{EllipticSymbol, TaylorSeries};
use crate::error::{Error, Result};
use crate::hardy_operator::{
    adaptive_truncation, default_truncation, eigenspace_basis_from, EigenspaceBasis, GuykerBasis, OperatorMatrix,
};
use crate::numrange::BoundaryPolyline;
use crate::report::{CheckComponent, CheckReport};

/// Gaussian samples use this many vectors from each eigenspace.
pub const GAUSSIAN_SPAN: usize = 32;
/// Size of the extremal correlation probe in each eigenspace.
pub const EXTREMAL_SPAN: usize = 64;
/// Samples with `s` this close to the bound are reported as touching it.
pub const BOUNDARY_FLAG: f64 = 1e-12;
const BATCH: usize = 256;

/// The ellipse with foci `+-1` and semi-axes `A = (1+|a|^2)/(1-|a|^2)`,
/// `B = 2|a|/(1-|a|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipseModel {
    pub fixed_point: Complex64,
    pub semi_major: f64,
    pub semi_minor: f64,
}

impl EllipseModel {
    pub fn new(a: Complex64) -> Result<Self> {
        let r = a.norm();
        if r >= 1.0 || !r.is_finite() {
            return Err(Error::OutsideDisk { modulus: r });
        }
        if r == 0.0 {
            return Err(Error::ZeroFixedPoint);
        }
        let d = (1.0 - r) * (1.0 + r);
        Ok(Self {
            fixed_point: a,
            semi_major: (1.0 + r * r) / d,
            semi_minor: 2.0 * r / d,
        })
    }

    pub fn foci(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    /// `A^2 - B^2`, which is 1 for this family.
    pub fn focal_defect(&self) -> f64 {
        (self.semi_major - self.semi_minor) * (self.semi_major + self.semi_minor) - 1.0
    }

    /// `sqrt(A^2 cos^2 alpha + B^2 sin^2 alpha)`.
    pub fn support(&self, alpha: f64) -> f64 {
        let (s, c) = alpha.sin_cos();
        (self.semi_major * c).hypot(self.semi_minor * s)
    }

    /// Point of the ellipse where the support line at `alpha` touches it.
    pub fn boundary_point(&self, alpha: f64) -> Complex64 {
        let (s, c) = alpha.sin_cos();
        let h = self.support(alpha);
        Complex64::new(self.semi_major.powi(2) * c / h, self.semi_minor.powi(2) * s / h)
    }

    pub fn polyline(&self, angles: &[f64]) -> BoundaryPolyline {
        BoundaryPolyline::new(angles.iter().map(|&t| self.boundary_point(t)).collect(), true)
    }

    /// `(|1 - q| + |1 + q|) / 2`: the semi-major axis of the confocal
    /// ellipse through `q`.
    pub fn focal_radius(q: Complex64) -> f64 {
        0.5 * ((Complex64::new(1.0, 0.0) - q).norm() + (Complex64::new(1.0, 0.0) + q).norm())
    }

    /// `2|a| / (1 + |a|^2)`, the supremum of eigenspace correlations.
    pub fn correlation_bound(&self) -> f64 {
        let r = self.fixed_point.norm();
        2.0 * r / (1.0 + r * r)
    }
}

fn require_order_two(sym: &EllipticSymbol) -> Result<()> {
    if sym.order() != 2 {
        return Err(Error::WrongOrder {
            expected: 2,
            actual: sym.order(),
        });
    }
    Ok(())
}

/// Modulus and argument of `<f1, f2> / (||f1|| ||f2||)`.
pub fn pair_correlation(sym: &EllipticSymbol, f1: &TaylorSeries, f2: &TaylorSeries) -> Result<(f64, f64)> {
    require_order_two(sym)?;
    let (n1, n2) = (f1.norm(), f2.norm());
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let g = f1.inner(f2)? / (n1 * n2);
    Ok((g.norm(), g.arg()))
}

/// Outcome of one exclusion trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionRecord {
    /// `<C_phi^* f, f>`.
    pub q: Complex64,
    pub s: f64,
    /// `| |1-q|^2/4 - |1+q|^2/4 - (||f_2||^2 - ||f_1||^2) |`.
    pub id21_residual: f64,
    /// `||f - f_1 - f_2||` after projecting on the truncated eigenspaces.
    pub projection_residual: f64,
    /// `s` within [`BOUNDARY_FLAG`] of the bound.
    pub at_bound: bool,
}

/// Least-squares coefficients against a (not necessarily orthogonal) basis
/// via the Cholesky factor of its Gram matrix.
struct Projector {
    basis: Vec<TaylorSeries>,
    chol: nalgebra::Cholesky<Complex64, nalgebra::Dyn>,
}

impl Projector {
    fn new(basis: &[TaylorSeries]) -> Result<Self> {
        let m = basis.len();
        // gram[(j, k)] = <b_k, b_j>
        let gram = DMatrix::from_fn(m, m, |j, k| basis[k].inner(&basis[j]).expect("same truncation"));
        let chol = nalgebra::Cholesky::new(gram)
            .ok_or_else(|| Error::InvalidArgument("eigenspace Gram matrix is not positive definite".into()))?;
        Ok(Self {
            basis: basis.to_vec(),
            chol,
        })
    }

    fn coefficients(&self, f: &TaylorSeries) -> DVector<Complex64> {
        let rhs = DVector::from_iterator(self.basis.len(), self.basis.iter().map(|b| f.inner(b).expect("same truncation")));
        self.chol.solve(&rhs)
    }

    /// `sum c_k b_k` over `range`.
    fn combine(&self, c: &DVector<Complex64>, range: std::ops::Range<usize>) -> Result<TaylorSeries> {
        let mut out = TaylorSeries::zeros(self.basis[0].len());
        for k in range {
            out.add_scaled(c[k], &self.basis[k])?;
        }
        Ok(out)
    }
}

/// Compressed adjoint plus truncated eigenspace bases for one order-2 symbol.
pub struct Order2Frame {
    symbol: EllipticSymbol,
    model: EllipseModel,
    adjoint: OperatorMatrix,
    plus: EigenspaceBasis,
    minus: EigenspaceBasis,
    /// Joint projector on `plus ++ minus`; the eigenspaces are not orthogonal.
    projector: Projector,
}

impl Order2Frame {
    /// `jmax` vectors per eigenspace; `n = None` picks the truncation
    /// adaptively so the Guyker tails stay below `1e-10`.
    pub fn new(symbol: &EllipticSymbol, jmax: usize, n: Option<usize>) -> Result<Self> {
        require_order_two(symbol)?;
        let model = EllipseModel::new(symbol.fixed_point())?;
        let a = symbol.fixed_point();
        let count = 2 * jmax;
        let n = match n {
            Some(n) => n,
            None => adaptive_truncation(a, count, default_truncation(a.norm()), 1e-10)?,
        };
        let guyker = GuykerBasis::new(a, count, n)?;
        let plus = eigenspace_basis_from(symbol, &guyker, 0, jmax)?;
        let minus = eigenspace_basis_from(symbol, &guyker, 1, jmax)?;
        let joint: Vec<TaylorSeries> = plus.vectors().iter().chain(minus.vectors()).cloned().collect();
        let projector = Projector::new(&joint)?;
        Ok(Self {
            symbol: *symbol,
            model,
            adjoint: OperatorMatrix::composition(symbol, n)?.adjoint(),
            plus,
            minus,
            projector,
        })
    }

    pub fn symbol(&self) -> &EllipticSymbol {
        &self.symbol
    }

    pub fn model(&self) -> &EllipseModel {
        &self.model
    }

    pub fn truncation(&self) -> usize {
        self.adjoint.dim()
    }

    pub fn adjoint(&self) -> &OperatorMatrix {
        &self.adjoint
    }

    /// Eigenspace of the adjoint for eigenvalue `+1`.
    pub fn plus(&self) -> &EigenspaceBasis {
        &self.plus
    }

    /// Eigenspace of the adjoint for eigenvalue `-1`.
    pub fn minus(&self) -> &EigenspaceBasis {
        &self.minus
    }

    pub fn truncation_error(&self) -> f64 {
        self.plus.truncation_error().max(self.minus.truncation_error())
    }

    /// `f = f_1 + f_2` with `f_1` in the `+1` and `f_2` in the `-1`
    /// eigenspace; also returns `||f - f_1 - f_2||`.
    pub fn decompose(&self, f: &TaylorSeries) -> Result<(TaylorSeries, TaylorSeries, f64)> {
        let c = self.projector.coefficients(f);
        let m = self.plus.vectors().len();
        let f1 = self.projector.combine(&c, 0..m)?;
        let f2 = self.projector.combine(&c, m..2 * m)?;
        let mut rest = f.clone();
        rest.add_scaled(Complex64::new(-1.0, 0.0), &f1)?;
        rest.add_scaled(Complex64::new(-1.0, 0.0), &f2)?;
        Ok((f1, f2, rest.norm()))
    }

    pub fn exclusion_statistic(&self, f: &TaylorSeries) -> Result<ExclusionRecord> {
        let norm = f.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit(norm));
        }
        let q = self.adjoint.quadratic_form(f)?;
        let s = EllipseModel::focal_radius(q);
        let (f1, f2, projection_residual) = self.decompose(f)?;
        let one = Complex64::new(1.0, 0.0);
        let lhs = 0.25 * (one - q).norm_sqr() - 0.25 * (one + q).norm_sqr();
        let rhs = f2.norm().powi(2) - f1.norm().powi(2);
        Ok(ExclusionRecord {
            q,
            s,
            id21_residual: (lhs - rhs).abs(),
            projection_residual,
            at_bound: (self.model.semi_major - s).abs() <= BOUNDARY_FLAG,
        })
    }

    /// Unit vector with complex Gaussian coefficients on the first `m`
    /// vectors of each eigenspace.
    pub fn gaussian_sample(&self, rng: &mut ChaCha8Rng, m: usize) -> Result<TaylorSeries> {
        let m = m.min(self.plus.vectors().len());
        let mut f = TaylorSeries::zeros(self.truncation());
        for basis in [&self.plus, &self.minus] {
            for b in &basis.vectors()[..m] {
                let c = Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
                f.add_scaled(c, b)?;
            }
        }
        f.normalized()
    }

    /// `(f_1, f_2)` from the geometric family with weights `rho^{j/2}`,
    /// phases aligned so every cross term has the same argument.
    pub fn geometric_pair(&self, rho: f64, m: usize) -> Result<(TaylorSeries, TaylorSeries)> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidArgument(format!("geometric ratio {rho} outside [0, 1)")));
        }
        let m = m.min(self.plus.vectors().len());
        let step = Complex64::from_polar(1.0, -2.0 * self.symbol.fixed_point().arg());
        let mut f1 = TaylorSeries::zeros(self.truncation());
        let mut f2 = TaylorSeries::zeros(self.truncation());
        let mut phase = Complex64::new(1.0, 0.0);
        for j in 0..m {
            let w = rho.powf(j as f64 / 2.0);
            f1.add_scaled(phase * w, &self.plus.vectors()[j])?;
            f2.add_scaled(phase * w, &self.minus.vectors()[j])?;
            phase *= step;
        }
        Ok((f1.normalized()?, f2.normalized()?))
    }

    /// Unit `(f_1, f_2)` maximizing `|<f_1, f_2>|` over the first `m` vectors
    /// of each eigenspace: the top singular pair of the cross-Gram block.
    pub fn extremal_pair(&self, m: usize) -> Result<(TaylorSeries, TaylorSeries, f64)> {
        let m = m.min(self.plus.vectors().len());
        let (p, q) = (&self.plus.vectors()[..m], &self.minus.vectors()[..m]);
        let cross = DMatrix::from_fn(m, m, |j, k| p[j].inner(&q[k]).expect("same truncation"));
        let svd = cross.svd(true, true);
        let idx = svd.singular_values.imax();
        let u = svd.u.as_ref().expect("requested").column(idx).into_owned();
        let v_t = svd.v_t.as_ref().expect("requested").row(idx).into_owned();
        let mut f1 = TaylorSeries::zeros(self.truncation());
        let mut f2 = TaylorSeries::zeros(self.truncation());
        for j in 0..m {
            f1.add_scaled(u[j].conj(), &p[j])?;
            // Row of V^* is conj(v); the maximizer uses conj(v).
            f2.add_scaled(v_t[j], &q[j])?;
        }
        Ok((f1, f2, svd.singular_values[idx]))
    }
}

pub(crate) fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Random unit vectors against `s(f) < A` and identity (21).
pub fn exclusion_suite(frame: &Order2Frame, trials: usize, seed: u64, id21_tol: f64) -> Result<CheckReport> {
    let batches = trials.div_ceil(BATCH);
    let records: Vec<ExclusionRecord> = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<Vec<ExclusionRecord>> {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(trials - b * BATCH);
            (0..count)
                .map(|_| frame.exclusion_statistic(&frame.gaussian_sample(&mut rng, GAUSSIAN_SPAN)?))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let bound = frame.model().semi_major;
    let worst_s = records.iter().map(|r| r.s).fold(f64::NEG_INFINITY, f64::max);
    let worst_id = records.iter().map(|r| r.id21_residual).fold(0.0, f64::max);
    let touching = records.iter().filter(|r| r.at_bound).count() as f64;
    Ok(CheckReport::new(
        "order2-exclusion",
        trials,
        seed,
        vec![
            CheckComponent::upper("focal-radius", worst_s, bound, true),
            CheckComponent::upper("identity-21", worst_id, id21_tol, false),
            CheckComponent::upper("samples-at-bound", touching, 0.0, false),
        ],
    ))
}

/// Eigenspace correlations `delta < 2|a|/(1+|a|^2)`: random pairs, the
/// geometric family and the extremal probe, which must come within
/// `approach_tol` of the bound.
pub fn correlation_suite(frame: &Order2Frame, trials: usize, seed: u64, approach_tol: f64) -> Result<CheckReport> {
    let sym = frame.symbol();
    let bound = frame.model().correlation_bound();
    let batches = trials.div_ceil(BATCH);
    let random_worst = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<f64> {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(trials - b * BATCH);
            let mut worst = 0.0f64;
            for _ in 0..count {
                let f = frame.gaussian_sample(&mut rng, GAUSSIAN_SPAN)?;
                let (f1, f2, _) = frame.decompose(&f)?;
                worst = worst.max(pair_correlation(sym, &f1, &f2)?.0);
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut geometric_worst = 0.0f64;
    for rho in [0.5, 0.9, 0.99] {
        let (f1, f2) = frame.geometric_pair(rho, frame.plus().vectors().len())?;
        geometric_worst = geometric_worst.max(pair_correlation(sym, &f1, &f2)?.0);
    }
    let (f1, f2, _) = frame.extremal_pair(EXTREMAL_SPAN)?;
    let extremal = pair_correlation(sym, &f1, &f2)?.0;
    let worst = random_worst.max(geometric_worst).max(extremal);
    Ok(CheckReport::new(
        "order2-correlation",
        trials + 4,
        seed,
        vec![
            CheckComponent::upper("delta", worst, bound, true),
            CheckComponent::upper("extremal-gap", bound - extremal, approach_tol, false),
        ],
    ))
}
