//! Numeric support sweeps against the closed-form boundaries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk_maps::EllipticSymbol;
use crate::error::{Error, Result};
use crate::hardy_operator::OperatorMatrix;
use crate::numrange::{hausdorff, hull_from_support, support_function, symmetry_defect, BoundaryPolyline, EigenOptions, SupportSample};
use crate::order2::EllipseModel;
use crate::order3::{envelope_point, Order3Geometry};

/// Slack allowed when the numeric support exceeds the closed form.
pub const UPPER_BOUND_TOL: f64 = 1e-9;

/// The closed-form boundary for orders 2 and 3.
#[derive(Debug, Clone, Copy)]
pub enum ClosedForm {
    Ellipse(EllipseModel),
    Envelope(Order3Geometry),
}

impl ClosedForm {
    /// `None` for orders without a closed form.
    pub fn for_symbol(symbol: &EllipticSymbol) -> Result<Option<Self>> {
        let a = symbol.fixed_point();
        Ok(match symbol.order() {
            2 => Some(Self::Ellipse(EllipseModel::new(a)?)),
            3 => Some(Self::Envelope(Order3Geometry::new(a)?)),
            _ => None,
        })
    }

    pub fn support(&self, alpha: f64) -> Result<f64> {
        match self {
            Self::Ellipse(m) => Ok(m.support(alpha)),
            Self::Envelope(g) => g.lambda0(alpha),
        }
    }

    pub fn boundary_point(&self, alpha: f64) -> Result<Complex64> {
        match self {
            Self::Ellipse(m) => Ok(m.boundary_point(alpha)),
            Self::Envelope(g) => envelope_point(alpha, g.l).map(|(x, y)| Complex64::new(x, y)),
        }
    }

    /// Closed-form samples in the numeric sweep's layout.
    pub fn samples(&self, angles: &[f64]) -> Result<Vec<SupportSample>> {
        angles
            .iter()
            .map(|&alpha| {
                Ok(SupportSample {
                    alpha,
                    lambda: self.support(alpha)?,
                    point: self.boundary_point(alpha)?,
                })
            })
            .collect()
    }

    pub fn polyline(&self, angles: &[f64]) -> Result<BoundaryPolyline> {
        let points = angles.iter().map(|&a| self.boundary_point(a)).collect::<Result<Vec<_>>>()?;
        Ok(BoundaryPolyline::new(points, true))
    }
}

/// Support sweep of the `n x n` composition compression.
pub fn numeric_support(symbol: &EllipticSymbol, n: usize, angles: &[f64]) -> Result<Vec<SupportSample>> {
    let t = OperatorMatrix::composition(symbol, n)?;
    support_function(t.entries(), angles, &EigenOptions::default())
}

/// Summary of one numeric-versus-closed-form comparison. Closed-form fields
/// are absent for orders without one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub p: u32,
    pub n: usize,
    pub angles: usize,
    /// Between the hull of the numeric support lines and the closed form.
    pub hausdorff: Option<f64>,
    /// `max |closed(alpha) - numeric(alpha)|`.
    pub sup_support_gap: Option<f64>,
    /// `max (numeric(alpha) - closed(alpha))`; the compression never exceeds
    /// the operator, so this stays below [`UPPER_BOUND_TOL`].
    pub upper_bound_excess: Option<f64>,
    /// Support gaps at `n/4`, `n/2` and `n` strictly decrease.
    pub monotonicity_ok: Option<bool>,
    /// `(truncation, sup_support_gap)` behind `monotonicity_ok`.
    pub gaps: Vec<(usize, f64)>,
    pub symmetry_defect: f64,
}

fn gap_stats(numeric: &[SupportSample], closed: &[SupportSample]) -> (f64, f64) {
    let mut sup = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for (x, y) in numeric.iter().zip(closed) {
        sup = sup.max((y.lambda - x.lambda).abs());
        excess = excess.max(x.lambda - y.lambda);
    }
    (sup, excess)
}

/// Numeric sweep at truncation `n` against the closed form, plus the
/// rotation-symmetry defect of the numeric support function.
pub fn compare(symbol: &EllipticSymbol, n: usize, angles: &[f64]) -> Result<Comparison> {
    if n < 8 {
        return Err(Error::InvalidTruncation(format!("comparison needs n >= 8, got {n}")));
    }
    let numeric = numeric_support(symbol, n, angles)?;
    let defect = symmetry_defect(&numeric, symbol.order())?;
    let mut out = Comparison {
        p: symbol.order(),
        n,
        angles: angles.len(),
        hausdorff: None,
        sup_support_gap: None,
        upper_bound_excess: None,
        monotonicity_ok: None,
        gaps: Vec::new(),
        symmetry_defect: defect,
    };
    let Some(closed) = ClosedForm::for_symbol(symbol)? else {
        return Ok(out);
    };
    let closed_samples = closed.samples(angles)?;
    let (sup, excess) = gap_stats(&numeric, &closed_samples);
    let hull = hull_from_support(&numeric)?;
    out.hausdorff = Some(hausdorff(&hull, &closed.polyline(angles)?)?);
    let mut gaps = Vec::new();
    let mut worst_excess = excess;
    for m in [n / 4, n / 2] {
        let s = numeric_support(symbol, m, angles)?;
        let (g, e) = gap_stats(&s, &closed_samples);
        gaps.push((m, g));
        worst_excess = worst_excess.max(e);
    }
    gaps.push((n, sup));
    out.monotonicity_ok = Some(gaps.windows(2).all(|w| w[1].1 < w[0].1));
    out.sup_support_gap = Some(sup);
    out.upper_bound_excess = Some(worst_excess);
    out.gaps = gaps;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numrange::uniform_angles;

    #[test]
    fn order_two_comparison() {
        let sym = EllipticSymbol::new(Complex64::new(0.5, 0.0), 2, 1).unwrap();
        let c = compare(&sym, 128, &uniform_angles(96)).unwrap();
        assert!(c.sup_support_gap.unwrap() < 5e-2);
        assert!(c.upper_bound_excess.unwrap() <= UPPER_BOUND_TOL);
        assert_eq!(c.monotonicity_ok, Some(true));
        assert!(c.symmetry_defect <= 1e-4);
        assert_eq!(c.gaps.len(), 3);
    }

    #[test]
    fn guyker_restriction_is_symmetric_for_involutions() {
        let sym = EllipticSymbol::new(Complex64::new(0.5, 0.0), 2, 1).unwrap();
        let t = OperatorMatrix::guyker_adjoint(&sym, 48).unwrap();
        let s = support_function(t.entries(), &uniform_angles(60), &EigenOptions::default()).unwrap();
        assert!(symmetry_defect(&s, 2).unwrap() <= 1e-13);
    }

    #[test]
    fn order_four_has_no_closed_form() {
        let sym = EllipticSymbol::new(Complex64::new(0.5, 0.0), 4, 1).unwrap();
        let c = compare(&sym, 64, &uniform_angles(48)).unwrap();
        assert!(c.hausdorff.is_none() && c.monotonicity_ok.is_none());
        assert!(c.symmetry_defect <= 1e-2);
        assert!(compare(&sym, 4, &uniform_angles(48)).is_err());
    }
}
