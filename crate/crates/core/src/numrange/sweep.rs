use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigen::{matvec, top_eigenpair, EigenOptions};
use crate::error::{Error, Result};

/// One support line of the numerical range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportSample {
    pub alpha: f64,
    /// `Lambda(alpha) = max Re(e^{-i alpha} <T f, f>)` over unit `f`.
    pub lambda: f64,
    /// `<T v, v>` for the top eigenvector `v` of `H(alpha)`.
    pub point: Complex64,
}

impl SupportSample {
    /// `|Re(e^{-i alpha} point) - lambda|`.
    pub fn consistency(&self) -> f64 {
        ((Complex64::from_polar(1.0, -self.alpha) * self.point).re - self.lambda).abs()
    }
}

/// `H(alpha) = (e^{-i alpha} T + e^{i alpha} T^*) / 2`.
pub fn hermitian_part(t: &DMatrix<Complex64>, alpha: f64) -> DMatrix<Complex64> {
    let n = t.nrows();
    let w = Complex64::from_polar(0.5, -alpha);
    let mut h = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            h[(i, j)] = w * t[(i, j)] + (w * t[(j, i)]).conj();
        }
    }
    h
}

/// `n` equally spaced angles `2 pi i / n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

fn sample_at(t: &DMatrix<Complex64>, alpha: f64, opts: &EigenOptions) -> Result<SupportSample> {
    let h = hermitian_part(t, alpha);
    let pair = top_eigenpair(&h, opts).map_err(|e| Error::SweepFailed {
        alpha,
        message: e.to_string(),
    })?;
    let v = pair.vector.as_slice();
    let mut tv = vec![Complex64::new(0.0, 0.0); v.len()];
    matvec(t, v, &mut tv);
    let point: Complex64 = v.iter().zip(&tv).map(|(x, y)| x.conj() * y).sum();
    Ok(SupportSample {
        alpha,
        lambda: pair.value,
        point,
    })
}

/// Support function of `W(T)` at each angle, computed in parallel and
/// returned sorted by angle.
pub fn support_function(
    t: &DMatrix<Complex64>,
    angles: &[f64],
    opts: &EigenOptions,
) -> Result<Vec<SupportSample>> {
    if angles.is_empty() {
        return Err(Error::InvalidArgument("no angles given".into()));
    }
    if !t.is_square() || t.nrows() == 0 {
        return Err(Error::InvalidArgument("support function needs a non-empty square matrix".into()));
    }
    if let Some(&bad) = angles.iter().find(|a| !a.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite angle {bad}")));
    }
    let mut samples = angles
        .par_iter()
        .map(|&alpha| sample_at(t, alpha, opts))
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    Ok(samples)
}

/// `max |Lambda(alpha) - Lambda(alpha + 2 pi / p)|` over a grid closed under
/// the shift.
pub fn symmetry_defect(samples: &[SupportSample], p: u32) -> Result<f64> {
    if p == 0 || samples.is_empty() {
        return Err(Error::GridNotShiftClosed { p });
    }
    let shift = TAU / f64::from(p);
    let tol = 1e-9;
    let wrap = |a: f64| a.rem_euclid(TAU);
    let mut keyed: Vec<(f64, f64)> = samples.iter().map(|s| (wrap(s.alpha), s.lambda)).collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let find = |target: f64| -> Option<f64> {
        let idx = keyed.partition_point(|k| k.0 < target - tol);
        [idx, 0, keyed.len() - 1]
            .into_iter()
            .filter_map(|i| keyed.get(i))
            .find(|k| {
                let d = (k.0 - target).abs();
                d <= tol || (TAU - d).abs() <= tol
            })
            .map(|k| k.1)
    };
    let mut worst = 0.0f64;
    for &(alpha, lambda) in &keyed {
        let other = find(wrap(alpha + shift)).ok_or(Error::GridNotShiftClosed { p })?;
        worst = worst.max((lambda - other).abs());
    }
    Ok(worst)
}

/// CSV with header `alpha,lambda,x,y` and 17 significant digits per value.
pub fn write_support_csv<W: Write>(out: W, samples: &[SupportSample]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("CSV write failed: {e}"));
    w.write_record(["alpha", "lambda", "x", "y"]).map_err(io)?;
    for s in samples {
        w.write_record([
            format!("{:.16e}", s.alpha),
            format!("{:.16e}", s.lambda),
            format!("{:.16e}", s.point.re),
            format!("{:.16e}", s.point.im),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("CSV write failed: {e}")))?;
    Ok(())
}
