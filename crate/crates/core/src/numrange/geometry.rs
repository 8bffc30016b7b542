use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SupportSample;
use crate::error::{Error, Result};

/// Minimum angular gap between consecutive support lines in hull
/// reconstruction.
pub const PARALLEL_GAP: f64 = 1e-6;

/// Ordered boundary points, counter-clockwise when produced from support data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPolyline {
    pub points: Vec<Complex64>,
    pub closed: bool,
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

impl BoundaryPolyline {
    pub fn new(points: Vec<Complex64>, closed: bool) -> Self {
        Self { points, closed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(start, end)` of every edge, including the closing edge.
    pub fn segments(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.points.len();
        let count = match (self.closed, n) {
            (_, 0) => 0,
            (_, 1) => 1,
            (true, _) => n,
            (false, _) => n - 1,
        };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d = d.max((p - q).norm());
            }
        }
        d
    }

    /// Smallest turn `cross(e_i, e_{i+1}) / diameter^2` over consecutive
    /// edges; negative values mean a clockwise (non-convex) turn.
    pub fn min_turn(&self) -> f64 {
        let n = self.points.len();
        if n < 3 {
            return 0.0;
        }
        let scale = self.diameter().powi(2).max(f64::MIN_POSITIVE);
        let last = if self.closed { n } else { n - 2 };
        (0..last)
            .map(|i| {
                let a = self.points[i];
                let b = self.points[(i + 1) % n];
                let c = self.points[(i + 2) % n];
                cross(b - a, c - b) / scale
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Counter-clockwise convexity with tolerance `tol` on [`Self::min_turn`].
    pub fn is_convex(&self, tol: f64) -> bool {
        self.min_turn() >= -tol
    }

    /// Distance from `p` to the nearest edge.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        self.segments()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Intersect consecutive support lines `Re(e^{-i alpha} z) = lambda`.
///
/// Samples must be sorted by angle and span the circle; the last line is
/// paired with the first.
pub fn hull_from_support(samples: &[SupportSample]) -> Result<BoundaryPolyline> {
    let n = samples.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 support samples, got {n}")));
    }
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        let (s1, s2) = (&samples[i], &samples[j]);
        let mut gap = s2.alpha - s1.alpha;
        if j == 0 {
            gap += std::f64::consts::TAU;
        }
        if gap < PARALLEL_GAP {
            return Err(Error::ParallelSupportLines { index: i, next: j, gap });
        }
        if gap >= std::f64::consts::PI {
            return Err(Error::InvalidArgument(format!(
                "support angles leave a gap of {gap} rad; the halfplanes do not bound a region"
            )));
        }
        let det = gap.sin();
        let (sa1, ca1) = s1.alpha.sin_cos();
        let (sa2, ca2) = s2.alpha.sin_cos();
        let x = (s1.lambda * sa2 - s2.lambda * sa1) / det;
        let y = (s2.lambda * ca1 - s1.lambda * ca2) / det;
        points.push(Complex64::new(x, y));
    }
    Ok(BoundaryPolyline::new(points, true))
}

fn directed(a: &BoundaryPolyline, b: &BoundaryPolyline) -> f64 {
    a.points.iter().map(|&p| b.distance_to(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance, measured from the vertices of each polyline
/// to the edges of the other.
pub fn hausdorff(a: &BoundaryPolyline, b: &BoundaryPolyline) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("Hausdorff distance of an empty polyline".into()));
    }
    Ok(directed(a, b).max(directed(b, a)))
}
