//! The tangential cubic, the sextic boundary curve and its singularities.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for focal lines on the cubic and cusp gradients.
pub const FOCAL_TOL: f64 = 1e-12;
pub const CUSP_TOL: f64 = 1e-8;
const FLEX_STARTS: usize = 96;
const FLEX_SEED: u64 = 0x5eed;

fn check_l(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.75 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("L = {l} must exceed 3/4")))
    }
}

/// `u^3 - 3uv^2 - 4L u^2 w - 4L v^2 w + 4w^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualCubic {
    #[serde(rename = "L")]
    pub l: f64,
}

impl DualCubic {
    pub fn new(l: f64) -> Result<Self> {
        check_l(l)?;
        Ok(Self { l })
    }

    pub fn eval(&self, u: Complex64, v: Complex64, w: Complex64) -> Complex64 {
        let l4 = 4.0 * self.l;
        u * u * u - 3.0 * u * v * v - l4 * u * u * w - l4 * v * v * w + 4.0 * w * w * w
    }

    /// Value divided by the largest coefficient magnitude `max(4, 4L)`.
    pub fn normalized(&self, u: Complex64, v: Complex64, w: Complex64) -> Complex64 {
        self.eval(u, v, w) / (4.0 * self.l).max(4.0)
    }

    pub fn gradient(&self, x: &Vector3<Complex64>) -> Vector3<Complex64> {
        let (u, v, w) = (x[0], x[1], x[2]);
        let l = self.l;
        Vector3::new(
            3.0 * u * u - 3.0 * v * v - 8.0 * l * u * w,
            -6.0 * u * v - 8.0 * l * v * w,
            -4.0 * l * (u * u + v * v) + 12.0 * w * w,
        )
    }

    pub fn hessian(&self, x: &Vector3<Complex64>) -> Matrix3<Complex64> {
        let (u, v, w) = (x[0], x[1], x[2]);
        let l8 = 8.0 * self.l;
        let uu = 6.0 * u - l8 * w;
        let uv = -6.0 * v;
        let uw = -l8 * u;
        let vv = -6.0 * u - l8 * w;
        let vw = -l8 * v;
        let ww = 24.0 * w;
        Matrix3::new(uu, uv, uw, uv, vv, vw, uw, vw, ww)
    }

    /// Constant Hessian derivatives along `u`, `v`, `w`.
    fn hessian_partials(&self) -> [Matrix3<Complex64>; 3] {
        let l8 = -8.0 * self.l;
        let m = |a: [f64; 9]| Matrix3::from_row_slice(&a.map(|x| Complex64::new(x, 0.0)));
        [
            m([6.0, 0.0, l8, 0.0, -6.0, 0.0, l8, 0.0, 0.0]),
            m([0.0, -6.0, 0.0, -6.0, 0.0, l8, 0.0, l8, 0.0]),
            m([l8, 0.0, 0.0, 0.0, l8, 0.0, 0.0, 0.0, 24.0]),
        ]
    }

    /// `256 L^3 - 108`; the cubic is singular exactly when this vanishes.
    pub fn smoothness_factor(&self) -> f64 {
        256.0 * self.l.powi(3) - 108.0
    }
}

/// The seven coefficients of the boundary sextic in the basis
/// `r^nu c^tau` with `r = x^2 + y^2`, `c = x^3 - 3xy^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SexticCoefficients {
    /// `r^3`
    #[serde(rename = "P")]
    pub p: f64,
    /// `c^2`
    #[serde(rename = "Q")]
    pub q: f64,
    /// `r c`
    pub c_mixed: f64,
    /// `r^2`
    pub c_quartic: f64,
    /// `c`
    pub c_cubic: f64,
    /// `r`
    pub c_quadratic: f64,
    pub c_const: f64,
}

impl SexticCoefficients {
    pub fn as_array(&self) -> [f64; 7] {
        [self.p, self.q, self.c_mixed, self.c_quartic, self.c_cubic, self.c_quadratic, self.c_const]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SexticCurve {
    #[serde(rename = "L")]
    pub l: f64,
    pub coefficients: SexticCoefficients,
}

impl SexticCurve {
    pub fn new(l: f64) -> Result<Self> {
        check_l(l)?;
        let q = 27.0 / (64.0 * l.powi(3));
        Ok(Self {
            l,
            coefficients: SexticCoefficients {
                p: 1.0 - q,
                q,
                c_mixed: -9.0 / (4.0 * l),
                c_quartic: 27.0 / (16.0 * l * l) - l,
                c_cubic: 2.0 - q,
                c_quadratic: -9.0 / (8.0 * l),
                c_const: 27.0 / (256.0 * l.powi(3)),
            },
        })
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.as_array().iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    fn invariants(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
        (x * x + y * y, x * x * x - 3.0 * x * y * y)
    }

    fn partials(&self, r: Complex64, c: Complex64) -> (Complex64, Complex64) {
        let k = &self.coefficients;
        let dr = 3.0 * k.p * r * r + k.c_mixed * c + 2.0 * k.c_quartic * r + k.c_quadratic;
        let dc = 2.0 * k.q * c + k.c_mixed * r + k.c_cubic;
        (dr, dc)
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        let k = &self.coefficients;
        let (r, c) = Self::invariants(x, y);
        k.p * r * r * r
            + k.q * c * c
            + k.c_mixed * r * c
            + k.c_quartic * r * r
            + k.c_cubic * c
            + k.c_quadratic * r
            + k.c_const
    }

    pub fn gradient_complex(&self, x: Complex64, y: Complex64) -> [Complex64; 2] {
        let (r, c) = Self::invariants(x, y);
        let (dr, dc) = self.partials(r, c);
        [
            dr * 2.0 * x + dc * (3.0 * x * x - 3.0 * y * y),
            dr * 2.0 * y + dc * (-6.0 * x * y),
        ]
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_complex(Complex64::new(x, 0.0), Complex64::new(y, 0.0)).re
    }

    /// `Gamma / max |coefficient|`.
    pub fn normalized(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y) / self.max_coefficient()
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        self.gradient_complex(Complex64::new(x, 0.0), Complex64::new(y, 0.0)).map(|g| g.re)
    }

    /// Symmetric Hessian `[[xx, xy], [xy, yy]]`.
    pub fn hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let k = &self.coefficients;
        let (r, c) = (x * x + y * y, x * x * x - 3.0 * x * y * y);
        let (dr, dc) = self.partials(Complex64::new(r, 0.0), Complex64::new(c, 0.0));
        let (dr, dc) = (dr.re, dc.re);
        let drr = 6.0 * k.p * r + 2.0 * k.c_quartic;
        let drc = k.c_mixed;
        let dcc = 2.0 * k.q;
        let (rx, ry) = (2.0 * x, 2.0 * y);
        let (cx, cy) = (3.0 * x * x - 3.0 * y * y, -6.0 * x * y);
        let xx = drr * rx * rx + 2.0 * drc * rx * cx + dcc * cx * cx + dr * 2.0 + dc * 6.0 * x;
        let xy = drr * rx * ry + drc * (rx * cy + ry * cx) + dcc * cx * cy - dc * 6.0 * y;
        let yy = drr * ry * ry + 2.0 * drc * ry * cy + dcc * cy * cy + dr * 2.0 - dc * 6.0 * x;
        [[xx, xy], [xy, yy]]
    }

    /// Ascending coefficients of `Gamma(x, 0)`.
    pub fn x_axis_polynomial(&self) -> [f64; 7] {
        let k = &self.coefficients;
        [k.c_const, 0.0, k.c_quadratic, k.c_cubic, k.c_quartic, k.c_mixed, k.p + k.q]
    }

    /// Ascending coefficients of `(x - 3/(4L))^3 (x^3 - L x - 1/4)`.
    pub fn factored_x_axis_polynomial(&self) -> [f64; 7] {
        let b = 3.0 / (4.0 * self.l);
        let cube = [-b * b * b, 3.0 * b * b, -3.0 * b, 1.0];
        let support = [-0.25, -self.l, 0.0, 1.0];
        let mut out = [0.0; 7];
        for (i, x) in cube.iter().enumerate() {
            for (j, y) in support.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// Largest coefficient-wise relative difference between the two forms of
    /// `Gamma(x, 0)`; coefficients that vanish in the factored form are
    /// measured against the largest coefficient.
    pub fn factorization_error(&self) -> f64 {
        let ours = self.x_axis_polynomial();
        let reference = self.factored_x_axis_polynomial();
        let scale = reference.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        ours.iter()
            .zip(&reference)
            .map(|(a, b)| {
                let denom = if b.abs() > 1e-14 * scale { b.abs() } else { scale };
                (a - b).abs() / denom
            })
            .fold(0.0, f64::max)
    }

    /// Distinct real roots of `Gamma(x, 0)` with multiplicities, from the
    /// companion-matrix eigenvalues grouped into clusters.
    pub fn x_axis_roots(&self) -> Vec<(f64, usize)> {
        let poly = self.x_axis_polynomial();
        let lead = poly[6];
        let n = 6;
        let mut companion = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            companion[(i, n - 1)] = -poly[i] / lead;
        }
        let scale = poly.iter().fold(0.0f64, |m, c| m.max(c.abs())) / lead.abs();
        let radius = 10.0 * (f64::EPSILON * scale).cbrt();
        let mut clusters: Vec<Vec<Complex64>> = Vec::new();
        for z in companion.complex_eigenvalues().iter() {
            match clusters
                .iter_mut()
                .find(|c| (mean(c) - z).norm() <= radius * (1.0 + z.norm()))
            {
                Some(c) => c.push(*z),
                None => clusters.push(vec![*z]),
            }
        }
        let mut roots: Vec<(f64, usize)> = clusters
            .iter()
            .map(|c| (mean(c), c.len()))
            .filter(|(z, _)| z.im.abs() <= 1e-8 * (1.0 + z.re.abs()))
            .map(|(z, m)| (z.re, m))
            .collect();
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        roots
    }

    /// The three predicted real cusps: `(3/(4L), 0)` and its rotations.
    pub fn real_cusps(&self) -> [(f64, f64); 3] {
        let b = 3.0 / (4.0 * self.l);
        std::array::from_fn(|k| {
            let t = TAU * k as f64 / 3.0;
            (b * t.cos(), b * t.sin())
        })
    }

    /// Envelope point of the support line at `alpha = pi/2`:
    /// `(-3/(8L), sqrt L)`.
    pub fn quarter_turn_point(&self) -> (f64, f64) {
        (-3.0 / (8.0 * self.l), self.l.sqrt())
    }
}

fn mean(c: &[Complex64]) -> Complex64 {
    c.iter().sum::<Complex64>() / c.len() as f64
}

/// Gradient check at one predicted cusp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspCheck {
    pub x: f64,
    pub y: f64,
    /// `|Gamma| / max |coefficient|`.
    pub value: f64,
    /// `|grad Gamma| / max |coefficient|`.
    pub gradient: f64,
    /// `|det Hess| / |Hess|^2`; zero for a cusp's rank-one quadratic part.
    pub hessian_degeneracy: f64,
    pub pass: bool,
}

/// An inflection point of the tangential cubic and the boundary-curve cusp
/// dual to its tangent line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flex {
    /// Homogeneous `(u, v, w)` scaled so the largest entry is 1.
    pub point: [Complex64; 3],
    pub real: bool,
    /// Affine cusp `(x, y)`, absent when it lies on the line at infinity.
    pub cusp: Option<[Complex64; 2]>,
    /// `|Gamma|` and `|grad Gamma|` at the cusp, relative to the largest
    /// coefficient.
    pub cusp_value: Option<f64>,
    pub cusp_gradient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    #[serde(rename = "L")]
    pub l: f64,
    pub degree: u32,
    /// Class of the curve, the degree of the tangential cubic.
    pub class: u32,
    /// `256 L^3 - 108`, nonzero when the cubic has no singular point.
    pub cubic_smoothness_factor: f64,
    pub real_cusps: Vec<CuspCheck>,
    pub flexes: Vec<Flex>,
    pub kappa_detected: usize,
    pub kappa_real: usize,
    /// `(d(d-1) - class - 3 kappa) / 2`.
    pub tau_implied: f64,
    /// `d(d-1) - 2 tau - 3 kappa`.
    pub class_from_plucker: f64,
    pub pass: bool,
}

/// Scale so the first entry that is not negligible equals 1.
fn normalize_projective(x: &Vector3<Complex64>) -> Vector3<Complex64> {
    let top = x.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let k = (0..3).find(|&i| x[i].norm() > 1e-8 * top).unwrap_or(0);
    x / x[k]
}

fn same_projective_point(p: &Vector3<Complex64>, q: &Vector3<Complex64>) -> bool {
    cross(p, q).norm() <= 1e-7 * p.norm() * q.norm()
}

/// `tr(adj(A) B)`, the derivative of `det` along `B`.
fn det_derivative(a: &Matrix3<Complex64>, b: &Matrix3<Complex64>) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            let cof = a[(r0, c0)] * a[(r1, c1)] - a[(r0, c1)] * a[(r1, c0)];
            total += cof * b[(j, i)];
        }
    }
    total
}

fn hadamard_scale(m: &Matrix3<Complex64>) -> f64 {
    (0..3).map(|i| m.row(i).norm()).product::<f64>().max(f64::MIN_POSITIVE)
}

/// Inflection points of the tangential cubic: common zeros of the cubic and
/// its Hessian determinant, found by Newton's method in `C^3` from seeded
/// starts with a random normalizing hyperplane.
pub fn flexes(cubic: &DualCubic) -> Vec<Vector3<Complex64>> {
    let partials = cubic.hessian_partials();
    let mut rng = ChaCha8Rng::seed_from_u64(FLEX_SEED);
    let mut gauss = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let mut found: Vec<Vector3<Complex64>> = Vec::new();
    for _ in 0..FLEX_STARTS {
        let plane = Vector3::new(gauss(), gauss(), gauss());
        let mut x = Vector3::new(gauss(), gauss(), gauss());
        x /= plane.dot(&x);
        let mut converged = false;
        for _ in 0..80 {
            let h = cubic.hessian(&x);
            let g = cubic.gradient(&x);
            let rhs = Vector3::new(cubic.eval(x[0], x[1], x[2]), h.determinant(), plane.dot(&x) - 1.0);
            let jac = Matrix3::from_rows(&[
                g.transpose(),
                Vector3::from_fn(|k, _| det_derivative(&h, &partials[k])).transpose(),
                plane.transpose(),
            ]);
            let Some(step) = jac.lu().solve(&rhs) else { break };
            x -= step;
            if !x.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                break;
            }
            if step.norm() <= 1e-14 * x.norm() {
                converged = true;
                break;
            }
        }
        if !converged {
            continue;
        }
        let unit = x.unscale(x.norm());
        let f = cubic.normalized(unit[0], unit[1], unit[2]).norm();
        let hm = cubic.hessian(&unit);
        if f > 1e-10 || hm.determinant().norm() / hadamard_scale(&hm) > 1e-10 {
            continue;
        }
        let p = normalize_projective(&x);
        if !found.iter().any(|q| same_projective_point(q, &p)) {
            found.push(p);
        }
    }
    found.sort_by(|a, b| {
        let key = |v: &Vector3<Complex64>| (v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im);
        key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal)
    });
    found
}

/// Cusp checks at the predicted real cusps plus the inflection-point census
/// of the tangential cubic, from which the cusp count and the implied node
/// count follow.
pub fn singularity_report(curve: &SexticCurve) -> Result<SingularityReport> {
    let cubic = DualCubic::new(curve.l)?;
    let scale = curve.max_coefficient();
    let real_cusps: Vec<CuspCheck> = curve
        .real_cusps()
        .iter()
        .map(|&(x, y)| {
            let [gx, gy] = curve.gradient(x, y);
            let gradient = gx.hypot(gy) / scale;
            let [[hxx, hxy], [_, hyy]] = curve.hessian(x, y);
            let norm2 = hxx * hxx + 2.0 * hxy * hxy + hyy * hyy;
            let det = hxx * hyy - hxy * hxy;
            CuspCheck {
                x,
                y,
                value: curve.normalized(x, y).abs(),
                gradient,
                hessian_degeneracy: if norm2 > 0.0 { det.abs() / norm2 } else { 0.0 },
                pass: gradient <= CUSP_TOL,
            }
        })
        .collect();
    let flex_points: Vec<Flex> = flexes(&cubic)
        .iter()
        .map(|p| {
            let real = p.iter().all(|c| c.im.abs() <= 1e-9);
            let t = cubic.gradient(p);
            let cusp = (t[2].norm() > 1e-9 * t.norm()).then(|| [t[0] / t[2], t[1] / t[2]]);
            let (cusp_value, cusp_gradient) = match cusp {
                Some([x, y]) => {
                    let g = curve.gradient_complex(x, y);
                    (
                        Some(curve.eval_complex(x, y).norm() / scale),
                        Some((g[0].norm_sqr() + g[1].norm_sqr()).sqrt() / scale),
                    )
                }
                None => (None, None),
            };
            Flex {
                point: [p[0], p[1], p[2]],
                real,
                cusp,
                cusp_value,
                cusp_gradient,
            }
        })
        .collect();
    let (degree, class) = (6u32, 3u32);
    let kappa = flex_points.len();
    let d = f64::from(degree);
    let tau_implied = (d * (d - 1.0) - f64::from(class) - 3.0 * kappa as f64) / 2.0;
    let pass = real_cusps.iter().all(|c| c.pass) && cubic.smoothness_factor() != 0.0;
    Ok(SingularityReport {
        l: curve.l,
        degree,
        class,
        cubic_smoothness_factor: cubic.smoothness_factor(),
        kappa_real: flex_points.iter().filter(|f| f.real).count(),
        kappa_detected: kappa,
        tau_implied,
        class_from_plucker: d * (d - 1.0) - 2.0 * tau_implied - 3.0 * kappa as f64,
        real_cusps,
        flexes: flex_points,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FociReport {
    #[serde(rename = "L")]
    pub l: f64,
    /// `|cubic(line)| / max |coefficient|` for unit-norm lines, ordered by
    /// focus then circular point `(1, i, 0)`, `(1, -i, 0)`.
    pub values: Vec<f64>,
    pub worst: f64,
    pub pass: bool,
}

fn cross(a: &Vector3<Complex64>, b: &Vector3<Complex64>) -> Vector3<Complex64> {
    Vector3::new(
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
}

/// Lines joining the circular points to the foci
/// `(cos 2k pi/3, sin 2k pi/3, 1)`, evaluated on the tangential cubic.
pub fn foci_check(l: f64) -> Result<FociReport> {
    let cubic = DualCubic::new(l)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let circular = [Vector3::new(one, Complex64::i(), zero), Vector3::new(one, -Complex64::i(), zero)];
    let mut values = Vec::with_capacity(6);
    for k in 0..3 {
        let t = TAU * k as f64 / 3.0;
        let focus = Vector3::new(Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0), one);
        for c in &circular {
            let line = cross(c, &focus);
            let line = line.unscale(line.norm());
            values.push(cubic.normalized(line[0], line[1], line[2]).norm());
        }
    }
    let worst = values.iter().copied().fold(0.0, f64::max);
    Ok(FociReport {
        l,
        values,
        worst,
        pass: worst <= FOCAL_TOL,
    })
}

/// Largest deviation of the cubic restricted to the line `3u + 4Lw = 0`,
/// parametrized as `(4L s, t, -3 s)`, from `s^3 (256 L^3 - 108)`. Zero means
/// the line meets the cubic only at `(0, 1, 0)`, with multiplicity three.
pub fn inflexional_tangent_defect(l: f64) -> Result<f64> {
    let cubic = DualCubic::new(l)?;
    let mut worst = 0.0f64;
    for s in [-1.0, -0.3, 0.5, 1.0] {
        for t in [-2.0, 0.0, 0.7, 3.0] {
            let c = |x: f64| Complex64::new(x, 0.0);
            let got = cubic.eval(c(4.0 * l * s), c(t), c(-3.0 * s));
            let want = s * s * s * cubic.smoothness_factor();
            let scale = (4.0 * l).max(4.0) * (4.0 * l * s.abs()).max(t.abs()).max(3.0 * s.abs()).powi(3);
            worst = worst.max((got.re - want).abs().max(got.im.abs()) / scale);
        }
    }
    Ok(worst)
}

/// CSV with header `alpha,x,y`.
pub fn write_envelope_csv<W: Write>(out: W, samples: &[(f64, f64, f64)]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::InvalidArgument(format!("CSV write failed: {e}"));
    w.write_record(["alpha", "x", "y"]).map_err(io)?;
    for (a, x, y) in samples {
        w.write_record([format!("{a:.16e}"), format!("{x:.16e}"), format!("{y:.16e}")])
            .map_err(io)?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("CSV write failed: {e}")))?;
    Ok(())
}
