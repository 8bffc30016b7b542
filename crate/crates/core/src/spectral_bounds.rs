//! Correlations between the three eigenspaces of an order-3 adjoint, the
//! quadratic-form identities behind the support function, and the sampling
//! suites that exercise the correlation bounds.
//!
//! A vector in the span of the eigenspaces is stored by its coordinates in
//! the Guyker basis `e_m = k_a phi_a^m`. That basis is orthonormal, so inner
//! products of coordinate vectors are exact; truncated Taylor series are
//! used only to cross-check them.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::disk_maps::{inner_unchecked, EllipticSymbol, MoebiusMap, TaylorSeries};
use crate::error::{Error, Result};
use crate::hardy_operator::{adaptive_truncation, default_truncation, GuykerBasis, OperatorMatrix};
use crate::order2::batch_rng;
use crate::order3::Order3Geometry;
use crate::report::{CheckComponent, CheckReport};

/// Random samples use this many vectors from each eigenspace.
pub const RANDOM_SPAN: usize = 32;
/// The extremal family is cut where `rho^J` drops below this.
pub const FAMILY_TAIL: f64 = 1e-12;
/// Slack on non-strict bounds for values that attain them exactly.
pub const ASSERT_TOL: f64 = 1e-12;
pub const EXTREMAL_TOL: f64 = 1e-8;
pub const IDENTITY_TOL: f64 = 1e-7;
pub const LAMBDA_TOL: f64 = 1e-9;
/// Guyker tail allowed when choosing a truncation.
pub const TRUNCATION_TOL: f64 = 1e-10;
const BATCH: usize = 256;
const LAMBDA_ANGLES: usize = 6;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub sampler: String,
    pub seed: u64,
    pub index: usize,
}

impl Provenance {
    pub fn new(sampler: impl Into<String>, seed: u64, index: usize) -> Self {
        Self {
            sampler: sampler.into(),
            seed,
            index,
        }
    }
}

/// `delta_k e^{i theta_k}` are the normalized inner products
/// `<f_2, f_3>`, `<f_3, f_1>`, `<f_1, f_2>` in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub delta: [f64; 3],
    pub theta: [f64; 3],
    pub provenance: Provenance,
}

impl CorrelationTriple {
    fn from_products(c: [Complex64; 3], provenance: Provenance) -> Self {
        Self {
            delta: c.map(|z| z.norm()),
            theta: c.map(|z| z.arg()),
            provenance,
        }
    }

    pub fn products(&self) -> [Complex64; 3] {
        std::array::from_fn(|k| Complex64::from_polar(self.delta[k], self.theta[k]))
    }

    fn witness(&self) -> serde_json::Value {
        json!({
            "sampler": self.provenance.sampler,
            "seed": self.provenance.seed,
            "index": self.provenance.index,
            "delta": self.delta,
            "theta": self.theta,
        })
    }
}

const PAIRS: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

/// Normalized `<f_2, f_3>`, `<f_3, f_1>`, `<f_1, f_2>` for coefficient
/// slices in a common orthonormal basis; shorter slices are zero-padded.
fn normalized_products(f: [&[Complex64]; 3]) -> Result<[Complex64; 3]> {
    let norms = f.map(|x| inner_unchecked(x, x).re.sqrt());
    if norms.iter().any(|n| *n == 0.0 || !n.is_finite()) {
        return Err(Error::ZeroVector);
    }
    Ok(PAIRS.map(|(j, l)| inner_unchecked(f[j], f[l]) / (norms[j] * norms[l])))
}

/// Correlations of three eigenspace components given as Taylor series.
pub fn correlation_triple(f1: &TaylorSeries, f2: &TaylorSeries, f3: &TaylorSeries) -> Result<CorrelationTriple> {
    if f1.len() != f2.len() || f1.len() != f3.len() {
        return Err(Error::TruncationMismatch {
            left: f1.len(),
            right: f2.len().max(f3.len()),
        });
    }
    let c = normalized_products([f1.coeffs(), f2.coeffs(), f3.coeffs()])?;
    Ok(CorrelationTriple::from_products(c, Provenance::new("input", 0, 0)))
}

/// Guyker coordinates of `sum_j c_j b_j`, with `b_j` the order-3 eigenspace
/// basis of residue `r`: `e_0` for `r = j = 0`, otherwise
/// `(e_{3j+r} - a e_{3j+r-1}) / sqrt(1 + |a|^2)`.
pub fn eigenspace_coords(a: Complex64, r: usize, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if r > 2 {
        return Err(Error::InvalidArgument(format!("residue {r} must be below 3")));
    }
    let s = 1.0 / (1.0 + a.norm_sqr()).sqrt();
    let len = if coeffs.is_empty() { 0 } else { 3 * (coeffs.len() - 1) + r + 1 };
    let mut out = vec![ZERO; len];
    for (j, &c) in coeffs.iter().enumerate() {
        let m = 3 * j + r;
        if m == 0 {
            out[0] += c;
        } else {
            out[m] += c * s;
            out[m - 1] -= a * c * s;
        }
    }
    Ok(out)
}

/// `sum_m x_m e_m` at the basis truncation, with the bound
/// `sum_m |x_m| tail_m` on the coefficient mass lost.
pub fn coords_to_series(guyker: &GuykerBasis, x: &[Complex64]) -> Result<(TaylorSeries, f64)> {
    if x.len() > guyker.vectors().len() {
        return Err(Error::InvalidTruncation(format!(
            "{} Guyker coordinates, basis has {}",
            x.len(),
            guyker.vectors().len()
        )));
    }
    let mut f = TaylorSeries::zeros(guyker.truncation());
    let mut tail = 0.0;
    for ((c, e), t) in x.iter().zip(guyker.vectors()).zip(guyker.tails()) {
        if *c != ZERO {
            f.add_scaled(*c, e)?;
            tail += c.norm() * t;
        }
    }
    Ok((f, tail))
}

/// `(eta_1, eta_2, eta_3)` aligning the family's phases with `theta`.
fn family_phases(theta: [f64; 3], a: Complex64) -> [f64; 3] {
    let g = a.arg();
    [
        -g - theta[0],
        -2.0 * g - theta[0] - theta[1],
        -3.0 * g - theta[0] - theta[1] - theta[2],
    ]
}

/// Smallest `J` with `rho^J <= 1e-12`.
pub fn extremal_terms(rho: f64) -> Result<usize> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidArgument(format!("ratio {rho} must lie in (0, 1)")));
    }
    Ok((FAMILY_TAIL.ln() / rho.ln()).ceil().max(1.0) as usize)
}

/// Eigenspace coefficients `(alpha, beta, gamma)` of the extremal family:
/// `alpha_0 = 0`, `alpha_{j+1} = e^{i(eta_2 + j eta_3)} w_j`,
/// `beta_j = e^{i j eta_3} w_j`, `gamma_j = e^{i(eta_1 + j eta_3)} w_j`,
/// `w_j = sqrt((1 - rho) rho^j)` for `j < J`.
pub fn extremal_coefficients(theta: [f64; 3], rho: f64, a: Complex64, terms: usize) -> Result<[Vec<Complex64>; 3]> {
    let needed = extremal_terms(rho)?;
    if terms < needed {
        return Err(Error::InvalidArgument(format!(
            "{terms} terms leave rho^J above {FAMILY_TAIL:e}; need {needed}"
        )));
    }
    if a.norm() == 0.0 {
        return Err(Error::ZeroFixedPoint);
    }
    let [e1, e2, e3] = family_phases(theta, a);
    let w = |j: usize| ((1.0 - rho) * rho.powi(j as i32)).sqrt();
    let mut alpha = vec![ZERO; terms + 1];
    let mut beta = vec![ZERO; terms];
    let mut gamma = vec![ZERO; terms];
    for j in 0..terms {
        let jf = j as f64;
        alpha[j + 1] = Complex64::from_polar(w(j), e2 + jf * e3);
        beta[j] = Complex64::from_polar(w(j), jf * e3);
        gamma[j] = Complex64::from_polar(w(j), e1 + jf * e3);
    }
    Ok([alpha, beta, gamma])
}

/// Guyker coordinates of the three family members.
pub fn extremal_coords(theta: [f64; 3], rho: f64, a: Complex64, terms: usize) -> Result<[Vec<Complex64>; 3]> {
    let [alpha, beta, gamma] = extremal_coefficients(theta, rho, a, terms)?;
    Ok([
        eigenspace_coords(a, 0, &alpha)?,
        eigenspace_coords(a, 1, &beta)?,
        eigenspace_coords(a, 2, &gamma)?,
    ])
}

/// Limits of the family's normalized products as `J -> infinity`:
/// `-e^{i theta_1} Delta`, `-e^{i theta_2} Delta`, `-e^{i theta_3} Delta sqrt(rho)`.
pub fn extremal_closed_form(theta: [f64; 3], rho: f64, a: Complex64) -> [Complex64; 3] {
    let r = a.norm();
    let delta = r / (1.0 + r * r);
    [
        -Complex64::from_polar(delta, theta[0]),
        -Complex64::from_polar(delta, theta[1]),
        -Complex64::from_polar(delta * rho.sqrt(), theta[2]),
    ]
}

/// Unit extremal vectors as truncated series with the measured coefficient
/// mass beyond the truncation.
#[derive(Debug, Clone)]
pub struct ExtremalTriple {
    pub f: [TaylorSeries; 3],
    pub tails: [f64; 3],
}

/// The extremal family as Taylor series of length `n`. The Guyker vectors
/// are generated one at a time at length `2n` and folded into the three
/// sums, so memory stays `O(n)`.
pub fn extremal_family(theta: [f64; 3], rho: f64, a: Complex64, terms: usize, n: usize) -> Result<ExtremalTriple> {
    if n < 2 {
        return Err(Error::InvalidTruncation(format!("truncation {n} below 2")));
    }
    let coords = extremal_coords(theta, rho, a, terms)?;
    let count = coords.iter().map(Vec::len).max().unwrap_or(0);
    let phi_a = MoebiusMap::involution(a)?;
    let mut e = TaylorSeries::kernel(a, 2 * n)?;
    let mut acc: [TaylorSeries; 3] = std::array::from_fn(|_| TaylorSeries::zeros(2 * n));
    for m in 0..count {
        for (f, x) in acc.iter_mut().zip(&coords) {
            if let Some(&c) = x.get(m) {
                f.add_scaled(c, &e)?;
            }
        }
        if m + 1 < count {
            e = e.mul_moebius(&phi_a)?;
        }
    }
    let mut tails = [0.0; 3];
    let mut out: [TaylorSeries; 3] = std::array::from_fn(|_| TaylorSeries::zeros(n));
    for k in 0..3 {
        tails[k] = acc[k].tail_norm(n);
        out[k] = acc[k].truncated(n)?.normalized()?;
    }
    Ok(ExtremalTriple { f: out, tails })
}

/// Something that evaluates `<C_phi^* f, f>`.
pub trait AdjointForm {
    fn adjoint_form(&self, f: &TaylorSeries) -> Result<Complex64>;
}

/// A matrix already holding the adjoint compression.
impl AdjointForm for OperatorMatrix {
    fn adjoint_form(&self, f: &TaylorSeries) -> Result<Complex64> {
        self.quadratic_form(f)
    }
}

/// `<C_phi^* f, f> = conj <f ∘ phi, f>` without forming a matrix.
impl AdjointForm for EllipticSymbol {
    fn adjoint_form(&self, f: &TaylorSeries) -> Result<Complex64> {
        Ok(f.compose_moebius(self.map())?.inner(f)?.conj())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `<C^* f, f>` minus its expansion in norms and correlations.
    pub residual_1: f64,
    /// `||f||^2` minus its Hermitian expansion.
    pub residual_2: f64,
    pub form: Complex64,
}

/// Checks
/// `<C^* f, f> = sum_k mu^{k-1} (||f_k||^2 + 2 Re(mu X_k))` and
/// `||f||^2 = sum ||f_k||^2 + 2 Re(X_1 + X_2 + X_3)`
/// where `X_k = delta_k e^{i theta_k}` times the two norms and
/// `mu = conj(phi'(a))`. For `mu = e^{2 pi i/3}` the first reads
/// `2 Re(mu X) = -2 |X| cos(theta - pi/3)`.
pub fn quadratic_form_identity<T: AdjointForm + ?Sized>(
    symbol: &EllipticSymbol,
    f1: &TaylorSeries,
    f2: &TaylorSeries,
    f3: &TaylorSeries,
    adjoint: &T,
) -> Result<IdentityResiduals> {
    if symbol.order() != 3 {
        return Err(Error::WrongOrder {
            expected: 3,
            actual: symbol.order(),
        });
    }
    let parts = [f1, f2, f3];
    let mut f = f1.clone();
    f.add_scaled(Complex64::new(1.0, 0.0), f2)?;
    f.add_scaled(Complex64::new(1.0, 0.0), f3)?;
    let norm_sq = f.norm().powi(2);
    if norm_sq == 0.0 {
        return Err(Error::ZeroVector);
    }
    let norms = parts.map(|p| p.norm());
    let mut x = [ZERO; 3];
    for (k, &(j, l)) in PAIRS.iter().enumerate() {
        let scale = norms[j] * norms[l];
        if scale > 0.0 {
            let c = parts[j].inner(parts[l])? / scale;
            x[k] = Complex64::from_polar(c.norm(), c.arg()) * scale;
        }
    }
    let mu = symbol.adjoint_eigenvalue();
    let mut rhs1 = ZERO;
    let mut weight = Complex64::new(1.0, 0.0);
    for k in 0..3 {
        rhs1 += weight * (norms[k].powi(2) + 2.0 * (mu * x[k]).re);
        weight *= mu;
    }
    let rhs2 = norms.iter().map(|n| n * n).sum::<f64>() + 2.0 * x.iter().map(|z| z.re).sum::<f64>();
    let form = adjoint.adjoint_form(&f)?;
    Ok(IdentityResiduals {
        residual_1: (form - rhs1).norm(),
        residual_2: (norm_sq - rhs2).abs(),
        form,
    })
}

/// Guyker basis and geometry shared by the order-3 samplers.
#[derive(Debug, Clone)]
pub struct Order3Frame {
    symbol: EllipticSymbol,
    geometry: Order3Geometry,
    guyker: GuykerBasis,
}

impl Order3Frame {
    /// `n = None` picks the smallest power-of-two multiple of the default
    /// truncation whose Guyker tail is below [`TRUNCATION_TOL`].
    pub fn new(a: Complex64, k: u32, n: Option<usize>) -> Result<Self> {
        let geometry = Order3Geometry::new(a)?;
        let symbol = EllipticSymbol::new(a, 3, k)?;
        let count = 3 * RANDOM_SPAN;
        let n = match n {
            Some(n) => n,
            None => adaptive_truncation(a, count, default_truncation(a.norm()), TRUNCATION_TOL)?,
        };
        let guyker = GuykerBasis::new(a, count, n)?;
        Ok(Self {
            symbol,
            geometry,
            guyker,
        })
    }

    pub fn symbol(&self) -> &EllipticSymbol {
        &self.symbol
    }

    pub fn geometry(&self) -> &Order3Geometry {
        &self.geometry
    }

    pub fn guyker(&self) -> &GuykerBasis {
        &self.guyker
    }

    pub fn truncation(&self) -> usize {
        self.guyker.truncation()
    }

    /// Guyker coordinates of three components with complex Gaussian
    /// coefficients on the first [`RANDOM_SPAN`] vectors of each
    /// eigenspace; odd samples carry a random geometric envelope.
    pub fn random_coords(&self, rng: &mut ChaCha8Rng, index: usize) -> Result<[Vec<Complex64>; 3]> {
        let decay = if index % 2 == 1 { rng.random_range(0.05..1.0f64) } else { 1.0 };
        let a = self.symbol.fixed_point();
        let mut out: [Vec<Complex64>; 3] = Default::default();
        for (r, slot) in out.iter_mut().enumerate() {
            let coeffs: Vec<Complex64> = (0..RANDOM_SPAN)
                .map(|j| {
                    let w = decay.powf(j as f64 / 2.0);
                    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) * w
                })
                .collect();
            *slot = eigenspace_coords(a, r, &coeffs)?;
        }
        Ok(out)
    }

    /// Series for Guyker coordinates plus the truncation bound.
    pub fn series(&self, x: &[Complex64]) -> Result<(TaylorSeries, f64)> {
        coords_to_series(&self.guyker, x)
    }
}

/// Correlations from Guyker coordinates and from truncated series.
#[derive(Debug, Clone)]
struct Sample {
    triple: CorrelationTriple,
    direct_gap: f64,
    tail: f64,
    lambda_gap: f64,
}

fn lambda_gap(geo: &Order3Geometry, delta: [f64; 3], offset: f64) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..LAMBDA_ANGLES {
        let alpha = TAU * (i as f64 + offset) / LAMBDA_ANGLES as f64;
        worst = worst.max(geo.lambda_prime(alpha, delta)? - geo.lambda0(alpha)?);
    }
    Ok(worst)
}

fn direct_check(frame: &Order3Frame, coords: &[Vec<Complex64>; 3], fast: [Complex64; 3]) -> Result<(f64, f64)> {
    let mut series = Vec::with_capacity(3);
    let mut tail = 0.0f64;
    for x in coords {
        let (f, t) = frame.series(x)?;
        tail = tail.max(t / inner_unchecked(x, x).re.sqrt());
        series.push(f);
    }
    let direct = correlation_triple(&series[0], &series[1], &series[2])?.products();
    let gap = direct.iter().zip(&fast).map(|(d, f)| (d - f).norm()).fold(0.0, f64::max);
    Ok((gap, tail))
}

fn random_sample(frame: &Order3Frame, rng: &mut ChaCha8Rng, seed: u64, index: usize) -> Result<Sample> {
    let coords = frame.random_coords(rng, index)?;
    let fast = normalized_products([&coords[0], &coords[1], &coords[2]])?;
    let (direct_gap, tail) = direct_check(frame, &coords, fast)?;
    let triple = CorrelationTriple::from_products(fast, Provenance::new("gaussian", seed, index));
    let lambda_gap = lambda_gap(frame.geometry(), triple.delta, rng.random_range(0.0..1.0))?;
    Ok(Sample {
        triple,
        direct_gap,
        tail,
        lambda_gap,
    })
}

/// Phase triples and ratios probed by the extremal sampler.
pub fn extremal_grid(seed: u64) -> Vec<([f64; 3], f64)> {
    let mut rng = batch_rng(seed, usize::MAX >> 1);
    let mut thetas = vec![[0.0; 3], [std::f64::consts::PI; 3]];
    for _ in 0..4 {
        thetas.push(std::array::from_fn(|_| rng.random_range(0.0..TAU)));
    }
    let mut grid = Vec::new();
    for theta in thetas {
        for rho in [0.5, 0.9, 0.99, 0.999] {
            grid.push((theta, rho));
        }
    }
    grid
}

/// Truncation for a streamed extremal family: doubles from `start` until
/// every component loses at most [`TRUNCATION_TOL`].
fn extremal_truncation(theta: [f64; 3], rho: f64, a: Complex64, terms: usize, start: usize) -> Result<(ExtremalTriple, usize)> {
    let mut n = start.max(2 * (3 * terms + 1));
    loop {
        let family = extremal_family(theta, rho, a, terms, n)?;
        if family.tails.iter().all(|t| *t <= TRUNCATION_TOL) {
            return Ok((family, n));
        }
        if n >= 1 << 16 {
            return Err(Error::InvalidTruncation(format!("extremal family needs more than {} terms", 1 << 16)));
        }
        n *= 2;
    }
}

fn extremal_sample(
    geo: &Order3Geometry,
    theta: [f64; 3],
    rho: f64,
    seed: u64,
    index: usize,
    direct: bool,
) -> Result<(Sample, f64)> {
    let a = geo.a;
    let terms = extremal_terms(rho)?;
    let coords = extremal_coords(theta, rho, a, terms)?;
    let fast = normalized_products([&coords[0], &coords[1], &coords[2]])?;
    let closed = extremal_closed_form(theta, rho, a);
    let closed_gap = fast.iter().zip(&closed).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let (direct_gap, tail) = if direct {
        let (family, _) = extremal_truncation(theta, rho, a, terms, default_truncation(a.norm()))?;
        let [f1, f2, f3] = &family.f;
        let d = correlation_triple(f1, f2, f3)?.products();
        let gap = d.iter().zip(&fast).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        (gap, family.tails.iter().copied().fold(0.0, f64::max))
    } else {
        (0.0, 0.0)
    };
    let triple = CorrelationTriple::from_products(fast, Provenance::new(format!("extremal(rho={rho})"), seed, index));
    let lambda_gap = lambda_gap(geo, triple.delta, 0.5)?;
    Ok((
        Sample {
            triple,
            direct_gap,
            tail,
            lambda_gap,
        },
        closed_gap,
    ))
}

/// Running maximum with the sample that attained it.
#[derive(Clone)]
struct Worst {
    value: f64,
    witness: Option<CorrelationTriple>,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }

    fn push(&mut self, value: f64, t: &CorrelationTriple) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.witness = Some(t.clone());
        }
    }

    fn component(&self, name: &str, bound: f64, strict: bool) -> CheckComponent {
        let c = CheckComponent::upper(name, self.value, bound, strict);
        match &self.witness {
            Some(t) => c.with_witness(t.witness()),
            None => c,
        }
    }
}

/// Random and extremal correlation samples against the eigenspace bounds,
/// the closed forms of the extremal family, the series cross-check and
/// `Lambda'(alpha, delta) <= Lambda_0(alpha)`.
pub fn observation_suite(a: Complex64, trials: usize, seed: u64) -> Result<CheckReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let frame = Order3Frame::new(a, 1, None)?;
    let geo = *frame.geometry();
    let batches = trials.div_ceil(BATCH);
    let mut samples: Vec<Sample> = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<Vec<Sample>> {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(trials - b * BATCH);
            (0..count)
                .map(|i| random_sample(&frame, &mut rng, seed, b * BATCH + i))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let grid = extremal_grid(seed);
    let extremal: Vec<(Sample, f64)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &(theta, rho))| extremal_sample(&geo, theta, rho, seed, i, rho == 0.5))
        .collect::<Result<Vec<_>>>()?;
    let mut closed = Worst::new();
    for (s, gap) in &extremal {
        closed.push(*gap, &s.triple);
    }
    samples.extend(extremal.into_iter().map(|(s, _)| s));

    let r = a.norm();
    let big_delta = geo.delta;
    let mut w: [Worst; 8] = std::array::from_fn(|_| Worst::new());
    let mut tail = 0.0f64;
    for s in &samples {
        let d = s.triple.delta;
        let t = &s.triple;
        w[0].push(d[0], t);
        w[1].push(d[1], t);
        w[2].push(d[2], t);
        w[3].push(d[1] * d[1] + d[2] * d[2], t);
        w[4].push(d.iter().copied().fold(f64::INFINITY, f64::min), t);
        w[5].push(d[1] * d[1] + d[2] * d[2], t);
        w[6].push(s.direct_gap, t);
        w[7].push(s.lambda_gap, t);
        tail = tail.max(s.tail);
    }
    let components = vec![
        w[0].component("delta1<=Delta", big_delta + ASSERT_TOL, false),
        w[1].component("delta2<=Delta", big_delta + ASSERT_TOL, false),
        w[2].component("delta3<=|a|/sqrt(1+|a|^2)", r / (1.0 + r * r).sqrt() + ASSERT_TOL, false),
        w[3].component("delta2^2+delta3^2<2Delta^2", 2.0 * big_delta * big_delta, true),
        w[4].component("min(delta)<Delta-1e-6", big_delta - 1e-6, true),
        w[0].component("delta1<=1/2", 0.5 + ASSERT_TOL, false),
        w[5].component("delta2^2+delta3^2<1/2", 0.5, true),
        closed.component("extremal-closed-form", EXTREMAL_TOL, false),
        w[6].component("series-vs-gram", 1e-9 + 4.0 * tail, false),
        w[7].component("lambda'-lambda0", LAMBDA_TOL, false),
    ];
    Ok(CheckReport::new("observations", samples.len(), seed, components))
}

/// Identity residuals on random eigenspace samples and extremal families.
pub fn identities_suite(a: Complex64, k: u32, trials: usize, seed: u64) -> Result<CheckReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let frame = Order3Frame::new(a, k, None)?;
    let batches = trials.div_ceil(BATCH);
    let residuals: Vec<(IdentityResiduals, CorrelationTriple)> = (0..batches)
        .into_par_iter()
        .map(|b| -> Result<Vec<_>> {
            let mut rng = batch_rng(seed, b);
            let count = BATCH.min(trials - b * BATCH);
            (0..count)
                .map(|i| {
                    let index = b * BATCH + i;
                    let coords = frame.random_coords(&mut rng, index)?;
                    let [f1, f2, f3] = [0, 1, 2].map(|r| frame.series(&coords[r]).map(|x| x.0));
                    let (f1, f2, f3) = (f1?, f2?, f3?);
                    let scale = 1.0 / (f1.norm().powi(2) + f2.norm().powi(2) + f3.norm().powi(2)).sqrt();
                    let s = Complex64::new(scale, 0.0);
                    let (f1, f2, f3) = (f1.scaled(s), f2.scaled(s), f3.scaled(s));
                    let res = quadratic_form_identity(frame.symbol(), &f1, &f2, &f3, frame.symbol())?;
                    let mut t = correlation_triple(&f1, &f2, &f3)?;
                    t.provenance = Provenance::new("gaussian", seed, index);
                    Ok((res, t))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut family = Vec::new();
    for (i, theta) in [[0.0; 3], [1.0, -2.0, 0.5]].into_iter().enumerate() {
        let terms = extremal_terms(0.5)?;
        let (fam, _) = extremal_truncation(theta, 0.5, a, terms, default_truncation(a.norm()))?;
        let third = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
        let [f1, f2, f3] = fam.f.clone().map(|f| f.scaled(third));
        let res = quadratic_form_identity(frame.symbol(), &f1, &f2, &f3, frame.symbol())?;
        let mut t = correlation_triple(&f1, &f2, &f3)?;
        t.provenance = Provenance::new("extremal(rho=0.5)", seed, i);
        family.push((res, t));
    }
    let mut w: [Worst; 2] = std::array::from_fn(|_| Worst::new());
    for (res, t) in residuals.iter().chain(&family) {
        w[0].push(res.residual_1, t);
        w[1].push(res.residual_2, t);
    }
    let components = vec![
        w[0].component("adjoint-form", IDENTITY_TOL, false),
        w[1].component("norm-expansion", IDENTITY_TOL, false),
    ];
    Ok(CheckReport::new("identities", residuals.len() + family.len(), seed, components))
}
