use std::f64::consts::TAU;
use std::fs::File;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use nrc_core::comparison::{compare, numeric_support, ClosedForm};
use nrc_core::disk_maps::EllipticSymbol;
use nrc_core::hardy_operator::{default_truncation, OperatorMatrix};
use nrc_core::numrange::{uniform_angles, write_support_csv};
use nrc_core::order2::{correlation_suite, exclusion_suite, Order2Frame};
use nrc_core::order3::{
    curve_suite, envelope, foci_check, order3_suite, singularity_report, write_envelope_csv, Order3Geometry,
    SexticCurve,
};
use nrc_core::report::CheckReport;
use nrc_core::spectral_bounds::{identities_suite, observation_suite};

use crate::args::{Common, Emit, Format, Suite};
use crate::plot::{read_curve, render_svg};

/// Tolerance on identity (21) in the order-2 exclusion suite.
const ID21_TOL: f64 = 1e-7;
/// How close the order-2 extremal probe must come to the correlation bound.
const APPROACH_TOL: f64 = 1e-3;
/// Eigenspace vectors per residue in the order-2 frame.
const ORDER2_SPAN: usize = 32;

/// Rendered output plus whether the command's checks passed.
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub pass: bool,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Self { bytes, pass: true }
    }
}

/// A configuration the command cannot run with.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

impl Common {
    pub fn fixed_point(&self) -> Complex64 {
        Complex64::new(self.a[0], self.a[1])
    }

    fn symbol(&self) -> Result<EllipticSymbol> {
        Ok(EllipticSymbol::new(self.fixed_point(), self.order, self.k)?)
    }

    fn truncation(&self) -> Result<usize> {
        match self.n {
            Some(n) if n < 2 => usage(format!("--n must be at least 2, got {n}")),
            Some(n) => Ok(n),
            None => Ok(default_truncation(self.fixed_point().norm())),
        }
    }

    fn angle_grid(&self) -> Result<Vec<f64>> {
        if self.angles == 0 {
            return usage("--angles must be positive");
        }
        Ok(uniform_angles(self.angles))
    }

    fn trial_count(&self) -> Result<usize> {
        if self.trials == 0 {
            return usage("--trials must be at least 1");
        }
        Ok(self.trials)
    }

    fn format_or(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return usage(format!("format {f:?} is not available here; use one of {allowed:?}"));
        }
        Ok(f)
    }
}

/// Shortest decimal for display, with noise below 12 significant digits
/// rounded away.
fn short(x: f64) -> String {
    let r: f64 = format!("{x:.12e}").parse().unwrap_or(x);
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r}")
}

fn coefficient(z: Complex64) -> String {
    let (re, im) = (short(z.re), short(z.im));
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", "1") => "i".into(),
        ("0", "-1") => "-i".into(),
        ("0", _) => format!("{im}i"),
        _ => format!("({re}{}{}i)", if z.im < 0.0 { "-" } else { "+" }, short(z.im.abs())),
    }
}

/// `c0 + c1 z` with unit and zero coefficients folded away.
fn linear(c0: Complex64, c1: Complex64) -> String {
    let term = match coefficient(c1).as_str() {
        "0" => String::new(),
        "1" => "z".into(),
        "-1" => "-z".into(),
        s => format!("{s}z"),
    };
    let head = coefficient(c0);
    match (head.as_str(), term.as_str()) {
        (_, "") => head,
        ("0", _) => term,
        _ => match term.strip_prefix('-') {
            Some(t) => format!("{head} - {t}"),
            None => format!("{head} + {term}"),
        },
    }
}

/// `(b + a z) / (d + c z)` normalized so that `d = 1` when possible.
pub fn describe_map(m: [[Complex64; 2]; 2]) -> String {
    let [[a, b], [c, d]] = m;
    let s = if d.norm() > 1e-14 { d } else { c };
    let scale = m.iter().flatten().map(|z| (z / s).norm()).fold(0.0, f64::max);
    let clean = |z: Complex64| {
        let z = z / s;
        let part = |x: f64| if x.abs() <= 1e-12 * scale { 0.0 } else { x };
        Complex64::new(part(z.re), part(z.im))
    };
    format!("({})/({})", linear(clean(b), clean(a)), linear(clean(d), clean(c)))
}

pub fn symbol(common: &Common) -> Result<Outcome> {
    common.format_or(Format::Json, &[Format::Json])?;
    let sym = common.symbol()?;
    let m = sym.map().matrix();
    let s = if m[1][1].norm() > 1e-14 { m[1][1] } else { m[1][0] };
    let pair = |z: Complex64| [z.re, z.im];
    let report = json!({
        "a": pair(sym.fixed_point()),
        "p": sym.order(),
        "k": sym.multiplier_index(),
        "map": describe_map(m),
        "matrix": m.map(|row| row.map(|z| pair(z / s))),
        "multiplier": pair(sym.multiplier()),
        "adjoint_eigenvalue": pair(sym.adjoint_eigenvalue()),
        "order_residual": sym.order_residual()?,
        "fixed_point_residual": sym.fixed_point_residual(),
        "multiplier_residual": sym.multiplier_residual(),
    });
    Ok(Outcome::ok(to_json(&report)?))
}

pub fn matrix(common: &Common) -> Result<Outcome> {
    common.format_or(Format::Json, &[Format::Json])?;
    let t = OperatorMatrix::composition(&common.symbol()?, common.truncation()?)?;
    Ok(Outcome::ok(to_json(&t.to_export())?))
}

fn samples_out(common: &Common, samples: &[nrc_core::numrange::SupportSample]) -> Result<Vec<u8>> {
    match common.format_or(Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Json => to_json(&samples),
        _ => {
            let mut buf = Vec::new();
            write_support_csv(&mut buf, samples)?;
            Ok(buf)
        }
    }
}

pub fn range(common: &Common) -> Result<Outcome> {
    let samples = numeric_support(&common.symbol()?, common.truncation()?, &common.angle_grid()?)?;
    Ok(Outcome::ok(samples_out(common, &samples)?))
}

pub fn closedform(common: &Common, emit: Option<Emit>) -> Result<Outcome> {
    let sym = common.symbol()?;
    if emit == Some(Emit::Sextic) {
        if sym.order() != 3 {
            return usage("--emit sextic needs --order 3");
        }
        common.format_or(Format::Json, &[Format::Json])?;
        let geo = Order3Geometry::new(sym.fixed_point())?;
        return Ok(Outcome::ok(to_json(&SexticCurve::new(geo.l)?)?));
    }
    let Some(closed) = ClosedForm::for_symbol(&sym)? else {
        return usage(format!("no closed form for order {}; use `range`", sym.order()));
    };
    let samples = closed.samples(&common.angle_grid()?)?;
    Ok(Outcome::ok(samples_out(common, &samples)?))
}

pub fn compare_cmd(common: &Common) -> Result<Outcome> {
    common.format_or(Format::Json, &[Format::Json])?;
    let sym = common.symbol()?;
    if common.angles % sym.order() as usize != 0 {
        return usage(format!("--angles must be a multiple of the order {} for the symmetry check", sym.order()));
    }
    let n = common.truncation()?;
    if n < 8 {
        return usage(format!("compare needs --n of at least 8, got {n}"));
    }
    let c = compare(&sym, n, &common.angle_grid()?)?;
    Ok(Outcome::ok(to_json(&c)?))
}

pub fn curve(common: &Common, l: f64, emit: Option<Emit>) -> Result<Outcome> {
    if !(l > 0.75) || !l.is_finite() {
        return usage(format!("--L must exceed 3/4, got {l}"));
    }
    let sextic = SexticCurve::new(l)?;
    if emit == Some(Emit::Sextic) {
        common.format_or(Format::Json, &[Format::Json])?;
        return Ok(Outcome::ok(to_json(&sextic)?));
    }
    if common.format_or(Format::Json, &[Format::Json, Format::Csv])? == Format::Csv {
        let mut buf = Vec::new();
        write_envelope_csv(&mut buf, &envelope(&common.angle_grid()?, l)?)?;
        return Ok(Outcome::ok(buf));
    }
    let report = curve_suite(l)?;
    let (qx, qy) = sextic.quarter_turn_point();
    let (px, py) = (3.0 / (8.0 * l), 1.0 / l.sqrt());
    let body = json!({
        "curve": sextic,
        "x_axis_roots": sextic.x_axis_roots(),
        "singularities": singularity_report(&sextic)?,
        "foci": foci_check(l)?,
        "quarter_turn_point": { "x": qx, "y": qy, "value": sextic.normalized(qx, qy) },
        "printed_point": { "x": px, "y": py, "value": sextic.normalized(px, py) },
        "report": report,
    });
    Ok(Outcome {
        bytes: to_json(&body)?,
        pass: report.pass,
    })
}

fn order2_suite(common: &Common, trials: usize) -> Result<CheckReport> {
    let sym = EllipticSymbol::new(common.fixed_point(), 2, 1)?;
    let frame = Order2Frame::new(&sym, ORDER2_SPAN, common.n)?;
    let reports = [
        exclusion_suite(&frame, trials, common.seed, ID21_TOL)?,
        correlation_suite(&frame, trials, common.seed, APPROACH_TOL)?,
    ];
    Ok(CheckReport::merge("order2", common.seed, &reports))
}

fn run_suite(common: &Common, suite: Suite) -> Result<CheckReport> {
    let trials = common.trial_count()?;
    let a = common.fixed_point();
    let k = if common.order == 3 { common.k } else { 1 };
    Ok(match suite {
        Suite::Observations => observation_suite(a, trials, common.seed)?,
        Suite::Identities => identities_suite(a, k, trials, common.seed)?,
        Suite::Order2 => order2_suite(common, trials)?,
        Suite::Order3 => order3_suite(a, common.angle_grid()?.len(), trials, common.seed)?,
        Suite::All => {
            let reports = [Suite::Order2, Suite::Order3, Suite::Observations, Suite::Identities]
                .into_iter()
                .map(|s| run_suite(common, s))
                .collect::<Result<Vec<_>>>()?;
            CheckReport::merge("all", common.seed, &reports)
        }
    })
}

pub fn check(common: &Common, suite: Suite) -> Result<Outcome> {
    common.format_or(Format::Json, &[Format::Json])?;
    let report = run_suite(common, suite)?;
    Ok(Outcome {
        bytes: to_json(&report)?,
        pass: report.pass,
    })
}

pub fn plot(common: &Common, input: &std::path::Path, overlay: Option<&std::path::Path>) -> Result<Outcome> {
    common.format_or(Format::Svg, &[Format::Svg])?;
    let read = |p: &std::path::Path| -> Result<_> {
        let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
        read_curve(file)
            .with_context(|| format!("reading {}", p.display()))
            .map_err(|e| Usage(format!("{e:#}")).into())
    };
    let numeric = read(input)?;
    let closed = overlay.map(read).transpose()?;
    if common.order < 2 {
        bail!(Usage(format!("--order must be at least 2, got {}", common.order)));
    }
    let foci: Vec<(f64, f64)> = (0..common.order)
        .map(|j| {
            let t = TAU * f64::from(j) / f64::from(common.order);
            (t.cos(), t.sin())
        })
        .collect();
    Ok(Outcome::ok(render_svg(&numeric, closed.as_ref(), &foci).into_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_description() {
        let sym = EllipticSymbol::new(Complex64::new(0.5, 0.0), 2, 1).unwrap();
        assert_eq!(describe_map(sym.map().matrix()), "(0.8 - z)/(1 - 0.8z)");
        let c = |re, im| Complex64::new(re, im);
        let m = [[c(0.0, 1.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert_eq!(describe_map(m), "(iz)/(1)");
        let m = [[c(1.0, -2.0), c(0.5, 0.0)], [c(0.0, 0.0), c(2.0, 0.0)]];
        assert_eq!(describe_map(m), "(0.25 + (0.5-1i)z)/(1)");
    }

    #[test]
    fn short_rounds_noise() {
        assert_eq!(short(0.7999999999999999), "0.8");
        assert_eq!(short(-0.0), "0");
        assert_eq!(short(1e-20), "0.00000000000000000001");
    }
}
