//! Command-line front end.
//!
//! Every command is a pure function of its flags: output is assembled in a
//! fixed order and numbers are printed with 17 significant digits, so two
//! runs with the same flags produce identical bytes.
//!
//! Exit codes: 0 pass, 1 verification or numerical failure, 2 invalid input.

use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Number, Value};

use crate::abreu::extremality_residual;
use crate::bridge::{bridge_cross_check, geometric_samples, BridgePreset};
use crate::calabi::{
    build_extremal_metric, closed_form_coefficients, closed_form_coefficients_as_printed,
    endpoint_limits, extremal_f_second, h_second, plane_blowup_coefficients, plane_blowup_h_second,
    solve_coefficients, ExtremalCoefficients, ENDPOINT_OFFSET, HALVING_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::polytope::SAMPLER_PRNG;
use crate::radial::{radial_scalar_curvature, validity_check, DEGENERACY_THRESHOLD};

/// Version of every JSON document's layout.
pub const SCHEMA_VERSION: u64 = 1;

pub const DEFAULT_TOLERANCE_HARD: f64 = 1e-9;
pub const DEFAULT_TOLERANCE_SOFT: f64 = 1e-5;

/// Grid size of the validity check in `verify`.
pub const VALIDITY_GRID: usize = 1000;

/// Default endpoint margin of `profile`, as a fraction of `b − a`.
pub const PROFILE_MARGIN_FRACTION: f64 = 1e-4;

/// Default sampling margin of `verify`, as a fraction of `b − a`.
pub const VERIFY_MARGIN_FRACTION: f64 = 1e-2;

/// Relative agreement required between the solved coefficients and the
/// plane blow-up formulas in `example`.
pub const EXAMPLE_COEFFICIENT_TOLERANCE: f64 = 1e-12;

/// Relative agreement required between `h''` and the plane blow-up form.
pub const EXAMPLE_H_TOLERANCE: f64 = 1e-10;

/// Grid size of the `h''` comparison in `example`.
pub const EXAMPLE_GRID: usize = 50;

/// Range of `s` sampled by `bridge-check`.
pub const BRIDGE_S_RANGE: (f64, f64) = (1e-2, 1e2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve for the extremal coefficients (A, B, C, D).
    Derive,
    /// Tabulate F'', h'' and S on a grid in (a, b).
    Profile,
    /// Cross-check the extremal metric with every available formula.
    Verify,
    /// Compare Calabi's formula with the radial formula on a preset potential.
    BridgeCheck,
    /// Reproduce the closed-form plane blow-up (n = 2, b = 1).
    Example,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "toric-extremal",
    version,
    about = "Extremal Kähler metrics on the blow-up of CPⁿ"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Complex dimension.
    #[arg(long, global = true, default_value_t = 2)]
    pub n: usize,

    /// Lower end of the moment interval, 0 < a < b.
    #[arg(
        long,
        global = true,
        default_value_t = 0.5,
        allow_negative_numbers = true
    )]
    pub a: f64,

    /// Upper end of the moment interval.
    #[arg(
        long,
        global = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub b: f64,

    /// Interior points sampled by `verify`.
    #[arg(long, global = true, default_value_t = 100)]
    pub points: usize,

    /// Grid size for `profile` and `bridge-check`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Seed of the interior sampler.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,

    /// Outer finite-difference step of the general curvature formula.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub step: Option<f64>,

    /// Distance kept from the boundary: endpoint margin for `profile`,
    /// facet margin for `verify`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub margin: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE_HARD)]
    pub tolerance_hard: f64,

    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE_SOFT)]
    pub tolerance_soft: f64,

    /// Kähler potential for `bridge-check`: flat, fubini-study or extremal.
    #[arg(long, global = true, default_value = "fubini-study")]
    pub preset: BridgePreset,
}

/// Everything a run writes, and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub exit: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            exit: 0,
        }
    }

    fn error(error: &Error) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {error}\n"),
            exit: exit_code(error),
        }
    }
}

/// 2 for errors in the input, 1 for everything else.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::InvalidParameters(_)
        | Error::DimensionMismatch { .. }
        | Error::EmptyRegion { .. }
        | Error::DimensionTooLarge(_)
        | Error::OutOfRange { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    exit: 2,
                }
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn run(config: &RunConfig) -> Outcome {
    let result = config.validate().and_then(|()| match config.command {
        Command::Derive => run_derive(config),
        Command::Profile => run_profile(config),
        Command::Verify => run_verify(config),
        Command::BridgeCheck => run_bridge_check(config),
        Command::Example => run_example(config),
    });
    result.unwrap_or_else(|e| Outcome::error(&e))
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameters(msg));
        let uses_interval = !matches!(self.command, Command::BridgeCheck | Command::Example);
        if uses_interval
            && !(self.a.is_finite() && self.b.is_finite() && 0.0 < self.a && self.a < self.b)
        {
            return invalid(format!("need 0 < a < b, got a={}, b={}", self.a, self.b));
        }
        if self.n < 1 {
            return invalid("n must be at least 1".into());
        }
        if !(self.tolerance_hard > 0.0 && self.tolerance_soft > 0.0) {
            return invalid("tolerances must be positive".into());
        }
        if let Some(step) = self.step {
            if !(step > 0.0 && step.is_finite()) {
                return invalid(format!("step must be positive, got {step}"));
            }
        }
        if let Some(margin) = self.margin {
            if !(margin > 0.0 && margin.is_finite()) {
                return invalid(format!("margin must be positive, got {margin}"));
            }
        }
        let allowed: &[Format] = match self.command {
            Command::Derive | Command::Profile => &[Format::Json, Format::Csv],
            _ => &[Format::Json],
        };
        if let Some(format) = self.format {
            if !allowed.contains(&format) {
                return invalid(
                    format!("--format {format:?} is not available for this command").to_lowercase(),
                );
            }
        }
        Ok(())
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// 17 significant digits; non-finite values become `null`.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            format_number(x)
                .parse::<Number>()
                .expect("finite float formats as a JSON number"),
        )
    } else {
        Value::Null
    }
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_json(mut document: Map<String, Value>, command: Command) -> String {
    let mut head = Map::new();
    head.insert("schema".into(), json!(SCHEMA_VERSION));
    head.insert("command".into(), json!(command_name(command)));
    head.append(&mut document);
    let mut text =
        serde_json::to_string_pretty(&Value::Object(head)).expect("JSON values serialize");
    text.push('\n');
    text
}

fn command_name(command: Command) -> &'static str {
    match command {
        Command::Derive => "derive",
        Command::Profile => "profile",
        Command::Verify => "verify",
        Command::BridgeCheck => "bridge-check",
        Command::Example => "example",
    }
}

fn coefficient_fields(e: &ExtremalCoefficients) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("A".into(), number(e.slope));
    m.insert("B".into(), number(e.intercept));
    m.insert("C".into(), number(e.linear));
    m.insert("D".into(), number(e.constant));
    m
}

/// Largest `|x − y| / max(1, |y|)` over paired entries.
fn max_relative_delta(xs: &[f64], ys: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max)
}

pub fn run_derive(config: &RunConfig) -> Result<Outcome> {
    let e = solve_coefficients(config.n, config.a, config.b)?;
    let text = match config.format_or(Format::Json) {
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("n".into(), json!(e.n));
            doc.insert("a".into(), number(e.a));
            doc.insert("b".into(), number(e.b));
            doc.insert("p".into(), number(e.p));
            doc.append(&mut coefficient_fields(&e));
            doc.insert("S".into(), json!("A*t+B"));
            render_json(doc, Command::Derive)
        }
        Format::Csv => {
            let values = [e.a, e.b, e.p, e.slope, e.intercept, e.linear, e.constant];
            let row: Vec<String> = values.iter().map(|&v| format_number(v)).collect();
            format!("n,a,b,p,A,B,C,D\n{},{}\n", e.n, row.join(","))
        }
    };
    Ok(Outcome::ok(text))
}

/// One row of `profile`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub f_second: f64,
    pub h_second: f64,
    pub s: f64,
}

/// Uniform grid on `[a + m, b − m]` with `m = margin` or `(b − a)·1e-4`.
pub fn profile_rows(config: &RunConfig) -> Result<Vec<ProfileRow>> {
    let (a, b) = (config.a, config.b);
    let samples = config.samples.unwrap_or(50);
    if samples == 0 {
        return Err(Error::InvalidParameters(
            "samples must be at least 1".into(),
        ));
    }
    let margin = config.margin.unwrap_or((b - a) * PROFILE_MARGIN_FRACTION);
    if !(2.0 * margin < b - a) {
        return Err(Error::InvalidParameters(format!(
            "margin {margin} leaves no interior in ({a}, {b})"
        )));
    }
    let metric = build_extremal_metric(config.n, a, b)?;
    let e = metric.coefficients;
    let (lo, hi) = (a + margin, b - margin);
    (0..samples)
        .map(|k| {
            let t = if samples == 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (samples - 1) as f64
            };
            Ok(ProfileRow {
                t,
                f_second: extremal_f_second(&e, t)?,
                h_second: h_second(&e, t)?,
                s: radial_scalar_curvature(&metric.profile, t)?,
            })
        })
        .collect()
}

pub fn run_profile(config: &RunConfig) -> Result<Outcome> {
    let rows = profile_rows(config)?;
    let text = match config.format_or(Format::Csv) {
        Format::Csv => {
            let mut out = String::from("t,F_second,h_second,S\n");
            for r in &rows {
                let cells = [r.t, r.f_second, r.h_second, r.s].map(format_number);
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("n".into(), json!(config.n));
            doc.insert("a".into(), number(config.a));
            doc.insert("b".into(), number(config.b));
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "t": number(r.t),
                        "F_second": number(r.f_second),
                        "h_second": number(r.h_second),
                        "S": number(r.s),
                    })
                })
                .collect();
            doc.insert("rows".into(), Value::Array(rows));
            render_json(doc, Command::Profile)
        }
    };
    Ok(Outcome::ok(text))
}

/// Which tolerance a check is held to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToleranceClass {
    Hard,
    Soft,
    /// A fixed tolerance not affected by the command line.
    Fixed,
}

/// One line of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub class: ToleranceClass,
    /// Whether a failure fails the run; otherwise it is a warning.
    pub required: bool,
    /// Nonnegative residual, or `None` when it could not be computed.
    pub value: Option<f64>,
    pub tolerance: f64,
    /// `true` when the residual must exceed the tolerance instead.
    pub lower_bound: bool,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.value {
            Some(v) if self.lower_bound => v > self.tolerance,
            Some(v) => v <= self.tolerance,
            None => false,
        }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "tolerance_class": match self.class {
                ToleranceClass::Hard => "hard",
                ToleranceClass::Soft => "soft",
                ToleranceClass::Fixed => "fixed",
            },
            "required": self.required,
            "value": self.value.map_or(Value::Null, number),
            "tolerance": number(self.tolerance),
            "passed": self.passed(),
        })
    }
}

/// Outcome of `verify`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub coefficients: ExtremalCoefficients,
    pub boundary_residuals: [f64; 4],
    pub closed_form_delta: Option<f64>,
    pub printed_closed_form_delta: Option<f64>,
    pub radial_max_discrepancy: f64,
    pub abreu_max_discrepancy: f64,
    pub abreu_radial_max_discrepancy: f64,
    pub extremality_residual: f64,
    pub fit_delta: f64,
    pub validity_min_margin: f64,
    pub endpoint_values: [f64; 2],
    pub endpoint_change: f64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.required || c.passed())
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| c.required && !c.passed())
            .map(|c| c.name)
            .collect()
    }

    pub fn warnings(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.required && !c.passed())
            .map(|c| match c.value {
                Some(v) => format!(
                    "{}: discrepancy {:.3e} exceeds {:.3e}",
                    c.name, v, c.tolerance
                ),
                None => format!("{}: not available", c.name),
            })
            .collect()
    }
}

/// Runs the full battery of cross-checks for `(n, a, b)`.
pub fn verification_report(config: &RunConfig) -> Result<VerificationReport> {
    let (n, a, b) = (config.n, config.a, config.b);
    if config.points < n + 2 {
        return Err(Error::InvalidParameters(format!(
            "need at least {} points, got {}",
            n + 2,
            config.points
        )));
    }
    let metric = build_extremal_metric(n, a, b)?;
    let e = metric.coefficients;
    let (hard, soft) = (config.tolerance_hard, config.tolerance_soft);
    let mut checks = Vec::new();

    let boundary_residuals = e.boundary_residuals();
    checks.push(Check {
        name: "boundary_identities",
        class: ToleranceClass::Hard,
        required: true,
        value: Some(boundary_residuals.iter().copied().fold(0.0, f64::max)),
        tolerance: hard,
        lower_bound: false,
    });

    let delta_to = |other: Result<ExtremalCoefficients>| {
        other
            .ok()
            .map(|c| max_relative_delta(&c.as_array(), &e.as_array()))
            .filter(|d| d.is_finite())
    };
    let closed_form_delta = delta_to(closed_form_coefficients(n, a, b));
    let printed_closed_form_delta = delta_to(closed_form_coefficients_as_printed(n, a, b));
    let anchored = n == 2 && b == 1.0;
    checks.push(Check {
        name: "closed_form",
        class: ToleranceClass::Hard,
        required: anchored,
        value: closed_form_delta,
        tolerance: hard,
        lower_bound: false,
    });
    checks.push(Check {
        name: "closed_form_as_printed",
        class: ToleranceClass::Hard,
        required: false,
        value: printed_closed_form_delta,
        tolerance: hard,
        lower_bound: false,
    });

    let margin = config.margin.unwrap_or((b - a) * VERIFY_MARGIN_FRACTION);
    let points = metric
        .polytope
        .sample_interior(config.points, margin, config.seed)?;
    let fit = extremality_residual(&metric.symplectic_potential(), &points, config.step)?;
    let (mut radial_max, mut abreu_max, mut cross_max, mut s_scale) =
        (0.0f64, 0.0f64, 0.0f64, 1.0f64);
    for sample in &fit.samples {
        let t: f64 = sample.x.iter().sum();
        let expected = e.scalar_curvature(t);
        let radial = radial_scalar_curvature(&metric.profile, t)?;
        let scale = expected.abs().max(1.0);
        radial_max = radial_max.max((radial - expected).abs() / scale);
        abreu_max = abreu_max.max((sample.s - expected).abs() / scale);
        cross_max = cross_max.max((sample.s - radial).abs() / radial.abs().max(1.0));
        s_scale = s_scale.max(expected.abs());
    }
    let extremality = fit.max_residual / s_scale;
    let coefficient_scale = e.slope.abs().max(e.intercept.abs()).max(1.0);
    let fit_delta = fit
        .slope
        .iter()
        .map(|m| (m - e.slope).abs())
        .chain(std::iter::once((fit.intercept - e.intercept).abs()))
        .fold(0.0, f64::max)
        / coefficient_scale;
    for (name, class, value) in [
        ("radial_vs_affine", ToleranceClass::Hard, radial_max),
        ("abreu_vs_affine", ToleranceClass::Soft, abreu_max),
        ("abreu_vs_radial", ToleranceClass::Soft, cross_max),
        ("extremality_residual", ToleranceClass::Soft, extremality),
        ("affine_fit", ToleranceClass::Soft, fit_delta),
    ] {
        let tolerance = if class == ToleranceClass::Hard {
            hard
        } else {
            soft
        };
        checks.push(Check {
            name,
            class,
            required: true,
            value: Some(value),
            tolerance,
            lower_bound: false,
        });
    }

    let validity = validity_check(&metric.profile, VALIDITY_GRID);
    checks.push(Check {
        name: "validity",
        class: ToleranceClass::Fixed,
        required: true,
        value: Some(validity.min_margin),
        tolerance: DEGENERACY_THRESHOLD,
        lower_bound: true,
    });

    let (lower, upper) = endpoint_limits(&e, ENDPOINT_OFFSET)?;
    let endpoint_change = lower.relative_change().max(upper.relative_change());
    let endpoints_finite = [lower.value, lower.halved, upper.value, upper.halved]
        .iter()
        .all(|v| v.is_finite());
    checks.push(Check {
        name: "endpoint_limits",
        class: ToleranceClass::Fixed,
        required: true,
        value: endpoints_finite.then_some(endpoint_change),
        tolerance: HALVING_TOLERANCE,
        lower_bound: false,
    });

    Ok(VerificationReport {
        coefficients: e,
        boundary_residuals,
        closed_form_delta,
        printed_closed_form_delta,
        radial_max_discrepancy: radial_max,
        abreu_max_discrepancy: abreu_max,
        abreu_radial_max_discrepancy: cross_max,
        extremality_residual: extremality,
        fit_delta,
        validity_min_margin: validity.min_margin,
        endpoint_values: [lower.halved, upper.halved],
        endpoint_change,
        checks,
    })
}

pub fn run_verify(config: &RunConfig) -> Result<Outcome> {
    let report = verification_report(config)?;
    let e = &report.coefficients;
    let mut doc = Map::new();
    doc.insert(
        "inputs".into(),
        json!({
            "n": config.n,
            "a": number(config.a),
            "b": number(config.b),
            "points": config.points,
            "seed": config.seed,
            "sampler": SAMPLER_PRNG,
            "margin": number(config.margin.unwrap_or((config.b - config.a) * VERIFY_MARGIN_FRACTION)),
            "step": config.step.map_or(Value::Null, number),
            "tolerance_hard": number(config.tolerance_hard),
            "tolerance_soft": number(config.tolerance_soft),
        }),
    );
    doc.insert("coefficients".into(), Value::Object(coefficient_fields(e)));
    doc.insert(
        "boundary_residuals".into(),
        report
            .boundary_residuals
            .iter()
            .map(|&r| number(r))
            .collect(),
    );
    doc.insert(
        "closed_form".into(),
        json!({
            "max_relative_delta": report.closed_form_delta.map_or(Value::Null, number),
            "as_printed_max_relative_delta": report.printed_closed_form_delta.map_or(Value::Null, number),
        }),
    );
    doc.insert(
        "curvature".into(),
        json!({
            "radial_vs_affine": number(report.radial_max_discrepancy),
            "abreu_vs_affine": number(report.abreu_max_discrepancy),
            "abreu_vs_radial": number(report.abreu_radial_max_discrepancy),
            "extremality_residual": number(report.extremality_residual),
            "affine_fit_delta": number(report.fit_delta),
        }),
    );
    doc.insert(
        "validity_min_margin".into(),
        number(report.validity_min_margin),
    );
    doc.insert(
        "endpoint_limits".into(),
        json!({
            "offset": number(ENDPOINT_OFFSET),
            "h_second_at_a": number(report.endpoint_values[0]),
            "h_second_at_b": number(report.endpoint_values[1]),
            "halving_relative_change": number(report.endpoint_change),
        }),
    );
    doc.insert(
        "checks".into(),
        report.checks.iter().map(Check::to_json).collect(),
    );
    let warnings = report.warnings();
    doc.insert(
        "warnings".into(),
        warnings.iter().map(|w| json!(w)).collect(),
    );
    let passed = report.passed();
    doc.insert("passed".into(), json!(passed));

    let mut stderr: String = warnings.iter().map(|w| format!("warning: {w}\n")).collect();
    if !passed {
        stderr.push_str(&format!(
            "verify failed: {}\n",
            report.failures().join(", ")
        ));
    }
    Ok(Outcome {
        stdout: render_json(doc, Command::Verify),
        stderr,
        exit: if passed { 0 } else { 1 },
    })
}

pub fn run_bridge_check(config: &RunConfig) -> Result<Outcome> {
    let mut doc = Map::new();
    doc.insert("preset".into(), json!(config.preset.name()));
    doc.insert("n".into(), json!(config.n));
    let Some(potential) = config.preset.potential(config.n) else {
        doc.insert("supported".into(), json!(false));
        doc.insert("passed".into(), Value::Null);
        return Ok(Outcome {
            stdout: render_json(doc, Command::BridgeCheck),
            stderr: format!(
                "note: preset {} has no Kähler potential; nothing to compare\n",
                config.preset.name()
            ),
            exit: 0,
        });
    };
    let samples = config.samples.unwrap_or(10);
    if samples == 0 {
        return Err(Error::InvalidParameters(
            "samples must be at least 1".into(),
        ));
    }
    let report = bridge_cross_check(
        &potential?,
        &geometric_samples(BRIDGE_S_RANGE.0, BRIDGE_S_RANGE.1, samples),
    )?;
    let passed = report.max_rel_discrepancy <= config.tolerance_soft;
    doc.insert("supported".into(), json!(true));
    let rows: Vec<Value> = report
        .samples
        .iter()
        .map(|s| json!({"s": number(s.s), "t": number(s.t), "calabi": number(s.calabi), "radial": number(s.radial)}))
        .collect();
    doc.insert("samples".into(), Value::Array(rows));
    doc.insert(
        "max_abs_discrepancy".into(),
        number(report.max_abs_discrepancy),
    );
    doc.insert(
        "max_rel_discrepancy".into(),
        number(report.max_rel_discrepancy),
    );
    doc.insert("tolerance".into(), number(config.tolerance_soft));
    doc.insert("passed".into(), json!(passed));
    let stderr = if passed {
        String::new()
    } else {
        "bridge-check failed: formulas disagree\n".to_string()
    };
    Ok(Outcome {
        stdout: render_json(doc, Command::BridgeCheck),
        stderr,
        exit: if passed { 0 } else { 1 },
    })
}

/// Outcome of `example`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleReport {
    pub solved: ExtremalCoefficients,
    pub formula: ExtremalCoefficients,
    pub coefficient_delta: f64,
    pub midpoint: f64,
    pub h_second_midpoint: f64,
    pub h_second_delta: f64,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.coefficient_delta <= EXAMPLE_COEFFICIENT_TOLERANCE
            && self.h_second_delta <= EXAMPLE_H_TOLERANCE
    }
}

/// The plane blow-up `n = 2, b = 1` against its closed forms.
pub fn example_report(a: f64) -> Result<ExampleReport> {
    let solved = solve_coefficients(2, a, 1.0)?;
    let formula = plane_blowup_coefficients(a)?;
    let coefficient_delta = solved
        .as_array()
        .iter()
        .zip(formula.as_array())
        .map(|(s, f)| (s - f).abs() / f.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let mut h_second_delta = 0.0f64;
    for k in 0..EXAMPLE_GRID {
        let t = a + (1.0 - a) * (k + 1) as f64 / (EXAMPLE_GRID + 1) as f64;
        let expected = plane_blowup_h_second(a, t);
        h_second_delta =
            h_second_delta.max((h_second(&solved, t)? - expected).abs() / expected.abs());
    }
    let midpoint = 0.5 * (a + 1.0);
    Ok(ExampleReport {
        solved,
        formula,
        coefficient_delta,
        midpoint,
        h_second_midpoint: h_second(&solved, midpoint)?,
        h_second_delta,
    })
}

pub fn run_example(config: &RunConfig) -> Result<Outcome> {
    let report = example_report(config.a)?;
    let mut doc = Map::new();
    doc.insert("n".into(), json!(2));
    doc.insert("a".into(), number(config.a));
    doc.insert("b".into(), number(1.0));
    doc.insert(
        "solved".into(),
        Value::Object(coefficient_fields(&report.solved)),
    );
    doc.insert(
        "formula".into(),
        Value::Object(coefficient_fields(&report.formula)),
    );
    doc.insert(
        "coefficients".into(),
        json!({
            "max_relative_delta": number(report.coefficient_delta),
            "tolerance": number(EXAMPLE_COEFFICIENT_TOLERANCE),
        }),
    );
    doc.insert(
        "h_second".into(),
        json!({
            "t": number(report.midpoint),
            "value": number(report.h_second_midpoint),
            "grid": EXAMPLE_GRID,
            "max_relative_delta": number(report.h_second_delta),
            "tolerance": number(EXAMPLE_H_TOLERANCE),
        }),
    );
    let passed = report.passed();
    doc.insert("passed".into(), json!(passed));
    let stderr = if passed {
        String::new()
    } else {
        "example failed: closed forms disagree\n".to_string()
    };
    Ok(Outcome {
        stdout: render_json(doc, Command::Example),
        stderr,
        exit: if passed { 0 } else { 1 },
    })
}
