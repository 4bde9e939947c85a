//! Extremal metrics on the blow-up of CPⁿ at a point.
//!
//! An extremal radial metric has scalar curvature `S = A t + B`. Solving the
//! radial curvature equation for the profile gives
//!
//! ```text
//! F''(t) = p tⁿ⁻¹ / (p tⁿ − α(t)) − 1/t,   p = n(n+1)(n+2),
//! α(t)   = n A tⁿ⁺² + (n+2) B tⁿ⁺¹ + p (C t + D).
//! ```
//!
//! Requiring the potential to have the canonical `l ln l` behaviour on the
//! facets `t = a` and `t = b` forces
//!
//! ```text
//! α(a) = p aⁿ,   α'(a) = (n−1) p aⁿ⁻¹,
//! α(b) = p bⁿ,   α'(b) = (n+1) p bⁿ⁻¹,
//! ```
//!
//! four linear equations in `(A, B, C, D)`. The linear solve is the
//! authoritative route; the closed forms are kept as a cross-check.

use nalgebra::{Matrix4, Vector4};

use crate::abreu::SymplecticPotential;
use crate::error::{Error, Result};
use crate::linalg::solve_row_scaled;
use crate::polytope::{check_blowup_parameters, MomentPolytope};
use crate::radial::TPotential;

/// Relative size of `p tⁿ − α(t)` below which `F''` is treated as a pole.
pub const POLE_THRESHOLD: f64 = 1e-13;

/// Grid size used by [`build_extremal_metric`] to confirm positivity.
pub const POSITIVITY_GRID: usize = 1000;

/// Coefficients of an extremal profile; `S(t) = A t + B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalCoefficients {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// `b − a`.
    pub c: f64,
    /// `n(n+1)(n+2)`.
    pub p: f64,
    /// Slope of the scalar curvature, `A`.
    pub slope: f64,
    /// Intercept of the scalar curvature, `B`.
    pub intercept: f64,
    /// Linear coefficient of α divided by p, `C`.
    pub linear: f64,
    /// Constant coefficient of α divided by p, `D`.
    pub constant: f64,
}

/// Coefficients of `(A, B, C, D)` in α and α' at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointRows {
    pub value: [f64; 4],
    pub derivative: [f64; 4],
}

impl ExtremalCoefficients {
    pub fn from_parts(n: usize, a: f64, b: f64, abcd: [f64; 4]) -> Self {
        Self {
            n,
            a,
            b,
            c: b - a,
            p: cone_constant(n),
            slope: abcd[0],
            intercept: abcd[1],
            linear: abcd[2],
            constant: abcd[3],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.slope, self.intercept, self.linear, self.constant]
    }

    /// Expected scalar curvature `A t + B`.
    pub fn scalar_curvature(&self, t: f64) -> f64 {
        self.slope * t + self.intercept
    }

    /// `(α, α', α'')` at `t`.
    pub fn alpha_derivatives(&self, t: f64) -> [f64; 3] {
        let n = self.n as f64;
        let (a_, b_) = (self.slope, self.intercept);
        let tn = t.powi(self.n as i32);
        // α = t^{n+1}(n A t + (n+2) B) + p (C t + D)
        let alpha =
            tn * t * (n * a_ * t + (n + 2.0) * b_) + self.p * (self.linear * t + self.constant);
        let d1 = tn * ((n + 2.0) * ((n * a_) * t + (n + 1.0) * b_)) + self.p * self.linear;
        let d2 = if self.n == 0 {
            0.0
        } else {
            let tn1 = t.powi(self.n as i32 - 1);
            (n + 2.0) * (n + 1.0) * n * tn1 * (a_ * t + b_)
        };
        [alpha, d1, d2]
    }

    /// Residuals of the four boundary conditions, each relative to the
    /// larger of its target and the sum of the magnitudes of its terms.
    pub fn boundary_residuals(&self) -> [f64; 4] {
        let nf = self.n as f64;
        let abcd = self.as_array();
        let (ra, rb) = (endpoint_rows(self.n, self.a), endpoint_rows(self.n, self.b));
        let targets = [
            self.p * self.a.powi(self.n as i32),
            (nf - 1.0) * self.p * self.a.powi(self.n as i32 - 1),
            self.p * self.b.powi(self.n as i32),
            (nf + 1.0) * self.p * self.b.powi(self.n as i32 - 1),
        ];
        let rows = [ra.value, ra.derivative, rb.value, rb.derivative];
        let mut out = [0.0; 4];
        for (k, (row, target)) in rows.iter().zip(targets).enumerate() {
            let terms = row.iter().zip(abcd).map(|(r, x)| r * x);
            let (sum, size) = terms.fold((0.0, 0.0), |(s, m), v| (s + v, m + v.abs()));
            out[k] = (sum - target).abs() / target.abs().max(size);
        }
        out
    }

    /// `p tⁿ − α(t)`; positive on `(a, b)` exactly when the metric is valid.
    ///
    /// Evaluated as a Taylor polynomial about the nearer endpoint `e`, where
    /// the boundary conditions give the value `0` and slope `±p eⁿ⁻¹`
    /// exactly. Direct evaluation loses all digits to cancellation next to
    /// the endpoints, which is where `F''` has its poles.
    pub fn positivity(&self, t: f64) -> f64 {
        let n = self.n as i64;
        let (e, slope) = if (t - self.a).abs() <= (t - self.b).abs() {
            (self.a, self.p * self.a.powi(n as i32 - 1))
        } else {
            (self.b, -self.p * self.b.powi(n as i32 - 1))
        };
        let delta = t - e;
        let nf = self.n as f64;
        let mut total = slope * delta;
        let mut delta_k = delta;
        let mut factorial = 1.0;
        for k in 2..=(self.n + 2) {
            delta_k *= delta;
            factorial *= k as f64;
            let kk = k as i64;
            let derivative = self.p * falling(n, k) * power(e, n - kk)
                - nf * self.slope * falling(n + 2, k) * power(e, n + 2 - kk)
                - (nf + 2.0) * self.intercept * falling(n + 1, k) * power(e, n + 1 - kk);
            total += derivative * delta_k / factorial;
        }
        total
    }

    /// `p tⁿ − α(t)` evaluated directly from the coefficients.
    pub fn positivity_direct(&self, t: f64) -> f64 {
        self.p * t.powi(self.n as i32) - self.alpha_derivatives(t)[0]
    }
}

/// `m (m−1) ⋯ (m−k+1)`, zero once a factor vanishes.
fn falling(m: i64, k: usize) -> f64 {
    (0..k as i64).map(|j| (m - j) as f64).product()
}

/// `x^k`, with negative powers (multiplied by a zero falling factorial) as 0.
fn power(x: f64, k: i64) -> f64 {
    if k < 0 {
        0.0
    } else {
        x.powi(k as i32)
    }
}

/// `n(n+1)(n+2)`.
pub fn cone_constant(n: usize) -> f64 {
    let n = n as f64;
    n * (n + 1.0) * (n + 2.0)
}

/// Rows of the boundary system at endpoint `x`.
pub fn endpoint_rows(n: usize, x: f64) -> EndpointRows {
    let nf = n as f64;
    let p = cone_constant(n);
    let xn = x.powi(n as i32);
    EndpointRows {
        value: [nf * xn * x * x, (nf + 2.0) * xn * x, p * x, p],
        derivative: [
            nf * (nf + 2.0) * xn * x,
            (nf + 1.0) * (nf + 2.0) * xn,
            p,
            0.0,
        ],
    }
}

/// The 4×4 boundary system in `(A, B, C, D)` and its right-hand side
/// `(p aⁿ, (n−1) p aⁿ⁻¹, p bⁿ, (n+1) p bⁿ⁻¹)`.
pub fn boundary_system(n: usize, a: f64, b: f64) -> Result<(Matrix4<f64>, Vector4<f64>)> {
    check_blowup_parameters(n, a, b)?;
    let nf = n as f64;
    let p = cone_constant(n);
    let ra = endpoint_rows(n, a);
    let rb = endpoint_rows(n, b);
    let m = Matrix4::from_rows(&[
        ra.value.into(),
        ra.derivative.into(),
        rb.value.into(),
        rb.derivative.into(),
    ]);
    let pow = |x: f64, k: i32| x.powi(k);
    let rhs = Vector4::new(
        p * pow(a, n as i32),
        (nf - 1.0) * p * pow(a, n as i32 - 1),
        p * pow(b, n as i32),
        (nf + 1.0) * p * pow(b, n as i32 - 1),
    );
    Ok((m, rhs))
}

/// `(A, B, C, D)` by a row-scaled dense solve of [`boundary_system`].
pub fn solve_coefficients(n: usize, a: f64, b: f64) -> Result<ExtremalCoefficients> {
    let (m, rhs) = boundary_system(n, a, b)?;
    let solved = solve_row_scaled(&m, &rhs)?;
    let x = solved.solution;
    Ok(ExtremalCoefficients::from_parts(
        n,
        a,
        b,
        [x[0], x[1], x[2], x[3]],
    ))
}

/// Shared denominator of the closed forms.
fn closed_form_denominator(n: usize, a: f64, b: f64) -> f64 {
    let nf = n as f64;
    let ab = a * b;
    let ni = n as i32;
    ab.powi(ni) * (2.0 * nf * (nf + 2.0) * ab - (a * a + b * b) * (nf + 1.0).powi(2))
        + a.powi(2 * (ni + 1))
        + b.powi(2 * (ni + 1))
}

fn closed_form_with(n: usize, a: f64, b: f64, printed_d: bool) -> Result<ExtremalCoefficients> {
    check_blowup_parameters(n, a, b)?;
    let den = closed_form_denominator(n, a, b);
    let scale = a.max(b).powi(2 * (n as i32 + 1));
    if !(den.abs() > scale * 1e-15) {
        return Err(Error::ZeroDenominator);
    }
    let nf = n as f64;
    let ni = n as i32;
    let ab = a * b;
    let abn1 = ab.powi(ni - 1);

    let num_a = (nf + 1.0)
        * (nf + 2.0)
        * (abn1 * (nf * a * a * (nf + 1.0) + nf * b * b * (nf - 1.0) - 2.0 * ab * (nf * nf - 1.0))
            - 2.0 * a.powi(2 * ni));
    let num_b = nf
        * (nf + 1.0)
        * (abn1
            * (a * a * (nf * b * (nf + 2.0) - a * (nf + 1.0).powi(2))
                + b * b * (b * (1.0 - nf * nf) + a * (nf * nf - 4.0)))
            + 3.0 * a.powi(2 * ni + 1)
            + b.powi(2 * ni + 1));
    let num_c = abn1
        * ((nf + 1.0) * (a.powi(ni + 3) - a * b.powi(ni + 2) - 3.0 * b * a.powi(ni + 2))
            + ((nf - 1.0) * b.powi(ni + 3) + 2.0 * (nf + 2.0) * b * b * a.powi(ni + 1)));
    // The printed leading term is b^{n+1}(n − b(n−2)); the form consistent
    // with the boundary system carries a factor a on n.
    let lead = if printed_d { nf } else { nf * a };
    let num_d = ab.powi(ni)
        * (b.powi(ni + 1) * (lead - b * (nf - 2.0))
            - 2.0 * a.powi(ni) * b * b * (nf + 1.0)
            - nf * a.powi(ni + 1) * (a - 3.0 * b));

    Ok(ExtremalCoefficients::from_parts(
        n,
        a,
        b,
        [num_a / den, num_b / den, num_c / den, num_d / den],
    ))
}

/// Explicit formulas for `(A, B, C, D)`.
pub fn closed_form_coefficients(n: usize, a: f64, b: f64) -> Result<ExtremalCoefficients> {
    closed_form_with(n, a, b, false)
}

/// The explicit formulas with `D` exactly as usually printed, i.e. with the
/// sub-term `n − b(n−2)`. Only `D` differs from [`closed_form_coefficients`];
/// it does not satisfy the boundary system and is kept for reporting.
pub fn closed_form_coefficients_as_printed(
    n: usize,
    a: f64,
    b: f64,
) -> Result<ExtremalCoefficients> {
    closed_form_with(n, a, b, true)
}

/// Coefficients for `n = 2`, `b = 1` (the blow-up of CP² by `a`), from the
/// specialised formulas with denominator `a³ + 3a² − 3a − 1`.
pub fn plane_blowup_coefficients(a: f64) -> Result<ExtremalCoefficients> {
    check_blowup_parameters(2, a, 1.0)?;
    let den = a * a * a + 3.0 * a * a - 3.0 * a - 1.0;
    Ok(ExtremalCoefficients::from_parts(
        2,
        a,
        1.0,
        [
            -24.0 * a / den,
            6.0 * (3.0 * a * a - 1.0) / den,
            (3.0 * a * a - 1.0) * a / den,
            -2.0 * a * a * a / den,
        ],
    ))
}

/// `h''(t) = 2a(1 − a) / (2at² + t − a²t + 2at + 2a²) − 1/t`, the closed form
/// of [`h_second`] for `n = 2`, `b = 1`.
pub fn plane_blowup_h_second(a: f64, t: f64) -> f64 {
    2.0 * a * (1.0 - a) / (2.0 * a * t * t + t - a * a * t + 2.0 * a * t + 2.0 * a * a) - 1.0 / t
}

/// `(α(t), α'(t))`.
pub fn alpha_eval(coefficients: &ExtremalCoefficients, t: f64) -> (f64, f64) {
    let [v, d, _] = coefficients.alpha_derivatives(t);
    (v, d)
}

fn check_open_interval(e: &ExtremalCoefficients, t: f64) -> Result<()> {
    if !(t > e.a && t < e.b) {
        // Endpoints are reported as poles of F'' by the caller.
        if t == e.a || t == e.b {
            return Ok(());
        }
        return Err(Error::DomainViolation {
            t,
            t_min: e.a,
            t_max: e.b,
        });
    }
    Ok(())
}

fn pole_denominator(e: &ExtremalCoefficients, t: f64) -> Result<f64> {
    let ptn = e.p * t.powi(e.n as i32);
    let denominator = e.positivity(t);
    if !(denominator.abs() > POLE_THRESHOLD * ptn.abs()) {
        return Err(Error::Pole { t });
    }
    Ok(denominator)
}

/// Extremal profile `F''(t) = p tⁿ⁻¹/(p tⁿ − α) − 1/t`, evaluated as
/// `α / (t (p tⁿ − α))`.
pub fn extremal_f_second(e: &ExtremalCoefficients, t: f64) -> Result<f64> {
    check_open_interval(e, t)?;
    let denominator = pole_denominator(e, t)?;
    Ok(e.alpha_derivatives(t)[0] / (t * denominator))
}

/// `(F''', F'''')` of the extremal profile, by the quotient rule on
/// `α / q` with `q = t (p tⁿ − α)`.
pub fn extremal_f_higher(e: &ExtremalCoefficients, t: f64) -> Result<(f64, f64)> {
    check_open_interval(e, t)?;
    pole_denominator(e, t)?;
    let n = e.n as f64;
    let ni = e.n as i32;
    let [al, al1, al2] = e.alpha_derivatives(t);
    let q = t * e.positivity(t);
    let q1 = e.p * (n + 1.0) * t.powi(ni) - al - t * al1;
    let q2 = e.p * (n + 1.0) * n * t.powi(ni - 1) - 2.0 * al1 - t * al2;
    let num1 = al1 * q - al * q1;
    let third = num1 / (q * q);
    let fourth = (al2 * q - al * q2) / (q * q) - 2.0 * q1 * num1 / (q * q * q);
    Ok((third, fourth))
}

/// `h''(t) = F''(t) − (b − a)/((t − a)(b − t))`, the smooth part of the
/// potential `g = ½(Σ l_i ln l_i + h(t))`.
pub fn h_second(e: &ExtremalCoefficients, t: f64) -> Result<f64> {
    if !(t > e.a && t < e.b) {
        return Err(Error::DomainViolation {
            t,
            t_min: e.a,
            t_max: e.b,
        });
    }
    Ok(extremal_f_second(e, t)? - e.c / ((t - e.a) * (e.b - t)))
}

/// Offset from each endpoint at which [`endpoint_limits`] samples `h''`.
pub const ENDPOINT_OFFSET: f64 = 1e-6;

/// Largest change of `h''`, relative to `max(1, |h''|)`, allowed when the
/// endpoint offset is halved.
pub const HALVING_TOLERANCE: f64 = 1e-4;

/// `h''` next to one endpoint, at offsets `δ` and `δ/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointLimit {
    pub offset: f64,
    pub value: f64,
    pub halved: f64,
}

impl EndpointLimit {
    /// `|h''(δ) − h''(δ/2)| / max(1, |h''(δ/2)|)`.
    pub fn relative_change(&self) -> f64 {
        (self.value - self.halved).abs() / self.halved.abs().max(1.0)
    }

    pub fn is_stable(&self) -> bool {
        self.value.is_finite()
            && self.halved.is_finite()
            && self.relative_change() < HALVING_TOLERANCE
    }
}

/// `h''` approaching `a` from above and `b` from below.
pub fn endpoint_limits(
    e: &ExtremalCoefficients,
    offset: f64,
) -> Result<(EndpointLimit, EndpointLimit)> {
    if !(offset > 0.0 && 2.0 * offset < e.c) {
        return Err(Error::InvalidParameters(format!(
            "endpoint offset {offset} outside (0, (b-a)/2)"
        )));
    }
    let lower = EndpointLimit {
        offset,
        value: h_second(e, e.a + offset)?,
        halved: h_second(e, e.a + offset / 2.0)?,
    };
    let upper = EndpointLimit {
        offset,
        value: h_second(e, e.b - offset)?,
        halved: h_second(e, e.b - offset / 2.0)?,
    };
    Ok((lower, upper))
}

/// The assembled extremal metric.
#[derive(Debug, Clone)]
pub struct ExtremalMetric {
    pub polytope: MomentPolytope,
    pub profile: TPotential,
    pub coefficients: ExtremalCoefficients,
}

impl ExtremalMetric {
    /// The same metric as a general toric potential on the polytope.
    pub fn symplectic_potential(&self) -> SymplecticPotential {
        SymplecticPotential::radial(self.polytope.clone(), self.profile.clone())
            .expect("polytope and profile share the dimension")
    }
}

/// Profile of the extremal metric on `(a, b)`; `F'''` and `F''''` analytic.
pub fn extremal_profile(e: &ExtremalCoefficients) -> Result<TPotential> {
    let (e2, e3, e4) = (*e, *e, *e);
    Ok(TPotential::new(e.n, (e.a, e.b), move |t| {
        extremal_f_second(&e2, t).unwrap_or(f64::NAN)
    })?
    .with_derivatives(
        move |t| extremal_f_higher(&e3, t).map(|d| d.0).unwrap_or(f64::NAN),
        move |t| extremal_f_higher(&e4, t).map(|d| d.1).unwrap_or(f64::NAN),
    ))
}

/// Polytope, profile and coefficients of the extremal metric for `(n, a, b)`.
pub fn build_extremal_metric(n: usize, a: f64, b: f64) -> Result<ExtremalMetric> {
    let polytope = MomentPolytope::blowup(n, a, b)?;
    let coefficients = solve_coefficients(n, a, b)?;
    for k in 0..POSITIVITY_GRID {
        let t = a + (b - a) * (k + 1) as f64 / (POSITIVITY_GRID + 1) as f64;
        let value = coefficients.positivity(t);
        if !(value > 0.0) {
            return Err(Error::PositivityViolation { t, value });
        }
    }
    let profile = extremal_profile(&coefficients)?;
    Ok(ExtremalMetric {
        polytope,
        profile,
        coefficients,
    })
}
