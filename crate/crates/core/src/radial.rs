//! U(n)-invariant toric metrics on Cⁿ∖{0}.
//!
//! A radial symplectic potential has the form `g(x) = ½(Σ x_i ln x_i + F(t))`
//! with `t = Σ x_i`. Everything here is driven by the profile `F''(t)`; the
//! potential itself is only needed for round trips through the Kähler side.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Real function of one variable, shared between threads.
pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `1 + t F''(t)` at or below this value is treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Radial profile of a symplectic potential, stored through `F''`.
#[derive(Clone)]
pub struct TPotential {
    n: usize,
    t_min: f64,
    t_max: f64,
    second: Profile,
    third: Option<Profile>,
    fourth: Option<Profile>,
    value: Option<Profile>,
}

impl fmt::Debug for TPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TPotential")
            .field("n", &self.n)
            .field("domain", &(self.t_min, self.t_max))
            .field("analytic_derivatives", &self.has_analytic_derivatives())
            .field("has_value", &self.value.is_some())
            .finish()
    }
}

impl TPotential {
    pub fn new<F>(n: usize, domain: (f64, f64), second: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (t_min, t_max) = domain;
        if n == 0 {
            return Err(Error::InvalidParameters(
                "dimension must be at least 1".into(),
            ));
        }
        if !(t_min >= 0.0 && t_max > t_min && t_max.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "t-domain must satisfy 0 <= t_min < t_max < inf, got ({t_min}, {t_max})"
            )));
        }
        Ok(Self {
            n,
            t_min,
            t_max,
            second: Arc::new(second),
            third: None,
            fourth: None,
            value: None,
        })
    }

    /// Supplies `F'''` and `F''''`, enabling the analytic curvature path.
    pub fn with_derivatives<F3, F4>(mut self, third: F3, fourth: F4) -> Self
    where
        F3: Fn(f64) -> f64 + Send + Sync + 'static,
        F4: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.third = Some(Arc::new(third));
        self.fourth = Some(Arc::new(fourth));
        self
    }

    /// Supplies `F` itself.
    pub fn with_value<F>(mut self, value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.value = Some(Arc::new(value));
        self
    }

    /// `F'' ≡ 0` on `(0, t_max)`: the flat metric.
    pub fn flat(n: usize, t_max: f64) -> Result<Self> {
        Ok(Self::new(n, (0.0, t_max), |_| 0.0)?
            .with_derivatives(|_| 0.0, |_| 0.0)
            .with_value(|t| -t))
    }

    /// `F(t) = (1 − t) ln(1 − t)` on `(0, 1)`, the Fubini–Study profile of CPⁿ.
    /// Its scalar curvature is the constant `n(n + 1)`.
    pub fn projective(n: usize) -> Result<Self> {
        Ok(Self::new(n, (0.0, 1.0), |t| 1.0 / (1.0 - t))?
            .with_derivatives(
                |t| 1.0 / ((1.0 - t) * (1.0 - t)),
                |t| 2.0 / (1.0 - t).powi(3),
            )
            .with_value(|t| (1.0 - t) * (1.0 - t).ln()))
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.third.is_some() && self.fourth.is_some()
    }

    pub fn second(&self, t: f64) -> f64 {
        (self.second)(t)
    }

    pub fn third(&self, t: f64) -> Option<f64> {
        self.third.as_ref().map(|f| f(t))
    }

    pub fn fourth(&self, t: f64) -> Option<f64> {
        self.fourth.as_ref().map(|f| f(t))
    }

    pub fn value(&self, t: f64) -> Option<f64> {
        self.value.as_ref().map(|f| f(t))
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.t_min && t < self.t_max
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !self.contains(t) {
            return Err(Error::DomainViolation {
                t,
                t_min: self.t_min,
                t_max: self.t_max,
            });
        }
        Ok(())
    }

    /// `1 + t F''(t)`, checked against the degeneracy threshold.
    fn metric_margin(&self, t: f64) -> Result<f64> {
        let margin = 1.0 + t * self.second(t);
        if !(margin > DEGENERACY_THRESHOLD) {
            return Err(Error::DegenerateMetric { t, margin });
        }
        Ok(margin)
    }
}

fn check_interior(x: &[f64]) -> Result<()> {
    for (index, &value) in x.iter().enumerate() {
        if !(value > 0.0) {
            return Err(Error::NonInteriorPoint { index, value });
        }
    }
    Ok(())
}

/// Hessian of `½(Σ x_i ln x_i + F(t))`: `G_ij = ½(δ_ij / x_i + F''(t))`.
pub fn radial_hessian(x: &[f64], f_second: f64) -> Result<DMatrix<f64>> {
    check_interior(x)?;
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 / x[i] } else { 0.0 };
        0.5 * (diag + f_second)
    }))
}

/// Inverse of [`radial_hessian`] by the rank-one update formula
/// `G⁻¹ = 2 (diag(x) − F'' x xᵀ / (1 + t F''))`.
pub fn radial_hessian_inverse(x: &[f64], f_second: f64) -> Result<DMatrix<f64>> {
    check_interior(x)?;
    let t: f64 = x.iter().sum();
    let margin = 1.0 + t * f_second;
    if !(margin > DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateMetric { t, margin });
    }
    let k = f_second / margin;
    let n = x.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { x[i] } else { 0.0 };
        2.0 * (diag - k * x[i] * x[j])
    }))
}

/// How [`radial_scalar_curvature_with`] differentiates `u(t) = t^{n+1} F'' / (1 + t F'')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differentiation {
    /// Analytic when `F'''` and `F''''` are available, otherwise finite differences.
    Auto,
    Analytic,
    FiniteDifference,
}

/// Scalar curvature `S(t) = t^{1−n} (t^{n+1} F'' / (1 + t F''))''` of a radial metric.
pub fn radial_scalar_curvature(potential: &TPotential, t: f64) -> Result<f64> {
    radial_scalar_curvature_with(potential, t, Differentiation::Auto)
}

pub fn radial_scalar_curvature_with(
    potential: &TPotential,
    t: f64,
    how: Differentiation,
) -> Result<f64> {
    potential.check_domain(t)?;
    let analytic = match how {
        Differentiation::Auto => potential.has_analytic_derivatives(),
        Differentiation::Analytic => {
            if !potential.has_analytic_derivatives() {
                return Err(Error::InvalidParameters(
                    "analytic path needs F''' and F''''".into(),
                ));
            }
            true
        }
        Differentiation::FiniteDifference => false,
    };
    if analytic {
        analytic_curvature(potential, t)
    } else {
        finite_difference_curvature(potential, t)
    }
}

// With q = F''/(1 + tF''), S = n(n+1) q + 2(n+1) t q' + t² q''.
fn analytic_curvature(potential: &TPotential, t: f64) -> Result<f64> {
    let margin = potential.metric_margin(t)?;
    let n = potential.n as f64;
    let w = potential.second(t);
    let w1 = potential.third(t).unwrap_or(f64::NAN);
    let w2 = potential.fourth(t).unwrap_or(f64::NAN);
    let q = w / margin;
    let dq = (w1 - w * w) / (margin * margin);
    let d2q = (w2 - 2.0 * w * w1) / (margin * margin)
        - 2.0 * (w1 - w * w) * (w + t * w1) / margin.powi(3);
    Ok(n * (n + 1.0) * q + 2.0 * (n + 1.0) * t * dq + t * t * d2q)
}

fn finite_difference_curvature(potential: &TPotential, t: f64) -> Result<f64> {
    let n = potential.n as i32;
    let u = |s: f64| -> Result<f64> {
        let margin = potential.metric_margin(s)?;
        Ok(s.powi(n + 1) * potential.second(s) / margin)
    };
    let (t_min, t_max) = potential.domain();
    let room = (t - t_min).min(t_max - t);
    let h = (f64::EPSILON.powf(0.25) * t.abs().max(1.0)).min(0.5 * room);
    let d2u = richardson_second_derivative(u, t, h)?;
    Ok(t.powi(1 - n) * d2u)
}

/// Central second difference with one Richardson level:
/// `(4 D(h/2) − D(h)) / 3`.
pub(crate) fn richardson_second_derivative<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let f0 = f(x)?;
    let coarse = (f(x + h)? - 2.0 * f0 + f(x - h)?) / (h * h);
    let g = 0.5 * h;
    let fine = (f(x + g)? - 2.0 * f0 + f(x - g)?) / (g * g);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Outcome of [`validity_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validity {
    pub passed: bool,
    /// Smallest `1 + t F''(t)` on the grid.
    pub min_margin: f64,
    /// Where the minimum occurs.
    pub at: f64,
}

/// Samples `1 + t F''(t)` on `samples` uniformly spaced interior points.
pub fn validity_check(potential: &TPotential, samples: usize) -> Validity {
    let samples = samples.max(1);
    let (t_min, t_max) = potential.domain();
    let width = t_max - t_min;
    let mut worst = Validity {
        passed: true,
        min_margin: f64::INFINITY,
        at: f64::NAN,
    };
    for k in 0..samples {
        let t = t_min + width * (k + 1) as f64 / (samples + 1) as f64;
        let margin = 1.0 + t * potential.second(t);
        // NaN counts as a failure.
        if !(margin >= worst.min_margin) {
            worst.min_margin = margin;
            worst.at = t;
        }
    }
    worst.passed = worst.min_margin > DEGENERACY_THRESHOLD;
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn hessian_examples() {
        let h = radial_hessian(&[1.0, 1.0], 0.0).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.5]));
        let h = radial_hessian(&[1.0, 1.0], 1.0).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
        let h = radial_hessian(&[2.0, 1.0], 0.0).unwrap();
        assert_eq!(h, DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 0.5]));
        assert!(matches!(
            radial_hessian(&[1.0, 0.0], 0.0),
            Err(Error::NonInteriorPoint { index: 1, .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        let inv = radial_hessian_inverse(&[1.0, 1.0], 0.0).unwrap();
        assert_eq!(inv, DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]));
        // direct 2x2 inversion of [[1, .5], [.5, 1]]: det = 3/4
        let inv = radial_hessian_inverse(&[1.0, 1.0], 1.0).unwrap();
        let expected =
            DMatrix::from_row_slice(2, 2, &[4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0]);
        assert!((inv - expected).amax() < 1e-15);
        assert!(matches!(
            radial_hessian_inverse(&[1.0, 1.0], -0.5),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn flat_curvature_vanishes() {
        for n in 1..=4 {
            let p = TPotential::flat(n, 10.0).unwrap();
            for &t in &[0.1, 1.0, 5.0] {
                assert_eq!(radial_scalar_curvature(&p, t).unwrap(), 0.0);
                let fd =
                    radial_scalar_curvature_with(&p, t, Differentiation::FiniteDifference).unwrap();
                assert_abs_diff_eq!(fd, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn unit_profile_in_one_dimension() {
        // u = t²/(1+t), u'' = 2/(1+t)³ → S(1) = 2/8
        let p = TPotential::new(1, (0.0, 3.0), |_| 1.0)
            .unwrap()
            .with_derivatives(|_| 0.0, |_| 0.0);
        assert_abs_diff_eq!(
            radial_scalar_curvature(&p, 1.0).unwrap(),
            0.25,
            epsilon = 1e-14
        );
        let fd = radial_scalar_curvature_with(&p, 1.0, Differentiation::FiniteDifference).unwrap();
        assert_abs_diff_eq!(fd, 0.25, epsilon = 1e-7);
    }

    #[test]
    fn projective_profile_constant_curvature() {
        let p = TPotential::projective(2).unwrap();
        assert_abs_diff_eq!(
            radial_scalar_curvature(&p, 0.5).unwrap(),
            6.0,
            epsilon = 1e-12
        );
        let fd = radial_scalar_curvature_with(&p, 0.5, Differentiation::FiniteDifference).unwrap();
        assert_abs_diff_eq!(fd, 6.0, epsilon = 1e-6);
    }

    #[test]
    fn curvature_domain_and_degeneracy() {
        let p = TPotential::projective(2).unwrap();
        assert!(matches!(
            radial_scalar_curvature(&p, 1.0),
            Err(Error::DomainViolation { .. })
        ));
        let bad = TPotential::new(2, (0.5, 1.0), |t| -2.0 / t).unwrap();
        assert!(matches!(
            radial_scalar_curvature(&bad, 0.75),
            Err(Error::DegenerateMetric { .. })
        ));
        let no_derivs = TPotential::new(2, (0.0, 1.0), |_| 0.0).unwrap();
        assert!(radial_scalar_curvature_with(&no_derivs, 0.5, Differentiation::Analytic).is_err());
    }

    #[test]
    fn validity_examples() {
        let flat = TPotential::flat(2, 1.0).unwrap();
        let v = validity_check(&flat, 100);
        assert!(v.passed);
        assert_eq!(v.min_margin, 1.0);

        let bad = TPotential::new(2, (0.5, 1.0), |t| -2.0 / t).unwrap();
        let v = validity_check(&bad, 100);
        assert!(!v.passed);
        assert_abs_diff_eq!(v.min_margin, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn potential_rejects_bad_domain() {
        assert!(TPotential::new(2, (1.0, 0.5), |_| 0.0).is_err());
        assert!(TPotential::new(2, (-1.0, 0.5), |_| 0.0).is_err());
        assert!(TPotential::new(0, (0.0, 0.5), |_| 0.0).is_err());
        assert!(TPotential::new(2, (0.0, f64::INFINITY), |_| 0.0).is_err());
    }
}
