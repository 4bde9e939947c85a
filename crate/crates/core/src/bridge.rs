//! Kähler side of a radial metric.
//!
//! A U(n)-invariant Kähler potential `f(s)`, `s = Σ|z_i|²`, corresponds to the
//! radial symplectic profile through
//!
//! ```text
//! t = 2 s f'(s),    F(t) = t ln(s(t)/t) − 2 f(s(t)).
//! ```
//!
//! Calabi's curvature formula on the Kähler side gives a third scalar
//! curvature oracle, independent of both symplectic-side formulas.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{radial_scalar_curvature, richardson_second_derivative, Profile, TPotential};

/// Stop refining `s(t)` once the bracket is this narrow, relative to `s`.
pub const ROOT_RELATIVE_WIDTH: f64 = 1e-15;

const MAX_BRACKET_STEPS: usize = 2100;
const MAX_REFINE_STEPS: usize = 400;

/// U(n)-invariant Kähler potential `f(s)` on Cⁿ∖{0}.
#[derive(Clone)]
pub struct KahlerPotential {
    n: usize,
    value: Profile,
    first: Profile,
    second: Profile,
    /// Working range of `s`; fixes the t-domain of the induced profile.
    s_range: (f64, f64),
}

impl fmt::Debug for KahlerPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KahlerPotential")
            .field("n", &self.n)
            .field("s_range", &self.s_range)
            .finish()
    }
}

/// Default working range of `s` for the presets.
pub const DEFAULT_S_RANGE: (f64, f64) = (1e-8, 1e8);

impl KahlerPotential {
    pub fn new<F, F1, F2>(n: usize, value: F, first: F1, second: F2) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        F1: Fn(f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(Error::InvalidParameters(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            n,
            value: Arc::new(value),
            first: Arc::new(first),
            second: Arc::new(second),
            s_range: DEFAULT_S_RANGE,
        })
    }

    /// Potential given by values only; `f'` and `f''` by central differences.
    pub fn from_value<F>(n: usize, value: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let value: Profile = Arc::new(value);
        let (v1, v2) = (value.clone(), value.clone());
        let first = move |s: f64| {
            let h = f64::EPSILON.cbrt() * s.abs().max(1e-3);
            (v1(s + h) - v1(s - h)) / (2.0 * h)
        };
        let second = move |s: f64| {
            let h = f64::EPSILON.powf(0.25) * s.abs().max(1e-3);
            (v2(s + h) - 2.0 * v2(s) + v2(s - h)) / (h * h)
        };
        let mut k = Self::new(n, |_| 0.0, first, second)?;
        k.value = value;
        Ok(k)
    }

    pub fn with_s_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidParameters(format!(
                "bad s range ({lo}, {hi})"
            )));
        }
        self.s_range = (lo, hi);
        Ok(self)
    }

    /// `f(s) = s/2`, the flat metric.
    pub fn flat(n: usize) -> Result<Self> {
        Self::new(n, |s| 0.5 * s, |_| 0.5, |_| 0.0)
    }

    /// `f(s) = ½ ln(1 + s)`, the Fubini–Study metric on the affine chart of CPⁿ.
    pub fn fubini_study(n: usize) -> Result<Self> {
        Self::new(
            n,
            |s| 0.5 * s.ln_1p(),
            |s| 0.5 / (1.0 + s),
            |s| -0.5 / ((1.0 + s) * (1.0 + s)),
        )
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.value)(s)
    }

    pub fn first(&self, s: f64) -> f64 {
        (self.first)(s)
    }

    pub fn second(&self, s: f64) -> f64 {
        (self.second)(s)
    }

    /// Radial profile induced through the Legendre relations. `F''` is
    /// obtained from `F'(t) = ln(s(t)/t) − 1`, so
    /// `F''(t) = 1/(2 s (f' + s f'')) − 1/t` at `s = s(t)`.
    pub fn t_potential(&self) -> Result<TPotential> {
        let t_lo = t_of_s(self, self.s_range.0)?;
        let t_hi = t_of_s(self, self.s_range.1)?;
        let (k2, k0) = (self.clone(), self.clone());
        let profile = TPotential::new(self.n, (t_lo, t_hi), move |t| match s_of_t(&k2, t) {
            Ok(s) => 1.0 / (2.0 * s * (k2.first(s) + s * k2.second(s))) - 1.0 / t,
            Err(_) => f64::NAN,
        })?;
        Ok(profile.with_value(move |t| f_of_t(&k0, t).unwrap_or(f64::NAN)))
    }
}

fn check_positive_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::DomainViolation {
            t: s,
            t_min: 0.0,
            t_max: f64::INFINITY,
        });
    }
    Ok(())
}

/// Moment map in the radial variable: `t = 2 s f'(s)`.
pub fn t_of_s(k: &KahlerPotential, s: f64) -> Result<f64> {
    check_positive_s(s)?;
    Ok(2.0 * s * k.first(s))
}

/// Inverse of [`t_of_s`]: geometric bracketing from `s = t`, then a
/// bisection/secant hybrid.
pub fn s_of_t(k: &KahlerPotential, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRange { t });
    }
    let g = |s: f64| -> Result<f64> { Ok(t_of_s(k, s)? - t) };

    let g0 = g(t)?;
    if g0 == 0.0 {
        return Ok(t);
    }
    let (mut lo, mut glo, mut hi, mut ghi);
    if g0 < 0.0 {
        lo = t;
        glo = g0;
        hi = t;
        ghi = g0;
        let mut steps = 0;
        while ghi < 0.0 {
            steps += 1;
            let next = hi * 2.0;
            if steps > MAX_BRACKET_STEPS || !(next < f64::MAX / 4.0) {
                return Err(Error::OutOfRange { t });
            }
            let gn = g(next)?;
            if !(gn >= ghi) {
                return Err(Error::NotInvertible { s: next });
            }
            lo = hi;
            glo = ghi;
            hi = next;
            ghi = gn;
        }
    } else {
        lo = t;
        glo = g0;
        hi = t;
        ghi = g0;
        let mut steps = 0;
        while glo > 0.0 {
            steps += 1;
            let next = lo * 0.5;
            if steps > MAX_BRACKET_STEPS || !(next > f64::MIN_POSITIVE * 4.0) {
                return Err(Error::OutOfRange { t });
            }
            let gn = g(next)?;
            if !(gn <= glo) {
                return Err(Error::NotInvertible { s: next });
            }
            hi = lo;
            ghi = glo;
            lo = next;
            glo = gn;
        }
    }

    let mut previous_width = hi - lo;
    let mut bisect = false;
    for _ in 0..MAX_REFINE_STEPS {
        if glo == 0.0 {
            return Ok(lo);
        }
        if ghi == 0.0 {
            return Ok(hi);
        }
        if hi - lo <= ROOT_RELATIVE_WIDTH * hi {
            break;
        }
        let mid = if hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        let secant = lo - glo * (hi - lo) / (ghi - glo);
        let candidate = if !bisect && secant > lo && secant < hi {
            secant
        } else {
            mid
        };
        let gc = g(candidate)?;
        if !(glo <= gc && gc <= ghi) {
            // Non-monotone only at the rounding level; the bracket is as
            // tight as the map allows.
            break;
        }
        if gc < 0.0 {
            lo = candidate;
            glo = gc;
        } else {
            hi = candidate;
            ghi = gc;
        }
        let width = hi - lo;
        bisect = width > 0.5 * previous_width;
        previous_width = width;
    }
    Ok(if glo.abs() <= ghi.abs() { lo } else { hi })
}

/// `F(t) = t ln(s(t)/t) − 2 f(s(t))`.
pub fn f_of_t(k: &KahlerPotential, t: f64) -> Result<f64> {
    let s = s_of_t(k, t)?;
    Ok(t * (s / t).ln() - 2.0 * k.value(s))
}

/// Calabi's formula
/// `S = (n−1) v'/φ' + v''/φ''`, `v = n s̃ − (n−1) ln φ' − ln φ''`,
/// with primes in `s̃ = ln s` and `φ(s̃) = 2 f(e^{s̃})`.
///
/// The factor 2 is Calabi's normalization of the Kähler potential; with it
/// the result agrees with the symplectic-side formulas. The explicit `s̃`
/// terms of `v` cancel, leaving `v = −(n−1) ln(2f') − ln(2(f' + s f''))`.
pub fn calabi_scalar_curvature(k: &KahlerPotential, s: f64) -> Result<f64> {
    check_positive_s(s)?;
    let n = k.n as f64;
    let dphi = |s: f64| 2.0 * s * k.first(s);
    let d2phi = |s: f64| 2.0 * s * (k.first(s) + s * k.second(s));
    let v = |sigma: f64| -> Result<f64> {
        let s = sigma.exp();
        let f1 = 2.0 * k.first(s);
        let f12 = 2.0 * (k.first(s) + s * k.second(s));
        if !(f1 > 0.0 && f12 > 0.0) {
            return Err(Error::NonpositiveDerivative { s });
        }
        Ok(-(n - 1.0) * f1.ln() - f12.ln())
    };
    let (p1, p2) = (dphi(s), d2phi(s));
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(Error::NonpositiveDerivative { s });
    }
    let sigma = s.ln();
    let scale = sigma.abs().max(1.0);
    let h1 = f64::EPSILON.cbrt() * scale;
    let dv = (v(sigma + h1)? - v(sigma - h1)?) / (2.0 * h1);
    // Richardson-extrapolated second difference: O(h⁴) truncation.
    let h2 = f64::EPSILON.powf(1.0 / 6.0) * scale;
    let d2v = richardson_second_derivative(v, sigma, h2)?;
    Ok((n - 1.0) * dv / p1 + d2v / p2)
}

/// Built-in Kähler potentials addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BridgePreset {
    Flat,
    FubiniStudy,
    /// The extremal metrics are built on the symplectic side only; there is no
    /// Kähler potential to compare against.
    Extremal,
}

impl BridgePreset {
    pub fn name(self) -> &'static str {
        match self {
            Self::Flat => "flat",
            Self::FubiniStudy => "fubini-study",
            Self::Extremal => "extremal",
        }
    }

    pub fn potential(self, n: usize) -> Option<Result<KahlerPotential>> {
        match self {
            Self::Flat => Some(KahlerPotential::flat(n)),
            Self::FubiniStudy => Some(KahlerPotential::fubini_study(n)),
            Self::Extremal => None,
        }
    }
}

impl FromStr for BridgePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flat" => Ok(Self::Flat),
            "fubini-study" => Ok(Self::FubiniStudy),
            "extremal" => Ok(Self::Extremal),
            other => Err(Error::InvalidParameters(format!(
                "unknown preset {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeSample {
    pub s: f64,
    pub t: f64,
    pub calabi: f64,
    pub radial: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    pub supported: bool,
    pub samples: Vec<BridgeSample>,
    pub max_abs_discrepancy: f64,
    /// Discrepancy divided by `max(1, |S|)`.
    pub max_rel_discrepancy: f64,
}

impl BridgeReport {
    pub fn unsupported() -> Self {
        Self {
            supported: false,
            samples: Vec::new(),
            max_abs_discrepancy: f64::NAN,
            max_rel_discrepancy: f64::NAN,
        }
    }
}

/// Compares Calabi's formula at each `s` with the radial formula applied to
/// the induced profile at `t = t(s)`.
pub fn bridge_cross_check(k: &KahlerPotential, s_samples: &[f64]) -> Result<BridgeReport> {
    let profile = k.t_potential()?;
    let mut samples = Vec::with_capacity(s_samples.len());
    let (mut max_abs, mut max_rel) = (0.0f64, 0.0f64);
    for &s in s_samples {
        let t = t_of_s(k, s)?;
        let calabi = calabi_scalar_curvature(k, s)?;
        let radial = radial_scalar_curvature(&profile, t)?;
        let diff = (calabi - radial).abs();
        max_abs = max_abs.max(diff);
        max_rel = max_rel.max(diff / radial.abs().max(1.0));
        samples.push(BridgeSample {
            s,
            t,
            calabi,
            radial,
        });
    }
    Ok(BridgeReport {
        supported: true,
        samples,
        max_abs_discrepancy: max_abs,
        max_rel_discrepancy: max_rel,
    })
}

/// `count` points spaced geometrically over `[lo, hi]`.
pub fn geometric_samples(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![(lo * hi).sqrt()],
        _ => (0..count)
            .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
            .collect(),
    }
}
