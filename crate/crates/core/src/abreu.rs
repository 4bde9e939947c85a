//! Scalar curvature of a toric Kähler metric from its symplectic potential,
//! `S = −½ Σ_{i,j} ∂²G^{ij}/∂x_i∂x_j`, where `G^{ij}` are the entries of the
//! inverse Hessian of `g`.
//!
//! The inverse Hessian is formed numerically at every stencil point, so this
//! path is independent of the one-variable formula in [`crate::radial`].

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{fit_affine, invert_spd, MAX_DENSE_DIM};
use crate::polytope::MomentPolytope;
use crate::radial::{radial_hessian, TPotential};

/// Real function on the polytope interior.
pub type ValueOracle = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Upper bound on the outer stencil step.
pub const MAX_OUTER_STEP: f64 = 1e-3;

#[derive(Clone)]
enum HessianOracle {
    Radial(TPotential),
    Numeric { value: ValueOracle, step: f64 },
}

/// Symplectic potential on a polytope, seen through its Hessian.
#[derive(Clone)]
pub struct SymplecticPotential {
    polytope: MomentPolytope,
    oracle: HessianOracle,
}

impl fmt::Debug for SymplecticPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.oracle {
            HessianOracle::Radial(_) => "radial",
            HessianOracle::Numeric { .. } => "numeric",
        };
        f.debug_struct("SymplecticPotential")
            .field("polytope", &self.polytope)
            .field("hessian", &kind)
            .finish()
    }
}

impl SymplecticPotential {
    /// `½(Σ x_i ln x_i + F(t))` with its analytic Hessian.
    pub fn radial(polytope: MomentPolytope, profile: TPotential) -> Result<Self> {
        if polytope.dimension() != profile.dimension() {
            return Err(Error::DimensionMismatch {
                expected: polytope.dimension(),
                got: profile.dimension(),
            });
        }
        Ok(Self {
            polytope,
            oracle: HessianOracle::Radial(profile),
        })
    }

    /// Potential given by values only; the Hessian is taken by central
    /// differences with step `step`.
    pub fn from_values<G>(polytope: MomentPolytope, value: G, step: f64) -> Result<Self>
    where
        G: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if !(step > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "hessian step must be positive, got {step}"
            )));
        }
        Ok(Self {
            polytope,
            oracle: HessianOracle::Numeric {
                value: Arc::new(value),
                step,
            },
        })
    }

    pub fn polytope(&self) -> &MomentPolytope {
        &self.polytope
    }

    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.polytope.dimension();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        match &self.oracle {
            HessianOracle::Radial(profile) => {
                let t = invariant_sum(x);
                if !profile.contains(t) {
                    let (t_min, t_max) = profile.domain();
                    return Err(Error::DomainViolation { t, t_min, t_max });
                }
                radial_hessian(x, profile.second(t))
            }
            HessianOracle::Numeric { value, step } => {
                let distance = self.polytope.min_facet_value(x)?;
                if distance < 2.0 * step {
                    return Err(Error::StencilExitsDomain {
                        step: *step,
                        distance,
                    });
                }
                numeric_hessian(|y| value(y), x, *step)
            }
        }
    }

    pub fn inverse_hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        invert_spd(&self.hessian(x)?)
    }
}

/// Sum that does not depend on the order of `x`.
fn invariant_sum(x: &[f64]) -> f64 {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum()
}

/// Central-difference Hessian: three-point second differences on the
/// diagonal, the four-point cross stencil off it, then symmetrized.
pub fn numeric_hessian<G>(g: G, x: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    G: Fn(&[f64]) -> f64,
{
    let n = x.len();
    let mut y = x.to_vec();
    let eval = |y: &[f64]| -> Result<f64> {
        let v = g(y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::StencilExitsDomain {
                step: h,
                distance: f64::NAN,
            })
        }
    };
    let g0 = eval(x)?;
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        y[i] = x[i] + h;
        let plus = eval(&y)?;
        y[i] = x[i] - h;
        let minus = eval(&y)?;
        y[i] = x[i];
        hess[(i, i)] = (plus - 2.0 * g0 + minus) / (h * h);
        for j in (i + 1)..n {
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                y[i] = x[i] + si * h;
                y[j] = x[j] + sj * h;
                let v = eval(&y);
                y[i] = x[i];
                y[j] = x[j];
                v
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            let mixed = (pp - pm - mp + mm) / (4.0 * h * h);
            hess[(i, j)] = mixed;
            hess[(j, i)] = mixed;
        }
    }
    Ok(hess)
}

/// Default outer step: a quarter of the facet distance, capped, rounded down
/// to a power of two.
///
/// `G⁻¹` stays smooth up to the facets, so the step only has to keep the
/// stencil inside the polytope. Smaller steps are dominated by rounding in
/// the inversion.
pub fn default_outer_step(distance: f64) -> f64 {
    let raw = (0.25 * distance).min(MAX_OUTER_STEP);
    2f64.powi(raw.log2().floor() as i32)
}

/// Abreu's scalar curvature at `x`, with one Richardson level over steps
/// `h` and `h/2`. `step = None` uses [`default_outer_step`].
pub fn abreu_scalar_curvature(
    potential: &SymplecticPotential,
    x: &[f64],
    step: Option<f64>,
) -> Result<f64> {
    let n = potential.polytope.dimension();
    if n > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let distance = potential.polytope.min_facet_value(x)?;
    let h = step.unwrap_or_else(|| default_outer_step(distance));
    if !(h > 0.0) || !(distance >= 3.0 * h) {
        return Err(Error::StencilExitsDomain { step: h, distance });
    }
    let center = potential.inverse_hessian(x)?;
    let coarse = divergence_sum(potential, x, &center, h)?;
    let fine = divergence_sum(potential, x, &center, 0.5 * h)?;
    Ok(-0.5 * (4.0 * fine - coarse) / 3.0)
}

/// `Σ_{i,j} ∂²G^{ij}/∂x_i∂x_j` by central differences with step `h`.
fn divergence_sum(
    potential: &SymplecticPotential,
    x: &[f64],
    center: &DMatrix<f64>,
    h: f64,
) -> Result<f64> {
    let n = x.len();
    let mut y = x.to_vec();
    let mut total = 0.0;
    for i in 0..n {
        y[i] = x[i] + h;
        let plus = potential.inverse_hessian(&y)?;
        y[i] = x[i] - h;
        let minus = potential.inverse_hessian(&y)?;
        y[i] = x[i];
        total += (plus[(i, i)] - 2.0 * center[(i, i)] + minus[(i, i)]) / (h * h);
        for j in (i + 1)..n {
            let mut corner = |si: f64, sj: f64| -> Result<f64> {
                y[i] = x[i] + si * h;
                y[j] = x[j] + sj * h;
                let inv = potential.inverse_hessian(&y);
                y[i] = x[i];
                y[j] = x[j];
                Ok(inv?[(i, j)])
            };
            let pp = corner(1.0, 1.0)?;
            let pm = corner(1.0, -1.0)?;
            let mp = corner(-1.0, 1.0)?;
            let mm = corner(-1.0, -1.0)?;
            // G^{ij} and G^{ji} contribute equally.
            total += 2.0 * (pp - pm - mp + mm) / (4.0 * h * h);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCurvatureSample {
    pub x: Vec<f64>,
    pub s: f64,
}

/// Least-squares affine fit of the scalar curvature over a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityFit {
    pub slope: Vec<f64>,
    pub intercept: f64,
    /// `max_k |S(x_k) − ⟨slope, x_k⟩ − intercept|`.
    pub max_residual: f64,
    pub samples: Vec<ScalarCurvatureSample>,
}

/// Fits `S(x) ≈ ⟨m, x⟩ + c`; a metric is extremal when the residual vanishes.
pub fn extremality_residual(
    potential: &SymplecticPotential,
    points: &[Vec<f64>],
    step: Option<f64>,
) -> Result<ExtremalityFit> {
    let n = potential.polytope.dimension();
    if points.len() < n + 1 {
        return Err(Error::DegeneratePointSet);
    }
    let values = points
        .iter()
        .map(|x| abreu_scalar_curvature(potential, x, step))
        .collect::<Result<Vec<_>>>()?;
    let (slope, intercept) = fit_affine(points, &values)?;
    let max_residual = points
        .iter()
        .zip(&values)
        .map(|(x, s)| {
            let fit: f64 = slope.iter().zip(x).map(|(m, xi)| m * xi).sum::<f64>() + intercept;
            (s - fit).abs()
        })
        .fold(0.0, f64::max);
    let samples = points
        .iter()
        .zip(values)
        .map(|(x, s)| ScalarCurvatureSample { x: x.clone(), s })
        .collect();
    Ok(ExtremalityFit {
        slope,
        intercept,
        max_residual,
        samples,
    })
}
