//! Small dense linear algebra used by the curvature pipelines.
//!
//! Everything here works on matrices of size at most 16, so dense direct
//! methods are used throughout.

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};

use crate::error::{Error, Result};

/// Largest dimension accepted by [`invert_spd`].
pub const MAX_DENSE_DIM: usize = 16;

/// Symmetric positive definite inverse through an LDLᵀ factorization with
/// symmetric (diagonal) pivoting.
///
/// The largest remaining diagonal entry is moved to the pivot position at
/// every step, which keeps graded matrices such as `diag(1/x) + c·11ᵀ`
/// accurate when some `x_i` are tiny. A nonpositive pivot means the input is
/// not positive definite and is reported as [`Error::SingularHessian`].
pub fn invert_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.ncols(),
        });
    }
    if n > MAX_DENSE_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::SingularHessian);
    }
    let tiny = scale * f64::EPSILON * n as f64;

    for k in 0..n {
        let (pivot, _) =
            (k..n)
                .map(|j| (j, a[(j, j)]))
                .fold((k, f64::NEG_INFINITY), |best, cur| {
                    if cur.1 > best.1 {
                        cur
                    } else {
                        best
                    }
                });
        if pivot != k {
            a.swap_rows(k, pivot);
            a.swap_columns(k, pivot);
            perm.swap(k, pivot);
        }
        let d = a[(k, k)];
        if !(d > tiny) {
            return Err(Error::SingularHessian);
        }
        // Full trailing block is kept symmetric so later swaps stay valid.
        for i in (k + 1)..n {
            let l = a[(i, k)] / d;
            for j in (k + 1)..n {
                let v = a[(i, j)] - l * a[(j, k)];
                a[(i, j)] = v;
            }
        }
        for i in (k + 1)..n {
            a[(i, k)] /= d;
        }
    }

    // a now holds L strictly below the diagonal and D on it.
    let mut inv = DMatrix::zeros(n, n);
    let mut y = vec![0.0; n];
    for col in 0..n {
        // Permuted unit vector: (P e_col)_k = 1 where perm[k] == col.
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = if perm[k] == col { 1.0 } else { 0.0 };
        }
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= a[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in 0..n {
            y[i] /= a[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s -= a[(j, i)] * y[j];
            }
            y[i] = s;
        }
        for k in 0..n {
            inv[(perm[k], col)] = y[k];
        }
    }
    // Symmetrize away rounding asymmetry.
    let sym = (&inv + inv.transpose()) * 0.5;
    Ok(sym)
}

/// Solution of a row-scaled 4×4 system with its 1-norm condition estimate.
#[derive(Debug, Clone, Copy)]
pub struct ScaledSolve {
    pub solution: Vector4<f64>,
    /// `‖S M‖₁ ‖(S M)⁻¹‖₁` for the row-scaled matrix `S M`.
    pub condition: f64,
}

/// Condition numbers above this are reported as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

/// Solves `m x = rhs` after scaling each row by its largest absolute entry,
/// using LU with partial pivoting followed by one step of iterative
/// refinement.
pub fn solve_row_scaled(m: &Matrix4<f64>, rhs: &Vector4<f64>) -> Result<ScaledSolve> {
    let mut sm = *m;
    let mut srhs = *rhs;
    for i in 0..4 {
        let s = sm.row(i).amax();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::SingularSystem {
                condition: f64::INFINITY,
            });
        }
        sm.row_mut(i).unscale_mut(s);
        srhs[i] /= s;
    }
    let lu = sm.lu();
    let inverse = lu.try_inverse().ok_or(Error::SingularSystem {
        condition: f64::INFINITY,
    })?;
    let condition = one_norm(&sm) * one_norm(&inverse);
    if !condition.is_finite() || condition > SINGULAR_CONDITION {
        return Err(Error::SingularSystem { condition });
    }
    let mut x = lu.solve(&srhs).ok_or(Error::SingularSystem { condition })?;
    let residual = srhs - sm * x;
    if let Some(dx) = lu.solve(&residual) {
        x += dx;
    }
    Ok(ScaledSolve {
        solution: x,
        condition,
    })
}

fn one_norm(m: &Matrix4<f64>) -> f64 {
    m.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max)
}

/// Ordinary least-squares fit `value ≈ ⟨slope, x⟩ + intercept`.
///
/// Columns of the design matrix are scaled to unit max-abs before the SVD
/// solve. Fewer than `n + 1` points or a rank-deficient design is
/// [`Error::DegeneratePointSet`].
pub fn fit_affine(points: &[Vec<f64>], values: &[f64]) -> Result<(Vec<f64>, f64)> {
    let rows = points.len();
    if rows != values.len() {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: values.len(),
        });
    }
    let n = points
        .first()
        .map(Vec::len)
        .ok_or(Error::DegeneratePointSet)?;
    if rows < n + 1 {
        return Err(Error::DegeneratePointSet);
    }
    let mut design = DMatrix::zeros(rows, n + 1);
    for (r, p) in points.iter().enumerate() {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        for (c, &v) in p.iter().enumerate() {
            design[(r, c)] = v;
        }
        design[(r, n)] = 1.0;
    }
    let mut col_scale = vec![1.0; n + 1];
    for (c, s) in col_scale.iter_mut().enumerate() {
        let m = design.column(c).amax();
        if m > 0.0 {
            *s = m;
            design.column_mut(c).unscale_mut(m);
        }
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smax > 0.0) || smin <= smax * 1e-12 {
        return Err(Error::DegeneratePointSet);
    }
    let rhs = DVector::from_column_slice(values);
    let coef = svd
        .solve(&rhs, smax * 1e-14)
        .map_err(|_| Error::DegeneratePointSet)?;
    let slope = (0..n).map(|c| coef[c] / col_scale[c]).collect();
    Ok((slope, coef[n] / col_scale[n]))
}
