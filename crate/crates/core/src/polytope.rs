//! Moment polytopes described by their facet affine functions.
//!
//! The blow-up of CPⁿ at a point has the polytope
//! `{x_i ≥ 0, a ≤ t ≤ b}` with `t = Σ x_i` and `0 < a < b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Comparison tolerance for facet data.
pub const FACET_TOLERANCE: f64 = 1e-12;

/// Rejection-sampling budget for [`MomentPolytope::sample_interior`].
pub const SAMPLE_RETRY_BUDGET: u64 = 1_000_000;

/// Name of the generator used by [`MomentPolytope::sample_interior`].
pub const SAMPLER_PRNG: &str = "ChaCha8Rng::seed_from_u64";

/// Affine function `l(x) = ⟨normal, x⟩ + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFacet {
    pub normal: Vec<i64>,
    pub offset: f64,
}

impl AffineFacet {
    pub fn new(normal: Vec<i64>, offset: f64) -> Result<Self> {
        if normal.iter().all(|&c| c == 0) {
            return Err(Error::InvalidParameters("facet normal is zero".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.normal
            .iter()
            .zip(x)
            .fold(self.offset, |acc, (&c, &xi)| acc + c as f64 * xi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentPolytope {
    dimension: usize,
    facets: Vec<AffineFacet>,
    /// Axis-aligned box containing the polytope, when it is bounded.
    bounding_box: Option<Vec<(f64, f64)>>,
}

impl MomentPolytope {
    /// Blow-up of CPⁿ at a point: facets `x_1, …, x_n, t − a, b − t`.
    pub fn blowup(n: usize, a: f64, b: f64) -> Result<Self> {
        check_blowup_parameters(n, a, b)?;
        let mut facets: Vec<AffineFacet> = (0..n)
            .map(|i| {
                let mut normal = vec![0; n];
                normal[i] = 1;
                AffineFacet {
                    normal,
                    offset: 0.0,
                }
            })
            .collect();
        facets.push(AffineFacet {
            normal: vec![1; n],
            offset: -a,
        });
        facets.push(AffineFacet {
            normal: vec![-1; n],
            offset: b,
        });
        Ok(Self {
            dimension: n,
            facets,
            bounding_box: Some(vec![(0.0, b); n]),
        })
    }

    /// Standard simplex `{x_i ≥ 0, t ≤ size}`, the moment polytope of CPⁿ.
    pub fn simplex(n: usize, size: f64) -> Result<Self> {
        if n == 0 || !(size > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "simplex n={n}, size={size}"
            )));
        }
        let mut facets: Vec<AffineFacet> = (0..n)
            .map(|i| {
                let mut normal = vec![0; n];
                normal[i] = 1;
                AffineFacet {
                    normal,
                    offset: 0.0,
                }
            })
            .collect();
        facets.push(AffineFacet {
            normal: vec![-1; n],
            offset: size,
        });
        Ok(Self {
            dimension: n,
            facets,
            bounding_box: Some(vec![(0.0, size); n]),
        })
    }

    /// Positive orthant, the moment polytope of Cⁿ. Unbounded.
    pub fn orthant(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("orthant of dimension 0".into()));
        }
        let facets = (0..n)
            .map(|i| {
                let mut normal = vec![0; n];
                normal[i] = 1;
                AffineFacet {
                    normal,
                    offset: 0.0,
                }
            })
            .collect();
        Ok(Self {
            dimension: n,
            facets,
            bounding_box: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn facets(&self) -> &[AffineFacet] {
        &self.facets
    }

    pub fn facet_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dimension(x)?;
        Ok(self.facets.iter().map(|f| f.eval(x)).collect())
    }

    /// Smallest facet value at `x`, i.e. distance to the boundary in facet units.
    pub fn min_facet_value(&self, x: &[f64]) -> Result<f64> {
        self.check_dimension(x)?;
        Ok(self
            .facets
            .iter()
            .map(|f| f.eval(x))
            .fold(f64::INFINITY, f64::min))
    }

    pub fn contains_interior(&self, x: &[f64]) -> bool {
        x.len() == self.dimension && self.facets.iter().all(|f| f.eval(x) > 0.0)
    }

    /// Deterministic rejection sampling of `count` points whose facet values
    /// are all at least `margin`.
    pub fn sample_interior(&self, count: usize, margin: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
        if !(margin > 0.0) {
            return Err(Error::InvalidParameters(format!(
                "margin must be positive, got {margin}"
            )));
        }
        let bbox = self.bounding_box.as_ref().ok_or_else(|| {
            Error::InvalidParameters("cannot sample an unbounded polytope".into())
        })?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0u64;
        let mut x = vec![0.0; self.dimension];
        while out.len() < count {
            if attempts >= SAMPLE_RETRY_BUDGET {
                return Err(Error::EmptyRegion { margin, attempts });
            }
            attempts += 1;
            for (xi, &(lo, hi)) in x.iter_mut().zip(bbox) {
                *xi = lo + (hi - lo) * rng.random::<f64>();
            }
            if self.facets.iter().all(|f| f.eval(&x) >= margin) {
                out.push(x.clone());
            }
        }
        Ok(out)
    }

    fn check_dimension(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_blowup_parameters(n: usize, a: f64, b: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameters("n must be at least 1".into()));
    }
    if !(a.is_finite() && b.is_finite() && a > 0.0 && a < b) {
        return Err(Error::InvalidParameters(format!(
            "need 0 < a < b, got a={a}, b={b}"
        )));
    }
    Ok(())
}

/// Shorthand for [`MomentPolytope::blowup`].
pub fn build_blowup_polytope(n: usize, a: f64, b: f64) -> Result<MomentPolytope> {
    MomentPolytope::blowup(n, a, b)
}
