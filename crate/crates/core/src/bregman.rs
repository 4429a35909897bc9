//! Bregman kernels and distances.
//!
//! `B(x, y) = φ(x) − φ(y) − ⟨∇φ(y), x − y⟩` for three kernel families:
//! Euclidean `½‖x‖²`, quadratic `½‖x‖²_M` and the Boltzmann-Shannon entropy
//! `Σ xᵢ log xᵢ`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{Cholesky, Dyn, SymmetricEigen};

use crate::error::{check_len, Error, Result};
use crate::linops::{estimate_norm, LinearOperator, NORM_MAX_ITER, NORM_TOL};
use crate::{Matrix, Vector};

/// Largest side for which a Gram metric is materialized for exact eigenvalues.
const MATERIALIZE_LIMIT: usize = 512;

/// Which Gram product a matrix-free metric uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramSide {
    /// `GᵀG`, acting on the domain of `G`.
    Inner,
    /// `GGᵀ`, acting on the codomain of `G`.
    Outer,
}

/// The matrix `M` of a quadratic kernel.
#[derive(Clone, Debug)]
pub enum Metric {
    /// Explicit symmetric matrix.
    Matrix(Matrix),
    /// `weight · GᵀG + ridge · I` (or `GGᵀ`), kept matrix-free.
    /// `weight` may be negative, which is how `τI − BᵀB` style metrics are built.
    Gram { op: Arc<LinearOperator>, side: GramSide, weight: f64, ridge: f64 },
}

impl Metric {
    pub fn dim(&self) -> usize {
        match self {
            Metric::Matrix(m) => m.nrows(),
            Metric::Gram { op, side: GramSide::Inner, .. } => op.domain_dim(),
            Metric::Gram { op, side: GramSide::Outer, .. } => op.codomain_dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_len(self.dim(), x.len())?;
        match self {
            Metric::Matrix(m) => Ok(m * x),
            Metric::Gram { op, side, weight, ridge } => {
                let g = match side {
                    GramSide::Inner => op.normal_apply(x)?,
                    GramSide::Outer => op.outer_apply(x)?,
                };
                Ok(g * *weight + x * *ridge)
            }
        }
    }

    fn materialize(&self) -> Matrix {
        match self {
            Metric::Matrix(m) => m.clone(),
            Metric::Gram { op, side, weight, ridge } => {
                let g = op.to_dense();
                let gram = match side {
                    GramSide::Inner => g.tr_mul(&g),
                    GramSide::Outer => &g * g.transpose(),
                };
                gram * *weight + Matrix::identity(self.dim(), self.dim()) * *ridge
            }
        }
    }

    /// `(λ_min, λ_max)`, exact when the metric is small enough to materialize,
    /// otherwise bounds from a norm estimate of the Gram factor.
    fn spectrum_bounds(&self) -> (f64, f64) {
        match self {
            Metric::Matrix(m) => extreme_eigenvalues(m.clone()),
            Metric::Gram { op, side, weight, ridge } => {
                let (m, n) = (op.codomain_dim(), op.domain_dim());
                let small = m.min(n);
                let dense_like = matches!(**op, LinearOperator::Dense(_) | LinearOperator::Identity(_));
                let (gmin, gmax) = if dense_like && small <= MATERIALIZE_LIMIT {
                    let g = op.to_dense();
                    let gram = if m <= n { &g * g.transpose() } else { g.tr_mul(&g) };
                    let (lo, hi) = extreme_eigenvalues(gram);
                    let side_dim = if *side == GramSide::Inner { n } else { m };
                    (if side_dim > small { 0.0 } else { lo.max(0.0) }, hi)
                } else {
                    let s = estimate_norm(op, NORM_MAX_ITER, NORM_TOL, 0).value;
                    (0.0, s * s)
                };
                if *weight >= 0.0 {
                    (ridge + weight * gmin, ridge + weight * gmax)
                } else {
                    (ridge + weight * gmax, ridge + weight * gmin)
                }
            }
        }
    }
}

fn extreme_eigenvalues(m: Matrix) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 0.0);
    }
    let eig = SymmetricEigen::new(m).eigenvalues;
    (eig.min(), eig.max())
}

/// Quadratic kernel state with lazily computed spectrum and factorization.
pub struct QuadraticKernel {
    metric: Metric,
    bounds: OnceLock<(f64, f64)>,
    factor: OnceLock<std::result::Result<Cholesky<f64, Dyn>, String>>,
}

impl fmt::Debug for QuadraticKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticKernel").field("metric", &self.metric).finish()
    }
}

impl QuadraticKernel {
    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn bounds(&self) -> (f64, f64) {
        *self.bounds.get_or_init(|| self.metric.spectrum_bounds())
    }

    pub(crate) fn materialize(&self) -> Matrix {
        self.metric.materialize()
    }

    /// `M⁻¹ r` through a cached Cholesky factor of the materialized metric.
    pub fn solve(&self, r: &Vector) -> Result<Vector> {
        check_len(self.metric.dim(), r.len())?;
        let factor = self.factor.get_or_init(|| {
            Cholesky::new(self.metric.materialize()).ok_or_else(|| "kernel metric is not positive definite".to_string())
        });
        match factor {
            Ok(c) => Ok(c.solve(r)),
            Err(msg) => Err(Error::Solver(msg.clone())),
        }
    }
}

#[derive(Clone, Debug)]
pub enum BregmanKernel {
    Euclidean,
    Quadratic(Arc<QuadraticKernel>),
    Entropy,
}

impl BregmanKernel {
    pub fn quadratic(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument("kernel matrix must be square".into()));
        }
        let scale = m.amax().max(1.0);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidArgument("kernel matrix must be symmetric".into()));
        }
        Ok(Self::from_metric(Metric::Matrix(m)))
    }

    /// `½‖x‖²_M` with `M = weight · GᵀG + ridge · I` (or `GGᵀ` for [`GramSide::Outer`]).
    pub fn gram(op: Arc<LinearOperator>, side: GramSide, weight: f64, ridge: f64) -> Result<Self> {
        if !weight.is_finite() || !ridge.is_finite() || ridge < 0.0 {
            return Err(Error::InvalidArgument("gram metric needs finite weight and ridge >= 0".into()));
        }
        Ok(Self::from_metric(Metric::Gram { op, side, weight, ridge }))
    }

    fn from_metric(metric: Metric) -> Self {
        BregmanKernel::Quadratic(Arc::new(QuadraticKernel { metric, bounds: OnceLock::new(), factor: OnceLock::new() }))
    }

    pub fn name(&self) -> &'static str {
        match self {
            BregmanKernel::Euclidean => "euclidean",
            BregmanKernel::Quadratic(_) => "quadratic",
            BregmanKernel::Entropy => "entropy",
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, BregmanKernel::Euclidean)
    }

    /// Strong-convexity modulus ϱ (entropy: 1, valid on the simplex).
    pub fn modulus(&self) -> f64 {
        match self {
            BregmanKernel::Euclidean | BregmanKernel::Entropy => 1.0,
            BregmanKernel::Quadratic(q) => q.bounds().0,
        }
    }

    /// Gradient Lipschitz constant; `None` when unbounded.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            BregmanKernel::Euclidean => Some(1.0),
            BregmanKernel::Quadratic(q) => Some(q.bounds().1),
            BregmanKernel::Entropy => None,
        }
    }

    fn check_entropy_point(y: &Vector, strict: bool) -> Result<()> {
        let bad = y.iter().any(|&v| if strict { v.is_nan() || v <= 0.0 } else { v.is_nan() || v < 0.0 });
        if bad {
            let need = if strict { "positive" } else { "nonnegative" };
            return Err(Error::Domain(format!("entropy kernel needs {need} entries")));
        }
        Ok(())
    }

    /// Kernel value `φ(x)`.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        match self {
            BregmanKernel::Euclidean => Ok(0.5 * x.norm_squared()),
            BregmanKernel::Quadratic(q) => Ok(0.5 * x.dot(&q.metric.apply(x)?)),
            BregmanKernel::Entropy => {
                Self::check_entropy_point(x, false)?;
                Ok(x.iter().map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 }).sum())
            }
        }
    }

    pub fn gradient(&self, y: &Vector) -> Result<Vector> {
        match self {
            BregmanKernel::Euclidean => Ok(y.clone()),
            BregmanKernel::Quadratic(q) => q.metric.apply(y),
            BregmanKernel::Entropy => {
                Self::check_entropy_point(y, true)?;
                Ok(y.map(|v| 1.0 + v.ln()))
            }
        }
    }

    pub fn distance(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_len(y.len(), x.len())?;
        match self {
            BregmanKernel::Euclidean => Ok(0.5 * (x - y).norm_squared()),
            BregmanKernel::Quadratic(q) => {
                let d = x - y;
                Ok(0.5 * d.dot(&q.metric.apply(&d)?))
            }
            BregmanKernel::Entropy => {
                Self::check_entropy_point(x, false)?;
                Self::check_entropy_point(y, true)?;
                Ok(x.iter().zip(y.iter()).map(|(&a, &b)| if a > 0.0 { a * (a / b).ln() + b - a } else { b }).sum())
            }
        }
    }

    /// Defect of the three-point identity
    /// `⟨∇φ(b) − ∇φ(a), c − a⟩ = B(c, a) + B(a, b) − B(c, b)`; zero up to rounding.
    pub fn three_point_gap(&self, a: &Vector, b: &Vector, c: &Vector) -> Result<f64> {
        let lhs = (self.gradient(b)? - self.gradient(a)?).dot(&(c - a));
        let rhs = self.distance(c, a)? + self.distance(a, b)? - self.distance(c, b)?;
        Ok(lhs - rhs)
    }

    /// `M⁻¹ r` (identity for the Euclidean kernel).
    pub fn solve_metric(&self, r: &Vector) -> Result<Vector> {
        match self {
            BregmanKernel::Euclidean => Ok(r.clone()),
            BregmanKernel::Quadratic(q) => q.solve(r),
            BregmanKernel::Entropy => Err(Error::Unsupported("entropy kernel has no metric".into())),
        }
    }
}
