use std::sync::Arc;

use nalgebra::{Cholesky, Dyn};

use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::proxmaps::conjugate_gradient;
use crate::{Matrix, Vector};

/// Inner systems up to this size (in `min(m, n)`) are factored directly.
pub const SMW_DIRECT_LIMIT: usize = 512;
/// Hard cap on the side of a materialized inner matrix.
const SMW_MAX_DENSE: usize = 4096;
const SMW_CG_TOL: f64 = 1e-12;

enum Inner {
    Factor(Cholesky<f64, Dyn>),
    Iterative,
}

/// Applies `(AAᵀ + κI)⁻¹` through the Woodbury form
/// `κ⁻¹(r − A(κI + AᵀA)⁻¹Aᵀr)`, reusing one factorization of the inner matrix.
pub struct Smw {
    op: Arc<LinearOperator>,
    kappa: f64,
    inner: Inner,
}

impl std::fmt::Debug for Smw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Smw")
            .field("kappa", &self.kappa)
            .field("direct", &matches!(self.inner, Inner::Factor(_)))
            .finish()
    }
}

impl Smw {
    pub fn new(op: Arc<LinearOperator>, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidArgument(format!("ridge kappa must be positive, got {kappa}")));
        }
        let (m, n) = (op.codomain_dim(), op.domain_dim());
        let inner = if m.min(n) <= SMW_DIRECT_LIMIT && n <= SMW_MAX_DENSE {
            let a = op.to_dense();
            let gram = a.tr_mul(&a) + Matrix::identity(n, n) * kappa;
            Inner::Factor(
                Cholesky::new(gram)
                    .ok_or_else(|| Error::Solver("inner Woodbury matrix is not positive definite".into()))?,
            )
        } else {
            Inner::Iterative
        };
        Ok(Smw { op, kappa, inner })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn solve(&self, rhs: &Vector) -> Result<Vector> {
        check_len(self.op.codomain_dim(), rhs.len())?;
        let at_r = self.op.adjoint_apply(rhs)?;
        let z = match &self.inner {
            Inner::Factor(c) => c.solve(&at_r),
            Inner::Iterative => {
                let n = self.op.domain_dim();
                let apply = |v: &Vector| -> Result<Vector> { Ok(self.op.normal_apply(v)? + v * self.kappa) };
                conjugate_gradient(apply, &at_r, Vector::zeros(n), SMW_CG_TOL, 10 * n.max(50))?
            }
        };
        Ok((rhs - self.op.apply(&z)?) / self.kappa)
    }
}

/// `(AAᵀ + κI)⁻¹ rhs` for a single right-hand side.
pub fn smw_solve(op: &Arc<LinearOperator>, kappa: f64, rhs: &Vector) -> Result<Vector> {
    Smw::new(op.clone(), kappa)?.solve(rhs)
}
