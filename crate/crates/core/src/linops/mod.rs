//! Matrix-free linear operators with exact adjoints.
//!
//! Every coupling matrix in the solvers is a [`LinearOperator`]. Operators are
//! immutable after construction and cheap to share behind an [`Arc`].

mod blur;
mod dct;
mod grad;
mod norm;

use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::{Matrix, Vector};

pub use blur::Blur2d;
pub use dct::PartialDct;
pub use grad::Grad2d;
pub use norm::{estimate_norm, NormEstimate, NORM_MAX_ITER, NORM_TOL};

#[derive(Clone, Debug)]
pub enum LinearOperator {
    Dense(Matrix),
    Identity(usize),
    Scaled { factor: f64, inner: Arc<LinearOperator> },
    PartialDct(PartialDct),
    Grad2d(Grad2d),
    Blur2d(Blur2d),
    HStack(HStack),
}

impl LinearOperator {
    pub fn dense(matrix: Matrix) -> Self {
        LinearOperator::Dense(matrix)
    }

    pub fn identity(n: usize) -> Self {
        LinearOperator::Identity(n)
    }

    pub fn scaled(factor: f64, inner: Arc<LinearOperator>) -> Self {
        LinearOperator::Scaled { factor, inner }
    }

    /// Number of columns (length of the input vector).
    pub fn domain_dim(&self) -> usize {
        match self {
            LinearOperator::Dense(m) => m.ncols(),
            LinearOperator::Identity(n) => *n,
            LinearOperator::Scaled { inner, .. } => inner.domain_dim(),
            LinearOperator::PartialDct(op) => op.len(),
            LinearOperator::Grad2d(op) => op.height() * op.width(),
            LinearOperator::Blur2d(op) => op.height() * op.width(),
            LinearOperator::HStack(op) => op.domain_dim(),
        }
    }

    /// Number of rows (length of the output vector).
    pub fn codomain_dim(&self) -> usize {
        match self {
            LinearOperator::Dense(m) => m.nrows(),
            LinearOperator::Identity(n) => *n,
            LinearOperator::Scaled { inner, .. } => inner.codomain_dim(),
            LinearOperator::PartialDct(op) => op.rows().len(),
            LinearOperator::Grad2d(op) => 2 * op.height() * op.width(),
            LinearOperator::Blur2d(op) => op.height() * op.width(),
            LinearOperator::HStack(op) => op.codomain_dim(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, LinearOperator::Identity(_))
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_len(self.domain_dim(), x.len())?;
        Ok(match self {
            LinearOperator::Dense(m) => m * x,
            LinearOperator::Identity(_) => x.clone(),
            LinearOperator::Scaled { factor, inner } => inner.apply(x)? * *factor,
            LinearOperator::PartialDct(op) => op.apply(x),
            LinearOperator::Grad2d(op) => op.apply(x),
            LinearOperator::Blur2d(op) => op.apply(x),
            LinearOperator::HStack(op) => op.apply(x)?,
        })
    }

    pub fn adjoint_apply(&self, y: &Vector) -> Result<Vector> {
        check_len(self.codomain_dim(), y.len())?;
        Ok(match self {
            LinearOperator::Dense(m) => m.tr_mul(y),
            LinearOperator::Identity(_) => y.clone(),
            LinearOperator::Scaled { factor, inner } => inner.adjoint_apply(y)? * *factor,
            LinearOperator::PartialDct(op) => op.adjoint_apply(y),
            LinearOperator::Grad2d(op) => op.adjoint_apply(y),
            LinearOperator::Blur2d(op) => op.adjoint_apply(y),
            LinearOperator::HStack(op) => op.adjoint_apply(y)?,
        })
    }

    /// `AᵀA x`.
    pub fn normal_apply(&self, x: &Vector) -> Result<Vector> {
        match self {
            LinearOperator::Blur2d(op) => {
                check_len(self.domain_dim(), x.len())?;
                Ok(op.normal_apply(x))
            }
            _ => self.adjoint_apply(&self.apply(x)?),
        }
    }

    /// `AAᵀ y`.
    pub fn outer_apply(&self, y: &Vector) -> Result<Vector> {
        self.apply(&self.adjoint_apply(y)?)
    }

    /// Materialize the operator column by column.
    pub fn to_dense(&self) -> Matrix {
        if let LinearOperator::Dense(m) = self {
            return m.clone();
        }
        let n = self.domain_dim();
        let mut out = Matrix::zeros(self.codomain_dim(), n);
        let mut e = Vector::zeros(n);
        for j in 0..n {
            e[j] = 1.0;
            let col = self.apply(&e).expect("unit vector has the domain dimension");
            out.set_column(j, &col);
            e[j] = 0.0;
        }
        out
    }
}

/// Horizontal concatenation `[A₁, A₂, …, A_p]` acting on stacked block vectors.
#[derive(Clone, Debug)]
pub struct HStack {
    blocks: Vec<Arc<LinearOperator>>,
    offsets: Vec<usize>,
    rows: usize,
}

impl HStack {
    pub fn new(blocks: Vec<Arc<LinearOperator>>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::InvalidArgument("hstack needs at least one block".into()))?;
        let rows = first.codomain_dim();
        let mut offsets = Vec::with_capacity(blocks.len() + 1);
        offsets.push(0);
        for b in &blocks {
            check_len(rows, b.codomain_dim())?;
            offsets.push(offsets.last().unwrap() + b.domain_dim());
        }
        Ok(HStack { blocks, offsets, rows })
    }

    pub fn blocks(&self) -> &[Arc<LinearOperator>] {
        &self.blocks
    }

    /// Start offset of each block inside the stacked domain vector, plus the total length.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    fn domain_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn codomain_dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.rows);
        for (i, block) in self.blocks.iter().enumerate() {
            let lo = self.offsets[i];
            let part = x.rows(lo, self.offsets[i + 1] - lo).into_owned();
            out += block.apply(&part)?;
        }
        Ok(out)
    }

    fn adjoint_apply(&self, y: &Vector) -> Result<Vector> {
        let mut out = Vector::zeros(self.domain_dim());
        for (i, block) in self.blocks.iter().enumerate() {
            let lo = self.offsets[i];
            let part = block.adjoint_apply(y)?;
            out.rows_mut(lo, part.len()).copy_from(&part);
        }
        Ok(out)
    }
}

pub fn hstack(blocks: Vec<Arc<LinearOperator>>) -> Result<LinearOperator> {
    Ok(LinearOperator::HStack(HStack::new(blocks)?))
}

/// Random partial orthonormal DCT-II with `m` rows of the `n × n` transform.
pub fn make_partial_dct(n: usize, m: usize, seed: u64) -> Result<LinearOperator> {
    Ok(LinearOperator::PartialDct(PartialDct::random(n, m, seed)?))
}

/// Periodic 2D convolution; the kernel is normalized to unit sum.
pub fn make_blur2d(kernel: &Matrix, height: usize, width: usize) -> Result<LinearOperator> {
    Ok(LinearOperator::Blur2d(Blur2d::new(kernel, height, width)?))
}

/// Forward differences with replicate (Neumann) boundary.
pub fn make_grad2d(height: usize, width: usize) -> Result<LinearOperator> {
    Ok(LinearOperator::Grad2d(Grad2d::new(height, width)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn random_vec(n: usize, seed: u64) -> Vector {
        let mut rng = seeded(seed);
        Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn identity_and_small_dense() {
        let id = LinearOperator::identity(3);
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(id.apply(&x).unwrap(), x);
        assert_eq!(id.adjoint_apply(&x).unwrap(), x);

        let a = LinearOperator::dense(Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]));
        let ax = a.apply(&Vector::from_vec(vec![1.0, 1.0])).unwrap();
        assert_eq!(ax.as_slice(), &[3.0, 7.0]);
        let aty = a.adjoint_apply(&Vector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(aty.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = LinearOperator::dense(Matrix::zeros(2, 3));
        assert!(matches!(a.apply(&Vector::zeros(2)), Err(Error::DimensionMismatch { expected: 3, got: 2 })));
        assert!(a.adjoint_apply(&Vector::zeros(3)).is_err());
    }

    #[test]
    fn hstack_sums_block_products() {
        let a1 = Arc::new(LinearOperator::dense(Matrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64)));
        let a2 = Arc::new(LinearOperator::identity(3));
        let stack = hstack(vec![a1.clone(), a2.clone()]).unwrap();
        assert_eq!(stack.domain_dim(), 5);
        assert_eq!(stack.codomain_dim(), 3);
        let x = random_vec(5, 3);
        let x1 = x.rows(0, 2).into_owned();
        let x2 = x.rows(2, 3).into_owned();
        let expected = a1.apply(&x1).unwrap() + a2.apply(&x2).unwrap();
        assert_eq!(stack.apply(&x).unwrap(), expected);
    }

    #[test]
    fn hstack_rejects_mismatched_rows() {
        let a1 = Arc::new(LinearOperator::identity(3));
        let a2 = Arc::new(LinearOperator::identity(4));
        assert!(hstack(vec![a1, a2]).is_err());
        assert!(hstack(vec![]).is_err());
    }

    #[test]
    fn scaled_operator() {
        let inner = Arc::new(LinearOperator::dense(Matrix::from_row_slice(1, 2, &[1.0, -1.0])));
        let op = LinearOperator::scaled(-2.0, inner);
        let x = Vector::from_vec(vec![3.0, 1.0]);
        assert_eq!(op.apply(&x).unwrap()[0], -4.0);
        let y = Vector::from_vec(vec![1.0]);
        assert_eq!(op.adjoint_apply(&y).unwrap().as_slice(), &[-2.0, 2.0]);
    }

    #[test]
    fn to_dense_round_trips_apply() {
        let op = make_grad2d(3, 4).unwrap();
        let dense = op.to_dense();
        let x = random_vec(12, 9);
        let diff = (&dense * &x - op.apply(&x).unwrap()).amax();
        assert!(diff < 1e-14);
    }
}
