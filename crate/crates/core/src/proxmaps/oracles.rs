use std::sync::Arc;

use nalgebra::{Cholesky, LU};

use super::{
    entropy_mirror_step, prox_nuclear, soft_threshold, unsupported_kernel, Exactness, FeasibleSet, ProxOracle,
    Subproblem,
};
use crate::bregman::BregmanKernel;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::{Matrix, Vector};

fn check_sub(dim: usize, sub: &Subproblem<'_>) -> Result<()> {
    check_len(dim, sub.linear.len())?;
    check_len(dim, sub.center.len())?;
    if !(sub.weight > 0.0) || !sub.weight.is_finite() {
        return Err(Error::InvalidArgument(format!("prox weight must be positive, got {}", sub.weight)));
    }
    Ok(())
}

/// `h(x) = ⟨cost, x⟩` restricted to a feasible set. With zero cost this is the
/// plain indicator function, which covers projections and matrix-game blocks.
#[derive(Clone, Debug)]
pub struct LinearOracle {
    cost: Vector,
    set: FeasibleSet,
}

impl LinearOracle {
    pub fn new(cost: Vector, set: FeasibleSet) -> Self {
        LinearOracle { cost, set }
    }

    pub fn indicator(dim: usize, set: FeasibleSet) -> Self {
        Self::new(Vector::zeros(dim), set)
    }

    pub fn cost(&self) -> &Vector {
        &self.cost
    }
}

impl ProxOracle for LinearOracle {
    fn label(&self) -> String {
        format!("linear over {:?}", self.set)
    }

    fn dim(&self) -> usize {
        self.cost.len()
    }

    fn exactness(&self) -> Exactness {
        Exactness::ClosedForm
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }

    fn value(&self, x: &Vector) -> f64 {
        self.cost.dot(x)
    }

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector> {
        check_sub(self.dim(), sub)?;
        let q = sub.linear + &self.cost;
        let z = sub.center;
        let w = sub.weight;
        match (sub.kernel, &self.set) {
            (BregmanKernel::Euclidean, set) => set.project(&(z - q / w)),
            (BregmanKernel::Quadratic(_), FeasibleSet::Free) => Ok(z - sub.kernel.solve_metric(&q)? / w),
            (BregmanKernel::Entropy, FeasibleSet::Simplex) => entropy_mirror_step(z, &(-q), w),
            (BregmanKernel::Entropy, FeasibleSet::NonNegative) => {
                if z.iter().any(|&v| v <= 0.0) {
                    return Err(Error::Domain("entropy step needs a strictly positive center".into()));
                }
                Ok(z.zip_map(&q, |zi, qi| zi * (-qi / w).exp()))
            }
            (kernel, _) => Err(unsupported_kernel(&self.label(), kernel)),
        }
    }
}

/// `h(x) = scale · ‖x‖₁` on all of ℝⁿ.
#[derive(Clone, Debug)]
pub struct L1Oracle {
    dim: usize,
    scale: f64,
    set: FeasibleSet,
}

impl L1Oracle {
    pub fn new(dim: usize, scale: f64) -> Self {
        L1Oracle { dim, scale, set: FeasibleSet::Free }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl ProxOracle for L1Oracle {
    fn label(&self) -> String {
        format!("{}·l1", self.scale)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn exactness(&self) -> Exactness {
        Exactness::ClosedForm
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }

    fn value(&self, x: &Vector) -> f64 {
        self.scale * x.lp_norm(1)
    }

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector> {
        check_sub(self.dim, sub)?;
        match sub.kernel {
            BregmanKernel::Euclidean => {
                Ok(soft_threshold(&(sub.center - sub.linear / sub.weight), self.scale / sub.weight))
            }
            kernel => Err(unsupported_kernel(&self.label(), kernel)),
        }
    }
}

/// `h(X) = scale · ‖X‖_*` for a `rows × cols` matrix stored column-major.
#[derive(Clone, Debug)]
pub struct NuclearOracle {
    rows: usize,
    cols: usize,
    scale: f64,
    set: FeasibleSet,
}

impl NuclearOracle {
    pub fn new(rows: usize, cols: usize, scale: f64) -> Self {
        NuclearOracle { rows, cols, scale, set: FeasibleSet::Free }
    }

    fn reshape(&self, x: &Vector) -> Matrix {
        Matrix::from_column_slice(self.rows, self.cols, x.as_slice())
    }
}

impl ProxOracle for NuclearOracle {
    fn label(&self) -> String {
        format!("{}·nuclear ({}x{})", self.scale, self.rows, self.cols)
    }

    fn dim(&self) -> usize {
        self.rows * self.cols
    }

    fn exactness(&self) -> Exactness {
        Exactness::ClosedForm
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }

    fn value(&self, x: &Vector) -> f64 {
        super::singular_values(&self.reshape(x)).map(|s| self.scale * s.iter().sum::<f64>()).unwrap_or(f64::NAN)
    }

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector> {
        check_sub(self.dim(), sub)?;
        match sub.kernel {
            BregmanKernel::Euclidean => {
                let v = self.reshape(&(sub.center - sub.linear / sub.weight));
                let out = prox_nuclear(&v, self.scale / sub.weight)?;
                Ok(Vector::from_column_slice(out.as_slice()))
            }
            kernel => Err(unsupported_kernel(&self.label(), kernel)),
        }
    }
}

/// `h(x) = ½xᵀQx + ⟨lin, x⟩` on ℝⁿ with `Q` symmetric positive semidefinite.
///
/// Proximal subproblems go through a dense factorization; the coupled
/// subproblem used by the augmented Lagrangian method goes through conjugate
/// gradients on the normal operator.
#[derive(Clone, Debug)]
pub struct QuadraticOracle {
    q: Matrix,
    lin: Vector,
    set: FeasibleSet,
}

pub(crate) const CG_TOL: f64 = 1e-14;

impl QuadraticOracle {
    pub fn new(q: Matrix, lin: Vector) -> Result<Self> {
        if !q.is_square() || q.nrows() != lin.len() {
            return Err(Error::InvalidArgument("quadratic term must be square and match the linear term".into()));
        }
        Ok(QuadraticOracle { q, lin, set: FeasibleSet::Free })
    }

    pub fn hessian(&self) -> &Matrix {
        &self.q
    }

    pub fn linear_term(&self) -> &Vector {
        &self.lin
    }

    fn dense_solve(system: Matrix, rhs: &Vector) -> Result<Vector> {
        if let Some(c) = Cholesky::new(system.clone()) {
            return Ok(c.solve(rhs));
        }
        LU::new(system).solve(rhs).ok_or_else(|| Error::Solver("singular quadratic subproblem".into()))
    }
}

/// Conjugate gradients for a symmetric positive definite operator.
pub(crate) fn conjugate_gradient(
    apply: impl Fn(&Vector) -> Result<Vector>,
    rhs: &Vector,
    x0: Vector,
    tol: f64,
    max_iter: usize,
) -> Result<Vector> {
    let mut x = x0;
    let mut r = rhs - apply(&x)?;
    let target = tol * rhs.norm().max(f64::MIN_POSITIVE);
    let mut rr = r.norm_squared();
    if rr.sqrt() <= target {
        return Ok(x);
    }
    let mut p = r.clone();
    for _ in 0..max_iter {
        let ap = apply(&p)?;
        let curv = p.dot(&ap);
        if !(curv > 0.0) {
            return Err(Error::Solver("conjugate gradient met nonpositive curvature".into()));
        }
        let alpha = rr / curv;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let next = r.norm_squared();
        if next.sqrt() <= target {
            return Ok(x);
        }
        p = &r + &p * (next / rr);
        rr = next;
    }
    Err(Error::Solver(format!("conjugate gradient did not reach relative residual {tol:e} in {max_iter} iterations")))
}

impl ProxOracle for QuadraticOracle {
    fn label(&self) -> String {
        format!("quadratic (n = {})", self.lin.len())
    }

    fn dim(&self) -> usize {
        self.lin.len()
    }

    fn exactness(&self) -> Exactness {
        Exactness::ClosedForm
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }

    fn value(&self, x: &Vector) -> f64 {
        0.5 * x.dot(&(&self.q * x)) + self.lin.dot(x)
    }

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector> {
        check_sub(self.dim(), sub)?;
        let n = self.dim();
        let w = sub.weight;
        match sub.kernel {
            BregmanKernel::Euclidean => {
                let system = &self.q + Matrix::identity(n, n) * w;
                let rhs = sub.center * w - sub.linear - &self.lin;
                Self::dense_solve(system, &rhs)
            }
            BregmanKernel::Quadratic(k) => {
                let m = k.materialize();
                let rhs = (&m * sub.center) * w - sub.linear - &self.lin;
                Self::dense_solve(&self.q + m * w, &rhs)
            }
            kernel => Err(unsupported_kernel(&self.label(), kernel)),
        }
    }

    fn solve_coupled(&self, op: &LinearOperator, target: &Vector, weight: f64) -> Result<Vector> {
        check_len(op.domain_dim(), self.dim())?;
        let rhs = op.adjoint_apply(target)? * weight - &self.lin;
        let apply = |x: &Vector| -> Result<Vector> { Ok(&self.q * x + op.normal_apply(x)? * weight) };
        conjugate_gradient(apply, &rhs, Vector::zeros(self.dim()), CG_TOL, 20 * self.dim().max(10))
    }
}

/// Separable sum of independent oracles on consecutive coordinate blocks.
#[derive(Clone, Debug)]
pub struct ProductOracle {
    blocks: Vec<Arc<dyn ProxOracle>>,
    offsets: Vec<usize>,
    set: FeasibleSet,
}

impl ProductOracle {
    pub fn new(blocks: Vec<Arc<dyn ProxOracle>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("product oracle needs at least one block".into()));
        }
        let mut offsets = vec![0];
        for b in &blocks {
            offsets.push(offsets.last().unwrap() + b.dim());
        }
        let sets: Vec<&FeasibleSet> = blocks.iter().map(|b| b.set()).collect();
        let set = if sets.iter().all(|s| **s == FeasibleSet::Free) {
            FeasibleSet::Free
        } else {
            FeasibleSet::Product(blocks.iter().map(|b| (b.dim(), b.set().clone())).collect())
        };
        Ok(ProductOracle { blocks, offsets, set })
    }

    pub fn blocks(&self) -> &[Arc<dyn ProxOracle>] {
        &self.blocks
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

impl ProxOracle for ProductOracle {
    fn label(&self) -> String {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.label()).collect();
        format!("product[{}]", parts.join(", "))
    }

    fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn exactness(&self) -> Exactness {
        self.blocks
            .iter()
            .map(|b| b.exactness())
            .find(|e| matches!(e, Exactness::InnerIterative { .. }))
            .unwrap_or(Exactness::ClosedForm)
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }

    fn value(&self, x: &Vector) -> f64 {
        self.blocks.iter().enumerate().map(|(i, b)| b.value(&x.rows(self.offsets[i], b.dim()).into_owned())).sum()
    }

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector> {
        check_sub(self.dim(), sub)?;
        if matches!(sub.kernel, BregmanKernel::Quadratic(_)) {
            return Err(unsupported_kernel(&self.label(), sub.kernel));
        }
        let mut out = Vector::zeros(self.dim());
        for (i, b) in self.blocks.iter().enumerate() {
            let (at, n) = (self.offsets[i], b.dim());
            let linear = sub.linear.rows(at, n).into_owned();
            let center = sub.center.rows(at, n).into_owned();
            let piece = b.solve(&Subproblem { linear: &linear, center: &center, ..*sub })?;
            out.rows_mut(at, n).copy_from(&piece);
        }
        Ok(out)
    }
}
