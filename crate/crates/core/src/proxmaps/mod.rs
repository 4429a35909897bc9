//! Proximal operators, projections and the subproblem oracles built on them.

mod closed_form;
mod oracles;

use std::fmt::Debug;

use crate::bregman::BregmanKernel;
use crate::error::{Error, Result};
use crate::linops::LinearOperator;
use crate::Vector;

pub use closed_form::{
    entropy_mirror_step, project_box, project_linf_ball, project_simplex, prox_nuclear, singular_values, soft_threshold,
};
pub(crate) use oracles::conjugate_gradient;
pub use oracles::{L1Oracle, LinearOracle, NuclearOracle, ProductOracle, QuadraticOracle};

/// Constraint set of a primal or dual block.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet {
    Free,
    NonNegative,
    Box {
        lo: f64,
        hi: f64,
    },
    Simplex,
    LinfBall {
        radius: f64,
    },
    /// Cartesian product of consecutive blocks with the given lengths.
    Product(Vec<(usize, FeasibleSet)>),
}

impl FeasibleSet {
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        match self {
            FeasibleSet::Free => Ok(v.clone()),
            FeasibleSet::NonNegative => Ok(v.map(|x| x.max(0.0))),
            FeasibleSet::Box { lo, hi } => project_box(v, *lo, *hi),
            FeasibleSet::Simplex => project_simplex(v),
            FeasibleSet::LinfBall { radius } => project_linf_ball(v, *radius),
            FeasibleSet::Product(parts) => {
                let total: usize = parts.iter().map(|(n, _)| n).sum();
                crate::error::check_len(total, v.len())?;
                let mut out = Vector::zeros(v.len());
                let mut at = 0;
                for (n, set) in parts {
                    let piece = set.project(&v.rows(at, *n).into_owned())?;
                    out.rows_mut(at, *n).copy_from(&piece);
                    at += n;
                }
                Ok(out)
            }
        }
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        match self {
            FeasibleSet::Free => true,
            FeasibleSet::NonNegative => v.iter().all(|&x| x >= -tol),
            FeasibleSet::Box { lo, hi } => v.iter().all(|&x| x >= lo - tol && x <= hi + tol),
            FeasibleSet::Simplex => v.iter().all(|&x| x >= -tol) && (v.sum() - 1.0).abs() <= tol,
            FeasibleSet::LinfBall { radius } => v.amax() <= radius + tol,
            FeasibleSet::Product(parts) => {
                let mut at = 0;
                parts.iter().all(|(n, set)| {
                    let ok = at + n <= v.len() && set.contains(&v.rows(at, *n).into_owned(), tol);
                    at += n;
                    ok
                })
            }
        }
    }
}

/// How an oracle reaches its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    ClosedForm,
    InnerIterative { max_iter: usize },
}

/// `argmin_{x ∈ X} h(x) + ⟨linear, x⟩ + weight · B_kernel(x, center)`.
#[derive(Clone, Copy, Debug)]
pub struct Subproblem<'a> {
    pub linear: &'a Vector,
    pub center: &'a Vector,
    pub weight: f64,
    pub kernel: &'a BregmanKernel,
    /// Overrides the oracle's own inner-iteration budget when set.
    pub inner_budget: Option<usize>,
}

/// A function `h` over a feasible set together with a solver for its
/// Bregman-regularized subproblems.
pub trait ProxOracle: Send + Sync + Debug {
    fn label(&self) -> String;

    fn dim(&self) -> usize;

    fn exactness(&self) -> Exactness;

    fn set(&self) -> &FeasibleSet;

    /// `h(x)` without the indicator of the feasible set.
    fn value(&self, x: &Vector) -> f64;

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector>;

    /// `argmin_{x ∈ X} h(x) + (weight/2)‖op·x − target‖²`.
    ///
    /// The default handles only `op = I`, where this is an ordinary prox.
    fn solve_coupled(&self, op: &LinearOperator, target: &Vector, weight: f64) -> Result<Vector> {
        if !op.is_identity() {
            return Err(Error::Unsupported(format!(
                "{} cannot solve a subproblem coupled through a non-identity operator",
                self.label()
            )));
        }
        let zero = Vector::zeros(target.len());
        self.solve(&Subproblem {
            linear: &zero,
            center: target,
            weight,
            kernel: &BregmanKernel::Euclidean,
            inner_budget: None,
        })
    }
}

pub(crate) fn unsupported_kernel(label: &str, kernel: &BregmanKernel) -> Error {
    Error::Unsupported(format!("{label} has no solver for the {} kernel", kernel.name()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_set_projects_blockwise() {
        let set = FeasibleSet::Product(vec![(2, FeasibleSet::Simplex), (1, FeasibleSet::NonNegative)]);
        let p = set.project(&Vector::from_row_slice(&[2.0, 0.0, -1.0])).unwrap();
        assert_eq!(p, Vector::from_row_slice(&[1.0, 0.0, 0.0]));
        assert!(set.contains(&p, 1e-12));
        assert!(!set.contains(&Vector::from_row_slice(&[0.5, 0.6, 0.0]), 1e-12));
    }
}
