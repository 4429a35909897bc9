use std::sync::Arc;

use crate::error::Result;
use crate::linops::LinearOperator;
use crate::proxmaps::{FeasibleSet, LinearOracle, ProxOracle};
use crate::saddle::SaddleProblem;
use crate::{Matrix, Vector};

/// `min 2x₁ + x₂ s.t. x₁ + x₂ = 1, x ≥ 0` as
/// `min_{x ≥ 0} max_y ⟨(2, 1), x⟩ + ⟨−x₁ − x₂ + 1, y⟩`.
///
/// The unique saddle point is `x = (0, 1)`, `y = 1`; iterations start at the
/// origin.
pub fn toy_lp() -> Result<SaddleProblem> {
    let primal: Arc<dyn ProxOracle> =
        Arc::new(LinearOracle::new(Vector::from_row_slice(&[2.0, 1.0]), FeasibleSet::NonNegative));
    let dual: Arc<dyn ProxOracle> = Arc::new(LinearOracle::indicator(1, FeasibleSet::Free));
    let op = Arc::new(LinearOperator::dense(Matrix::from_row_slice(1, 2, &[-1.0, -1.0])));
    SaddleProblem::new(primal, dual, op)?
        .with_shift(Vector::from_element(1, -1.0))?
        .with_solution(Vector::from_row_slice(&[0.0, 1.0]), Vector::from_element(1, 1.0))
}

/// Distance of `(x, y)` to the toy saddle point.
pub fn toy_distance(x: &Vector, y: &Vector) -> f64 {
    ((x[0]).powi(2) + (x[1] - 1.0).powi(2) + (y[0] - 1.0).powi(2)).sqrt()
}
