use rand::Rng;

use crate::linops::LinearOperator;
use crate::rng::seeded;
use crate::Vector;

pub const NORM_MAX_ITER: usize = 500;
pub const NORM_TOL: f64 = 1e-10;

/// Result of a spectral norm estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    /// Estimated `‖A‖₂`.
    pub value: f64,
    pub iterations: usize,
    /// `‖AᵀA v − σ² v‖` at the final unit vector `v`.
    pub residual: f64,
}

fn random_unit(n: usize, rng: &mut impl Rng) -> Vector {
    let v = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let nv = v.norm();
    if nv > 0.0 {
        v / nv
    } else {
        Vector::from_element(n, 1.0 / (n as f64).sqrt())
    }
}

/// Power iteration on `AᵀA` from a seeded random start.
///
/// Stops when the Rayleigh quotient changes by less than `tol` relative to its
/// value. A start that looks orthogonal to the range is redrawn once; if the
/// second draw also vanishes the operator is reported as zero.
pub fn estimate_norm(op: &LinearOperator, max_iter: usize, tol: f64, seed: u64) -> NormEstimate {
    let n = op.domain_dim();
    if n == 0 || op.codomain_dim() == 0 {
        return NormEstimate { value: 0.0, iterations: 0, residual: 0.0 };
    }
    let mut rng = seeded(seed);
    let normal = |v: &Vector| op.normal_apply(v).expect("dimension fixed by construction");

    let mut v = random_unit(n, &mut rng);
    let mut w = normal(&v);
    let mut lambda = v.dot(&w);
    if lambda < 1e-14 {
        v = random_unit(n, &mut rng);
        w = normal(&v);
        lambda = v.dot(&w);
        if lambda < 1e-14 {
            return NormEstimate { value: 0.0, iterations: 2, residual: 0.0 };
        }
    }
    let mut iterations = 1;
    while iterations < max_iter.max(1) {
        let nw = w.norm();
        if nw == 0.0 {
            break;
        }
        v = &w / nw;
        w = normal(&v);
        let next = v.dot(&w);
        iterations += 1;
        let change = (next - lambda).abs();
        lambda = next;
        if change <= tol * lambda.abs() {
            break;
        }
    }
    let residual = (&w - &v * lambda).norm();
    NormEstimate { value: lambda.max(0.0).sqrt(), iterations, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    #[test]
    fn matches_svd_on_dense_matrices() {
        let mut rng = seeded(21);
        for (m, n) in [(3, 5), (10, 4), (20, 20)] {
            let a = Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            let exact = a.clone().svd(false, false).singular_values.max();
            let est = estimate_norm(&LinearOperator::dense(a), 5000, 1e-14, 0);
            assert!((est.value - exact).abs() <= 1e-6 * exact, "{m}x{n}");
        }
    }

    #[test]
    fn zero_operator_reports_zero() {
        let est = estimate_norm(&LinearOperator::dense(Matrix::zeros(3, 4)), 100, 1e-10, 0);
        assert_eq!(est.value, 0.0);
        assert_eq!(est.residual, 0.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let op = LinearOperator::dense(Matrix::from_fn(6, 6, |i, j| (i * 7 + j) as f64 % 5.0));
        assert_eq!(estimate_norm(&op, 50, 1e-10, 3), estimate_norm(&op, 50, 1e-10, 3));
    }
}
