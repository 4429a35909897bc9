use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::Vector;

/// Rows of the orthonormal `n × n` DCT-II matrix, applied through a length-`2n` FFT.
#[derive(Clone)]
pub struct PartialDct {
    n: usize,
    rows: Vec<usize>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PartialDct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialDct").field("n", &self.n).field("rows", &self.rows).finish()
    }
}

impl PartialDct {
    /// `m` distinct rows drawn uniformly without replacement, kept in ascending order.
    pub fn random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidArgument(format!("partial DCT needs 1 <= m <= n, got m = {m}, n = {n}")));
        }
        let mut rng = seeded(seed);
        let mut rows = sample(&mut rng, n, m).into_vec();
        rows.sort_unstable();
        Self::with_rows(n, rows)
    }

    pub fn with_rows(n: usize, rows: Vec<usize>) -> Result<Self> {
        if n == 0 || rows.iter().any(|&r| r >= n) {
            return Err(Error::InvalidArgument("DCT row index out of range".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(PartialDct { n, rows, forward: planner.plan_fft_forward(2 * n), inverse: planner.plan_fft_inverse(2 * n) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    fn scale(&self, k: usize) -> f64 {
        if k == 0 {
            (1.0 / self.n as f64).sqrt()
        } else {
            (2.0 / self.n as f64).sqrt()
        }
    }

    /// Full orthonormal DCT-II.
    fn dct(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut buf: Vec<Complex64> = x.iter().chain(x.iter().rev()).map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        (0..n)
            .map(|k| {
                let twiddle = Complex64::from_polar(1.0, -PI * k as f64 / (2.0 * n as f64));
                self.scale(k) * 0.5 * (twiddle * buf[k]).re
            })
            .collect()
    }

    /// Inverse transform (DCT-III with matching normalization).
    fn idct(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (k, &c) in coeffs.iter().enumerate() {
            let twiddle = Complex64::from_polar(1.0, PI * k as f64 / (2.0 * n as f64));
            buf[k] = twiddle * (self.scale(k) * c);
        }
        self.inverse.process(&mut buf);
        buf[..n].iter().map(|c| c.re).collect()
    }

    pub(super) fn apply(&self, x: &Vector) -> Vector {
        let full = self.dct(x.as_slice());
        Vector::from_iterator(self.rows.len(), self.rows.iter().map(|&r| full[r]))
    }

    pub(super) fn adjoint_apply(&self, y: &Vector) -> Vector {
        let mut coeffs = vec![0.0; self.n];
        for (&r, &v) in self.rows.iter().zip(y.iter()) {
            coeffs[r] = v;
        }
        Vector::from_vec(self.idct(&coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{estimate_norm, LinearOperator};
    use rand::Rng;

    #[test]
    fn materialized_rows_match_cosine_formula() {
        let op = PartialDct::random(8, 3, 17).unwrap();
        let dense = LinearOperator::PartialDct(op.clone()).to_dense();
        for (i, &k) in op.rows().iter().enumerate() {
            for j in 0..8 {
                let s = if k == 0 { (1.0f64 / 8.0).sqrt() } else { (2.0f64 / 8.0).sqrt() };
                let expected = s * (PI * (2 * j + 1) as f64 * k as f64 / 16.0).cos();
                assert!((dense[(i, j)] - expected).abs() < 1e-12, "row {k} col {j}");
            }
        }
    }

    #[test]
    fn full_transform_is_orthonormal() {
        let op = LinearOperator::PartialDct(PartialDct::random(37, 37, 1).unwrap());
        let mut rng = seeded(4);
        let x = Vector::from_fn(37, |_, _| rng.random_range(-1.0..1.0));
        let ax = op.apply(&x).unwrap();
        assert!((ax.norm() - x.norm()).abs() < 1e-10);
        let back = op.adjoint_apply(&ax).unwrap();
        assert!((back - x).amax() < 1e-12);
    }

    #[test]
    fn adjoint_matches_inner_products() {
        let op = LinearOperator::PartialDct(PartialDct::random(50, 20, 2).unwrap());
        let mut rng = seeded(5);
        for _ in 0..20 {
            let x = Vector::from_fn(50, |_, _| rng.random_range(-1.0..1.0));
            let y = Vector::from_fn(20, |_, _| rng.random_range(-1.0..1.0));
            let lhs = op.apply(&x).unwrap().dot(&y);
            let rhs = x.dot(&op.adjoint_apply(&y).unwrap());
            assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn unit_norm_for_any_row_count() {
        for m in [1, 5, 24] {
            let op = LinearOperator::PartialDct(PartialDct::random(24, m, m as u64).unwrap());
            let est = estimate_norm(&op, 500, 1e-12, 0);
            assert!((est.value - 1.0).abs() < 1e-6, "m = {m}: {}", est.value);
        }
    }

    #[test]
    fn rejects_too_many_rows() {
        assert!(PartialDct::random(4, 5, 0).is_err());
        assert!(PartialDct::random(4, 0, 0).is_err());
    }
}
