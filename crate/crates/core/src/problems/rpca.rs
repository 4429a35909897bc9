use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcp::LcpProblem;
use crate::linops::LinearOperator;
use crate::proxmaps::{singular_values, L1Oracle, NuclearOracle, ProxOracle};
use crate::rng::seeded;
use crate::saddle::{run, Method, RunReport, SolverConfig, Termination};
use crate::{Matrix, Vector};

/// Observation `H = X* + Z*` with `X*` low rank and `Z*` sparse.
#[derive(Clone, Debug, PartialEq)]
pub struct RpcaInstance {
    pub n: usize,
    pub r: usize,
    pub lambda: f64,
    pub seed: u64,
    pub x_star: Matrix,
    pub z_star: Matrix,
    pub h: Matrix,
}

/// `X* = UV` with standard normal `U` (n×r) and `V` (r×n); `Z*` has
/// `round(0.1·n²)` entries uniform on `[−50, 50]` at uniformly random
/// positions. `λ` defaults to `1/√n`.
pub fn gen_rpca(n: usize, r: usize, seed: u64) -> Result<RpcaInstance> {
    if n == 0 || r == 0 || r > n {
        return Err(Error::InvalidArgument(format!("need 0 < r <= n, got n={n} r={r}")));
    }
    let mut rng = seeded(seed);
    let u = Matrix::from_fn(n, r, |_, _| rng.sample::<f64, _>(StandardNormal));
    let v = Matrix::from_fn(r, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x_star = u * v;
    let support = (0.1 * (n * n) as f64).round() as usize;
    let mut z_star = Matrix::zeros(n, n);
    for idx in sample(&mut rng, n * n, support) {
        z_star[idx] = rng.random_range(-50.0..=50.0);
    }
    let h = &x_star + &z_star;
    Ok(RpcaInstance { n, r, lambda: 1.0 / (n as f64).sqrt(), seed, x_star, z_star, h })
}

impl RpcaInstance {
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }
}

/// `min ‖X‖_* + λ‖Z‖₁ s.t. X + Z = H` as two identity-coupled blocks over
/// column-major vectorizations.
pub fn build_rpca(instance: &RpcaInstance) -> Result<LcpProblem> {
    let n = instance.n;
    let nuclear: Arc<dyn ProxOracle> = Arc::new(NuclearOracle::new(n, n, 1.0));
    let sparse: Arc<dyn ProxOracle> = Arc::new(L1Oracle::new(n * n, instance.lambda));
    let id = Arc::new(LinearOperator::identity(n * n));
    LcpProblem::new(vec![(nuclear, id.clone()), (sparse, id)], Vector::from_column_slice(instance.h.as_slice()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RpcaMetrics {
    pub rank: usize,
    pub nnz: usize,
    pub rerr: f64,
}

/// Rank counts singular values above `1e−6·σ_max`, nnz counts entries above
/// `1e−8·max|entry|`, and `Rerr = ‖X̂ + Ẑ − X* − Z*‖_F / ‖X* + Z*‖_F`.
pub fn rpca_metrics(x_hat: &Matrix, z_hat: &Matrix, instance: &RpcaInstance) -> Result<RpcaMetrics> {
    let shape = instance.h.shape();
    if x_hat.shape() != shape || z_hat.shape() != shape {
        return Err(Error::DimensionMismatch { expected: shape.0 * shape.1, got: x_hat.len().min(z_hat.len()) });
    }
    let sv = singular_values(x_hat)?;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > 1e-6 * smax).count();
    let zmax = z_hat.amax();
    let nnz = z_hat.iter().filter(|v| v.abs() > 1e-8 * zmax).count();
    let truth = &instance.x_star + &instance.z_star;
    let den = truth.norm();
    let rerr = if den > 0.0 { (x_hat + z_hat - &truth).norm() / den } else { (x_hat + z_hat).norm() };
    Ok(RpcaMetrics { rank, nnz, rerr })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RpcaMethod {
    /// `(γ, μ) = (70.7107, 0.0283)`.
    Fopda,
    /// `(γ, μ) = (0.77·70.7107, 0.0283)`.
    Spida,
}

impl RpcaMethod {
    pub fn label(&self) -> &'static str {
        match self {
            RpcaMethod::Fopda => "fopda",
            RpcaMethod::Spida => "spida",
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        match self {
            RpcaMethod::Fopda => SolverConfig::new(Method::Fopda { tau: 1.0 }, 70.7107, 0.0283),
            RpcaMethod::Spida => SolverConfig::new(Method::Spida, 0.77 * 70.7107, 0.0283),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RpcaOutcome {
    pub method: RpcaMethod,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub termination: Termination,
    pub x_hat: Matrix,
    pub z_hat: Matrix,
    pub metrics: RpcaMetrics,
    /// `‖X̂ + Ẑ − H‖_F / ‖H‖_F`.
    pub feasibility: f64,
}

/// Runs the saddle form with the default parameters from the zero start.
pub fn solve_rpca(instance: &RpcaInstance, method: RpcaMethod, eps: f64, max_iter: usize) -> Result<RpcaOutcome> {
    let mut cfg = method.solver_config().with_tolerance(eps, max_iter);
    cfg.seed = instance.seed;
    let report = run(&build_rpca(instance)?.to_saddle()?, &cfg)?;
    rpca_outcome(instance, method, &report)
}

/// Splits a finished run into `(X̂, Ẑ)` and scores it.
pub fn rpca_outcome(instance: &RpcaInstance, method: RpcaMethod, report: &RunReport) -> Result<RpcaOutcome> {
    let n = instance.n;
    let x = report.x();
    let x_hat = Matrix::from_column_slice(n, n, &x.as_slice()[..n * n]);
    let z_hat = Matrix::from_column_slice(n, n, &x.as_slice()[n * n..]);
    let metrics = rpca_metrics(&x_hat, &z_hat, instance)?;
    let hn = instance.h.norm();
    let feasibility = (&x_hat + &z_hat - &instance.h).norm() / if hn > 0.0 { hn } else { 1.0 };
    Ok(RpcaOutcome {
        method,
        iterations: report.iterations,
        wall_time_s: report.wall_time_s,
        termination: report.termination,
        x_hat,
        z_hat,
        metrics,
        feasibility,
    })
}
