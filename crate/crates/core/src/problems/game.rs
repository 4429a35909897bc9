use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bregman::BregmanKernel;
use crate::error::{Error, Result};
use crate::linops::{estimate_norm, LinearOperator, NORM_MAX_ITER, NORM_TOL};
use crate::proxmaps::{FeasibleSet, LinearOracle, ProxOracle};
use crate::rng::seeded;
use crate::saddle::{Method, SaddleProblem, SolverConfig};
use crate::{Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntryDist {
    /// Uniform on `[−1, 1]`.
    Uniform,
    /// Standard normal.
    Gaussian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGameInstance {
    pub a: Matrix,
    pub dist: EntryDist,
    pub seed: u64,
}

pub fn gen_game(m: usize, n: usize, dist: EntryDist, seed: u64) -> Result<MatrixGameInstance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("game dimensions must be positive".into()));
    }
    let mut rng = seeded(seed);
    let a = match dist {
        EntryDist::Uniform => Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..=1.0)),
        EntryDist::Gaussian => Matrix::from_fn(m, n, |_, _| rng.sample(StandardNormal)),
    };
    Ok(MatrixGameInstance { a, dist, seed })
}

/// Proximal kernel used on both simplices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GameKernel {
    #[default]
    Euclidean,
    Entropy,
}

fn check_simplex(v: &Vector, what: &str) -> Result<()> {
    if !FeasibleSet::Simplex.contains(v, 1e-8) {
        return Err(Error::Domain(format!("{what} is not a probability vector")));
    }
    Ok(())
}

/// `max_i (Ax)_i − min_j (Aᵀy)_j`: nonnegative on the simplices and zero
/// exactly at equilibria.
pub fn game_gap(a: &Matrix, x: &Vector, y: &Vector) -> Result<f64> {
    crate::error::check_len(a.ncols(), x.len())?;
    crate::error::check_len(a.nrows(), y.len())?;
    check_simplex(x, "x")?;
    check_simplex(y, "y")?;
    Ok((a * x).max() - a.tr_mul(y).min())
}

/// The variant `max_i (Ax)_i − min_j (Aᵀx)_j` evaluated on the primal point
/// only; meaningful for square games.
pub fn game_gap_primal_only(a: &Matrix, x: &Vector) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("primal-only gap needs a square game".into()));
    }
    check_simplex(x, "x")?;
    Ok((a * x).max() - a.tr_mul(x).min())
}

/// `min_{x ∈ Δ_n} max_{y ∈ Δ_m} ⟨Ax, y⟩` from the uniform start, with the
/// gap tracked as the problem metric.
pub fn build_matrix_game(instance: &MatrixGameInstance) -> Result<SaddleProblem> {
    let (m, n) = instance.a.shape();
    let primal: Arc<dyn ProxOracle> = Arc::new(LinearOracle::indicator(n, FeasibleSet::Simplex));
    let dual: Arc<dyn ProxOracle> = Arc::new(LinearOracle::indicator(m, FeasibleSet::Simplex));
    let op = Arc::new(LinearOperator::dense(instance.a.clone()));
    let a = instance.a.clone();
    SaddleProblem::new(primal, dual, op)?
        .with_start(Vector::from_element(n, 1.0 / n as f64), Vector::from_element(m, 1.0 / m as f64))
        .map(|p| p.with_metric("gap", Arc::new(move |x, y| game_gap(&a, x, y).unwrap_or(f64::NAN))))
}

/// Game solver settings: FOPDA with `(γ, μ) = (‖A‖, ‖A‖)`, SPIDA with
/// `(0.8‖A‖, 0.8‖A‖)`, tolerance `1e−4`.
pub fn game_config(instance: &MatrixGameInstance, method: Method, kernel: GameKernel) -> SolverConfig {
    let norm = estimate_norm(&LinearOperator::dense(instance.a.clone()), NORM_MAX_ITER, NORM_TOL, instance.seed).value;
    let scale = match method {
        Method::Spida => 0.8 * norm,
        _ => norm,
    };
    let k = match kernel {
        GameKernel::Euclidean => BregmanKernel::Euclidean,
        GameKernel::Entropy => BregmanKernel::Entropy,
    };
    let mut cfg = SolverConfig::new(method, scale, scale).with_kernels(k.clone(), k).with_tolerance(1e-4, 100_000);
    cfg.seed = instance.seed;
    cfg
}
