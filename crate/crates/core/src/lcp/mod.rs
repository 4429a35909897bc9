//! Linearly constrained programs `min Σ fᵢ(xᵢ) s.t. Σ Aᵢxᵢ = b`.
//!
//! The one-block schemes (ALM, linearized ALM, doubly balanced ALM, BALM) and
//! the multi-block Jacobian splittings all carry their state in an
//! [`IterateState`] over the stacked primal vector, so they can be compared
//! iterate by iterate with the generic saddle solver on [`LcpProblem::to_saddle`].

mod smw;

use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;

use crate::bregman::BregmanKernel;
use crate::error::{check_len, Error, Result};
use crate::linops::{hstack, LinearOperator};
use crate::proxmaps::{FeasibleSet, LinearOracle, ProductOracle, ProxOracle, Subproblem};
use crate::saddle::{relative_change, IterateState, SaddleProblem, Termination};
use crate::Vector;

pub use smw::{smw_solve, Smw, SMW_DIRECT_LIMIT};

/// Blocks `(fᵢ, Aᵢ)` and right-hand side `b`.
/// Factorizations keyed by the bits of the penalty they were built for.
type SmwCache = Vec<(u64, Arc<Smw>)>;

#[derive(Clone)]
pub struct LcpProblem {
    blocks: Vec<(Arc<dyn ProxOracle>, Arc<LinearOperator>)>,
    b: Vector,
    offsets: Vec<usize>,
    primal: Arc<dyn ProxOracle>,
    op: Arc<LinearOperator>,
    smw_cache: Arc<Mutex<SmwCache>>,
}

impl std::fmt::Debug for LcpProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LcpProblem")
            .field("blocks", &self.blocks.len())
            .field("offsets", &self.offsets)
            .field("m", &self.b.len())
            .finish()
    }
}

impl LcpProblem {
    pub fn new(blocks: Vec<(Arc<dyn ProxOracle>, Arc<LinearOperator>)>, b: Vector) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("a constrained program needs at least one block".into()));
        }
        let mut offsets = vec![0];
        for (f, a) in &blocks {
            check_len(b.len(), a.codomain_dim())?;
            check_len(a.domain_dim(), f.dim())?;
            offsets.push(offsets.last().unwrap() + f.dim());
        }
        let (primal, op) = if blocks.len() == 1 {
            (blocks[0].0.clone(), blocks[0].1.clone())
        } else {
            let product: Arc<dyn ProxOracle> =
                Arc::new(ProductOracle::new(blocks.iter().map(|(f, _)| f.clone()).collect())?);
            (product, Arc::new(hstack(blocks.iter().map(|(_, a)| a.clone()).collect())?))
        };
        Ok(LcpProblem { blocks, b, offsets, primal, op, smw_cache: Arc::new(Mutex::new(Vec::new())) })
    }

    pub fn p(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[(Arc<dyn ProxOracle>, Arc<LinearOperator>)] {
        &self.blocks
    }

    pub fn b(&self) -> &Vector {
        &self.b
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// `[A₁, …, A_p]`.
    pub fn op(&self) -> &Arc<LinearOperator> {
        &self.op
    }

    /// `Σ fᵢ` on the stacked vector.
    pub fn primal(&self) -> &Arc<dyn ProxOracle> {
        &self.primal
    }

    pub fn block<'a>(&self, x: &'a Vector, i: usize) -> nalgebra::DVectorView<'a, f64> {
        x.rows(self.offsets[i], self.offsets[i + 1] - self.offsets[i])
    }

    /// `Σ Aᵢxᵢ − b`.
    pub fn residual(&self, x: &Vector) -> Result<Vector> {
        Ok(self.op.apply(x)? - &self.b)
    }

    pub fn objective(&self, x: &Vector) -> f64 {
        self.primal.value(x)
    }

    /// `min_x max_y Σ fᵢ(xᵢ) + ⟨Ax − b, y⟩` with `y` free.
    pub fn to_saddle(&self) -> Result<SaddleProblem> {
        let dual: Arc<dyn ProxOracle> = Arc::new(LinearOracle::indicator(self.b.len(), FeasibleSet::Free));
        SaddleProblem::new(self.primal.clone(), dual, self.op.clone())?.with_shift(self.b.clone())
    }

    /// Zero primal and dual start.
    pub fn initial_state(&self) -> IterateState {
        IterateState::new(Vector::zeros(self.dim()), Vector::zeros(self.b.len()))
    }

    /// Cached Woodbury solver for `(AAᵀ + κI)⁻¹`.
    pub fn smw(&self, kappa: f64) -> Result<Arc<Smw>> {
        let key = kappa.to_bits();
        let mut cache = self.smw_cache.lock().expect("solver cache poisoned");
        if let Some((_, s)) = cache.iter().find(|(k, _)| *k == key) {
            return Ok(s.clone());
        }
        let s = Arc::new(Smw::new(self.op.clone(), kappa)?);
        cache.push((key, s.clone()));
        Ok(s)
    }
}

/// Parameters shared by the constrained-program schemes.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiBlockConfig {
    pub gamma: f64,
    pub mu: f64,
    /// Per-block metric weights; empty means `1/γ` for every block.
    pub betas: Vec<f64>,
    pub kappa: f64,
    /// Blocks `0..split` use the `Aᵢ`-metric prox in the partially linearized scheme.
    pub split: usize,
    pub eps: f64,
    pub max_iter: usize,
}

impl MultiBlockConfig {
    pub fn new(gamma: f64, mu: f64) -> Self {
        MultiBlockConfig { gamma, mu, betas: Vec::new(), kappa: 1.0, split: 0, eps: 1e-6, max_iter: 10_000 }
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa = kappa;
        self
    }

    pub fn with_betas(mut self, betas: Vec<f64>) -> Self {
        self.betas = betas;
        self
    }

    pub fn with_split(mut self, split: usize) -> Self {
        self.split = split;
        self
    }

    pub fn with_tolerance(mut self, eps: f64, max_iter: usize) -> Self {
        self.eps = eps;
        self.max_iter = max_iter;
        self
    }

    pub fn beta(&self, i: usize) -> f64 {
        self.betas.get(i).copied().unwrap_or(1.0 / self.gamma)
    }

    pub fn check(&self, p: usize) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.gamma) || !positive(self.mu) || !positive(self.kappa) {
            return Err(Error::InvalidArgument("gamma, mu and kappa must be positive".into()));
        }
        if !self.betas.is_empty() && (self.betas.len() != p || !self.betas.iter().all(|&b| positive(b))) {
            return Err(Error::InvalidArgument(format!("need {p} positive block weights")));
        }
        if self.split > p {
            return Err(Error::InvalidArgument(format!("split index {} exceeds block count {p}", self.split)));
        }
        Ok(())
    }

    /// Non-fatal remarks; block weights that differ from `1/γ` leave the
    /// identification with the saddle iteration.
    pub fn warnings(&self, p: usize) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..p {
            let b = self.beta(i);
            if (b * self.gamma - 1.0).abs() > 1e-12 {
                out.push(format!("block {i}: beta = {b} differs from 1/gamma = {}", 1.0 / self.gamma));
            }
        }
        out
    }
}

fn euclid_prox(f: &dyn ProxOracle, linear: &Vector, center: &Vector, weight: f64) -> Result<Vector> {
    f.solve(&Subproblem { linear, center, weight, kernel: &BregmanKernel::Euclidean, inner_budget: None })
}

fn next_state(prev: &IterateState, x: Vector, y: Vector, y_tilde: Vector) -> IterateState {
    IterateState { x_tilde: x.clone(), x, y, y_tilde, x_prev: prev.x.clone(), y_prev: prev.y.clone(), k: prev.k + 1 }
}

/// `x⁺ = argmin f(x) + (1/2γ)‖Ax − b + γy‖²`, `y⁺ = y + (Ax⁺ − b)/γ`.
pub fn alm_step(problem: &LcpProblem, state: &IterateState, config: &MultiBlockConfig) -> Result<IterateState> {
    let g = config.gamma;
    let target = &problem.b - &state.y * g;
    let x = problem.primal.solve_coupled(&problem.op, &target, 1.0 / g).map_err(|e| match e {
        Error::Unsupported(msg) => Error::Unsupported(format!(
            "{msg}; the augmented Lagrangian subproblem has no solver here, use lalm_step instead"
        )),
        other => other,
    })?;
    let y = &state.y + problem.residual(&x)? / g;
    Ok(next_state(state, x, y, state.y.clone()))
}

/// Prox step on `f` at `x − Aᵀ(y + (Ax − b)/γ)/μ`, then the multiplier update.
pub fn lalm_step(problem: &LcpProblem, state: &IterateState, config: &MultiBlockConfig) -> Result<IterateState> {
    let g = config.gamma;
    let y_tilde = &state.y + problem.residual(&state.x)? / g;
    let c = problem.op.adjoint_apply(&y_tilde)?;
    let x = euclid_prox(problem.primal.as_ref(), &c, &state.x, config.mu)?;
    let y = &state.y + problem.residual(&x)? / g;
    Ok(next_state(state, x, y, y_tilde))
}

/// Linearized ALM with both multiplier steps preconditioned by `(AAᵀ + κI)⁻¹`.
pub fn dbalm_step(problem: &LcpProblem, state: &IterateState, config: &MultiBlockConfig) -> Result<IterateState> {
    let g = config.gamma;
    let smw = problem.smw(config.kappa)?;
    let y_tilde = &state.y + smw.solve(&problem.residual(&state.x)?)? / g;
    let c = problem.op.adjoint_apply(&y_tilde)?;
    let x = euclid_prox(problem.primal.as_ref(), &c, &state.x, config.mu)?;
    let y = &state.y + smw.solve(&problem.residual(&x)?)? / g;
    Ok(next_state(state, x, y, y_tilde))
}

/// Balanced ALM: prox step with weight `γ`, then
/// `y⁺ = y + (AAᵀ/γ + κI)⁻¹(A(2x⁺ − x) − b)`.
pub fn balm_step(problem: &LcpProblem, state: &IterateState, config: &MultiBlockConfig) -> Result<IterateState> {
    let g = config.gamma;
    let c = problem.op.adjoint_apply(&state.y)?;
    let x = euclid_prox(problem.primal.as_ref(), &c, &state.x, g)?;
    let reflected = &x * 2.0 - &state.x;
    // (AAᵀ/γ + κI)⁻¹ = γ(AAᵀ + γκI)⁻¹
    let smw = problem.smw(g * config.kappa)?;
    let y = &state.y + smw.solve(&problem.residual(&reflected)?)? * g;
    Ok(next_state(state, x, y, state.y.clone()))
}

#[derive(Clone, Copy)]
enum BlockRule {
    /// `argmin fᵢ + (w/2)‖Aᵢxᵢ − (Aᵢxᵢᵏ − ỹ/w)‖²`
    Metric(f64),
    /// `argmin fᵢ + (w/2)‖xᵢ − (xᵢᵏ − Aᵢᵀỹ/w)‖²`
    Linearized(f64),
}

fn jacobian_sweep(
    problem: &LcpProblem,
    state: &IterateState,
    config: &MultiBlockConfig,
    rule: impl Fn(usize) -> BlockRule + Sync,
) -> Result<IterateState> {
    let g = config.gamma;
    let y_tilde = &state.y + problem.residual(&state.x)? / g;
    let pieces: Vec<Result<Vector>> = problem
        .blocks
        .par_iter()
        .enumerate()
        .map(|(i, (f, a))| {
            let xi = problem.block(&state.x, i).into_owned();
            match rule(i) {
                BlockRule::Metric(w) => {
                    let target = a.apply(&xi)? - &y_tilde / w;
                    f.solve_coupled(a, &target, w)
                }
                BlockRule::Linearized(w) => euclid_prox(f.as_ref(), &a.adjoint_apply(&y_tilde)?, &xi, w),
            }
        })
        .collect();
    let mut x = Vector::zeros(problem.dim());
    for (i, piece) in pieces.into_iter().enumerate() {
        let piece = piece?;
        x.rows_mut(problem.offsets[i], piece.len()).copy_from(&piece);
    }
    let y = &state.y + problem.residual(&x)? / g;
    Ok(next_state(state, x, y, y_tilde))
}

/// Proximal Jacobian splitting: every block takes an `Aᵢ`-metric prox step
/// against the same predicted multiplier.
pub fn jacobian_prox_step(
    problem: &LcpProblem,
    state: &IterateState,
    config: &MultiBlockConfig,
) -> Result<IterateState> {
    jacobian_sweep(problem, state, config, |_| BlockRule::Metric(config.mu))
}

/// Linearized Jacobian splitting: plain prox steps with weight `μ`.
pub fn jacobian_linearized_step(
    problem: &LcpProblem,
    state: &IterateState,
    config: &MultiBlockConfig,
) -> Result<IterateState> {
    jacobian_sweep(problem, state, config, |_| BlockRule::Linearized(config.mu))
}

/// Partially linearized Jacobian splitting: blocks before `split` use the
/// `Aᵢ`-metric, the rest are linearized; block `i` has weight `βᵢ`.
pub fn pljsm_step(problem: &LcpProblem, state: &IterateState, config: &MultiBlockConfig) -> Result<IterateState> {
    config.check(problem.p())?;
    jacobian_sweep(problem, state, config, |i| {
        let w = config.beta(i);
        if i < config.split {
            BlockRule::Metric(w)
        } else {
            BlockRule::Linearized(w)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LcpScheme {
    Alm,
    Lalm,
    Dbalm,
    Balm,
    JacobianProx,
    JacobianLinearized,
    Pljsm,
}

impl LcpScheme {
    pub fn label(&self) -> &'static str {
        match self {
            LcpScheme::Alm => "alm",
            LcpScheme::Lalm => "lalm",
            LcpScheme::Dbalm => "dbalm",
            LcpScheme::Balm => "balm",
            LcpScheme::JacobianProx => "jacobian-prox",
            LcpScheme::JacobianLinearized => "jacobian-linearized",
            LcpScheme::Pljsm => "pljsm",
        }
    }

    pub fn step(&self, problem: &LcpProblem, state: &IterateState, config: &MultiBlockConfig) -> Result<IterateState> {
        match self {
            LcpScheme::Alm => alm_step(problem, state, config),
            LcpScheme::Lalm => lalm_step(problem, state, config),
            LcpScheme::Dbalm => dbalm_step(problem, state, config),
            LcpScheme::Balm => balm_step(problem, state, config),
            LcpScheme::JacobianProx => jacobian_prox_step(problem, state, config),
            LcpScheme::JacobianLinearized => jacobian_linearized_step(problem, state, config),
            LcpScheme::Pljsm => pljsm_step(problem, state, config),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LcpReport {
    pub scheme: LcpScheme,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub termination: Termination,
    pub tol_log: Vec<f64>,
    pub state: IterateState,
    /// `‖Ax − b‖` at the final iterate.
    pub residual_norm: f64,
}

/// Iterates a scheme from the zero start until the relative change drops to `eps`.
pub fn run_lcp(problem: &LcpProblem, config: &MultiBlockConfig, scheme: LcpScheme) -> Result<LcpReport> {
    config.check(problem.p())?;
    let mut state = problem.initial_state();
    let mut tol_log = Vec::new();
    let mut termination = Termination::MaxIter;
    let started = Instant::now();
    while tol_log.len() < config.max_iter {
        let next = scheme.step(problem, &state, config)?;
        let tol = relative_change(&next, &state);
        state = next;
        tol_log.push(tol);
        if tol <= config.eps {
            termination = Termination::Tolerance;
            break;
        }
    }
    let wall_time_s = started.elapsed().as_secs_f64();
    let residual_norm = problem.residual(&state.x)?.norm();
    Ok(LcpReport { scheme, iterations: tol_log.len(), wall_time_s, termination, tol_log, state, residual_norm })
}
