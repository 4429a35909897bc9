//! Primal-dual iterations for `min_x max_y f(x) + ⟨Ax − b, y⟩ − g(y)`.
//!
//! Three schemes share one problem description:
//!
//! * [`Method::Spida`]: dual prediction, primal update, dual correction, each
//!   with a Bregman proximal term;
//! * [`Method::Ahpd`]: the plain Arrow-Hurwicz primal-then-dual sweep;
//! * [`Method::Fopda`]: primal update, extrapolation, dual update
//!   (Chambolle-Pock), plus a dual-first ordering for problems where the dual
//!   step is the cheap one.

mod diagnostics;
mod run;
mod steps;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bregman::BregmanKernel;
use crate::error::{check_len, Error, Result};
use crate::linops::LinearOperator;
use crate::proxmaps::ProxOracle;
use crate::Vector;

pub use diagnostics::{bregman_gap, ergodic_average, kkt_residual, validate_config, validate_config_with_norm};
pub use run::{relative_change, run, run_from, RunReport, Termination, TrajectoryRecord};
pub use steps::{ahpd_step, fopda_dual_first_step, fopda_step, spida_step, step};

/// Problem-specific scalar tracked along the iterates (e.g. a duality gap).
pub type IterateMetric = Arc<dyn Fn(&Vector, &Vector) -> f64 + Send + Sync>;

/// `f(x) + ⟨Ax − b, y⟩ − g(y)` with `x ∈ X`, `y ∈ Y`.
#[derive(Clone)]
pub struct SaddleProblem {
    primal: Arc<dyn ProxOracle>,
    dual: Arc<dyn ProxOracle>,
    op: Arc<LinearOperator>,
    shift: Option<Vector>,
    x0: Vector,
    y0: Vector,
    solution: Option<(Vector, Vector)>,
    metric: Option<(String, IterateMetric)>,
}

impl fmt::Debug for SaddleProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SaddleProblem")
            .field("primal", &self.primal.label())
            .field("dual", &self.dual.label())
            .field("op", &(self.op.codomain_dim(), self.op.domain_dim()))
            .field("has_shift", &self.shift.is_some())
            .field("has_solution", &self.solution.is_some())
            .finish()
    }
}

impl SaddleProblem {
    /// Zero shift and zero starting point.
    pub fn new(primal: Arc<dyn ProxOracle>, dual: Arc<dyn ProxOracle>, op: Arc<LinearOperator>) -> Result<Self> {
        check_len(op.domain_dim(), primal.dim())?;
        check_len(op.codomain_dim(), dual.dim())?;
        let (n, m) = (primal.dim(), dual.dim());
        Ok(SaddleProblem {
            primal,
            dual,
            op,
            shift: None,
            x0: Vector::zeros(n),
            y0: Vector::zeros(m),
            solution: None,
            metric: None,
        })
    }

    pub fn with_shift(mut self, b: Vector) -> Result<Self> {
        check_len(self.dual_dim(), b.len())?;
        self.shift = Some(b);
        Ok(self)
    }

    pub fn with_start(mut self, x0: Vector, y0: Vector) -> Result<Self> {
        check_len(self.primal_dim(), x0.len())?;
        check_len(self.dual_dim(), y0.len())?;
        self.x0 = x0;
        self.y0 = y0;
        Ok(self)
    }

    pub fn with_solution(mut self, x: Vector, y: Vector) -> Result<Self> {
        check_len(self.primal_dim(), x.len())?;
        check_len(self.dual_dim(), y.len())?;
        self.solution = Some((x, y));
        Ok(self)
    }

    pub fn with_metric(mut self, name: impl Into<String>, metric: IterateMetric) -> Self {
        self.metric = Some((name.into(), metric));
        self
    }

    pub fn primal(&self) -> &Arc<dyn ProxOracle> {
        &self.primal
    }

    pub fn dual(&self) -> &Arc<dyn ProxOracle> {
        &self.dual
    }

    pub fn op(&self) -> &Arc<LinearOperator> {
        &self.op
    }

    pub fn shift(&self) -> Option<&Vector> {
        self.shift.as_ref()
    }

    pub fn start(&self) -> (&Vector, &Vector) {
        (&self.x0, &self.y0)
    }

    pub fn solution(&self) -> Option<(&Vector, &Vector)> {
        self.solution.as_ref().map(|(x, y)| (x, y))
    }

    pub fn metric(&self) -> Option<(&str, &IterateMetric)> {
        self.metric.as_ref().map(|(n, m)| (n.as_str(), m))
    }

    pub fn primal_dim(&self) -> usize {
        self.primal.dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.dual.dim()
    }

    /// `Ax − b`.
    pub fn residual(&self, x: &Vector) -> Result<Vector> {
        let ax = self.op.apply(x)?;
        Ok(match &self.shift {
            Some(b) => ax - b,
            None => ax,
        })
    }

    /// `L(x, y) = f(x) + ⟨Ax − b, y⟩ − g(y)`.
    pub fn lagrangian(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_len(self.dual_dim(), y.len())?;
        Ok(self.primal.value(x) + self.residual(x)?.dot(y) - self.dual.value(y))
    }

    /// The starting state `(x⁰, y⁰)` with all auxiliary points set to it.
    pub fn initial_state(&self) -> IterateState {
        IterateState::new(self.x0.clone(), self.y0.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Method {
    Spida,
    Ahpd,
    /// Primal first, then dual against `x⁺ + τ(x⁺ − x)`.
    Fopda {
        tau: f64,
    },
    /// Dual first, then primal against `y⁺ + τ(y⁺ − y)`.
    FopdaDualFirst {
        tau: f64,
    },
}

impl Method {
    pub fn label(&self) -> String {
        match self {
            Method::Spida => "spida".into(),
            Method::Ahpd => "ahpd".into(),
            Method::Fopda { tau } => format!("fopda(tau={tau})"),
            Method::FopdaDualFirst { tau } => format!("fopda-dual-first(tau={tau})"),
        }
    }
}

/// Step sizes, kernels and termination policy for [`run`].
///
/// `phi` regularizes the dual subproblems (weight `gamma`), `psi` the primal
/// subproblem (weight `mu`).
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub method: Method,
    pub gamma: f64,
    pub mu: f64,
    pub phi: BregmanKernel,
    pub psi: BregmanKernel,
    pub eps: f64,
    pub max_iter: usize,
    pub inner_budget: Option<usize>,
    pub record_trajectory: bool,
    pub track_kkt: bool,
    pub track_bregman_gap: bool,
    pub keep_iterates: bool,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(method: Method, gamma: f64, mu: f64) -> Self {
        SolverConfig {
            method,
            gamma,
            mu,
            phi: BregmanKernel::Euclidean,
            psi: BregmanKernel::Euclidean,
            eps: 1e-6,
            max_iter: 10_000,
            inner_budget: None,
            record_trajectory: false,
            track_kkt: false,
            track_bregman_gap: false,
            keep_iterates: false,
            seed: 0,
        }
    }

    pub fn with_kernels(mut self, phi: BregmanKernel, psi: BregmanKernel) -> Self {
        self.phi = phi;
        self.psi = psi;
        self
    }

    pub fn with_tolerance(mut self, eps: f64, max_iter: usize) -> Self {
        self.eps = eps;
        self.max_iter = max_iter;
        self
    }

    pub fn with_inner_budget(mut self, budget: usize) -> Self {
        self.inner_budget = Some(budget);
        self
    }

    /// Record Tol, KKT residual and (when a solution is known) the Bregman gap
    /// at every iteration.
    pub fn with_diagnostics(mut self) -> Self {
        self.record_trajectory = true;
        self.track_kkt = true;
        self.track_bregman_gap = true;
        self
    }

    pub fn check(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) || !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step parameters must be positive and finite, got gamma = {}, mu = {}",
                self.gamma, self.mu
            )));
        }
        if let Method::Fopda { tau } | Method::FopdaDualFirst { tau } = self.method {
            if !(0.0..=1.0).contains(&tau) {
                return Err(Error::InvalidArgument(format!("extrapolation tau must lie in [0, 1], got {tau}")));
            }
        }
        if self.eps.is_nan() || self.eps < 0.0 {
            return Err(Error::InvalidArgument("tolerance must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Iterate after `k` steps.
///
/// `y_tilde` is the dual point the last primal update was taken against (the
/// predicted dual for SPIDA, `y^k` for AHPD, the extrapolated dual for
/// dual-first FOPDA); `x_tilde` is the primal point the last dual update used.
/// `x_prev`/`y_prev` are the centers of the last proximal terms.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateState {
    pub x: Vector,
    pub y: Vector,
    pub y_tilde: Vector,
    pub x_tilde: Vector,
    pub x_prev: Vector,
    pub y_prev: Vector,
    pub k: usize,
}

impl IterateState {
    pub fn new(x: Vector, y: Vector) -> Self {
        IterateState { y_tilde: y.clone(), x_tilde: x.clone(), x_prev: x.clone(), y_prev: y.clone(), x, y, k: 0 }
    }
}
