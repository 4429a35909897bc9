use super::{IterateState, Method, SaddleProblem, SolverConfig};
use crate::error::Result;
use crate::proxmaps::Subproblem;
use crate::Vector;

/// `argmin_{y ∈ Y} g(y) − ⟨Ax − b, y⟩ + γ·B_φ(y, center)`.
fn dual_update(problem: &SaddleProblem, config: &SolverConfig, x: &Vector, center: &Vector) -> Result<Vector> {
    let w = -problem.residual(x)?;
    problem.dual().solve(&Subproblem {
        linear: &w,
        center,
        weight: config.gamma,
        kernel: &config.phi,
        inner_budget: config.inner_budget,
    })
}

/// `argmin_{x ∈ X} f(x) + ⟨x, Aᵀy⟩ + μ·B_ψ(x, center)`.
fn primal_update(problem: &SaddleProblem, config: &SolverConfig, y: &Vector, center: &Vector) -> Result<Vector> {
    let c = problem.op().adjoint_apply(y)?;
    problem.primal().solve(&Subproblem {
        linear: &c,
        center,
        weight: config.mu,
        kernel: &config.psi,
        inner_budget: config.inner_budget,
    })
}

/// Dual prediction, primal update, dual correction; both dual steps are
/// centered at `y^k`.
pub fn spida_step(problem: &SaddleProblem, state: &IterateState, config: &SolverConfig) -> Result<IterateState> {
    let y_tilde = dual_update(problem, config, &state.x, &state.y)?;
    let x = primal_update(problem, config, &y_tilde, &state.x)?;
    let y = dual_update(problem, config, &x, &state.y)?;
    Ok(IterateState {
        x_tilde: x.clone(),
        x,
        y,
        y_tilde,
        x_prev: state.x.clone(),
        y_prev: state.y.clone(),
        k: state.k + 1,
    })
}

/// Primal step against `y^k`, then dual step against the new primal.
pub fn ahpd_step(problem: &SaddleProblem, state: &IterateState, config: &SolverConfig) -> Result<IterateState> {
    extrapolated_step(problem, state, config, 0.0)
}

/// Primal step, extrapolation `x̃ = x⁺ + τ(x⁺ − x)`, dual step against `x̃`.
pub fn fopda_step(
    problem: &SaddleProblem,
    state: &IterateState,
    config: &SolverConfig,
    tau: f64,
) -> Result<IterateState> {
    extrapolated_step(problem, state, config, tau)
}

fn extrapolated_step(
    problem: &SaddleProblem,
    state: &IterateState,
    config: &SolverConfig,
    tau: f64,
) -> Result<IterateState> {
    let x = primal_update(problem, config, &state.y, &state.x)?;
    let x_tilde = if tau == 0.0 { x.clone() } else { &x + (&x - &state.x) * tau };
    let y = dual_update(problem, config, &x_tilde, &state.y)?;
    Ok(IterateState {
        x,
        y,
        y_tilde: state.y.clone(),
        x_tilde,
        x_prev: state.x.clone(),
        y_prev: state.y.clone(),
        k: state.k + 1,
    })
}

/// Dual step against `x^k`, extrapolation `ȳ = y⁺ + τ(y⁺ − y)`, primal step against `ȳ`.
pub fn fopda_dual_first_step(
    problem: &SaddleProblem,
    state: &IterateState,
    config: &SolverConfig,
    tau: f64,
) -> Result<IterateState> {
    let y = dual_update(problem, config, &state.x, &state.y)?;
    let y_bar = &y + (&y - &state.y) * tau;
    let x = primal_update(problem, config, &y_bar, &state.x)?;
    Ok(IterateState {
        x,
        y,
        y_tilde: y_bar,
        x_tilde: state.x.clone(),
        x_prev: state.x.clone(),
        y_prev: state.y.clone(),
        k: state.k + 1,
    })
}

/// One step of the configured method.
pub fn step(problem: &SaddleProblem, state: &IterateState, config: &SolverConfig) -> Result<IterateState> {
    match config.method {
        Method::Spida => spida_step(problem, state, config),
        Method::Ahpd => ahpd_step(problem, state, config),
        Method::Fopda { tau } => fopda_step(problem, state, config, tau),
        Method::FopdaDualFirst { tau } => fopda_dual_first_step(problem, state, config, tau),
    }
}
