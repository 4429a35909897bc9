use super::{IterateState, Method, SaddleProblem, SolverConfig};
use crate::bregman::BregmanKernel;
use crate::error::{Error, Result};
use crate::linops::{estimate_norm, NORM_MAX_ITER, NORM_TOL};
use crate::Vector;

/// Step-size diagnostics. Never refuses a configuration: commonly used
/// settings sit outside the sufficient conditions and still converge.
pub fn validate_config(problem: &SaddleProblem, config: &SolverConfig) -> Vec<String> {
    let norm = estimate_norm(problem.op(), NORM_MAX_ITER, NORM_TOL, config.seed).value;
    validate_config_with_norm(config, norm)
}

/// [`validate_config`] with a known `‖A‖`.
///
/// SPIDA: with `α = 1/(ϱγ)` the requirement reads `ϱ²μγ ≥ L‖AᵀA‖`, where `ϱ`
/// is the modulus of `φ` and `L = L_φ / ϱ_ψ` is the smallest constant with
/// `B_φ ≤ L·B_ψ`. FOPDA: `‖AAᵀ‖ < μγ` (scaled by the kernel moduli).
pub fn validate_config_with_norm(config: &SolverConfig, norm_a: f64) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Err(e) = config.check() {
        warnings.push(e.to_string());
        return warnings;
    }
    let a2 = norm_a * norm_a;
    let (mu, gamma) = (config.mu, config.gamma);
    if matches!(config.phi, BregmanKernel::Entropy) || matches!(config.psi, BregmanKernel::Entropy) {
        warnings
            .push("entropy kernel has no finite gradient Lipschitz constant; step-size condition not checked".into());
        return warnings;
    }
    let rho_phi = config.phi.modulus();
    let rho_psi = config.psi.modulus();
    match config.method {
        Method::Spida => {
            if rho_phi <= 0.0 || rho_psi <= 0.0 {
                warnings.push(format!(
                    "kernels are not strongly convex (moduli {rho_phi:.3e}, {rho_psi:.3e}); step-size condition not checked"
                ));
                return warnings;
            }
            let l = config.phi.lipschitz().unwrap_or(f64::INFINITY) / rho_psi;
            let lhs = rho_phi * rho_phi * mu * gamma;
            if lhs < l * a2 * (1.0 - 1e-9) {
                warnings.push(format!(
                    "rho^2 * mu * gamma = {lhs:.6e} is below L * |A^T A| = {:.6e}; convergence is not guaranteed",
                    l * a2
                ));
            }
        }
        Method::Fopda { .. } | Method::FopdaDualFirst { .. } => {
            let lhs = rho_phi * rho_psi * mu * gamma;
            if lhs <= a2 * (1.0 + 1e-9) {
                warnings.push(format!(
                    "mu * gamma = {lhs:.6e} does not exceed |A A^T| = {a2:.6e}; convergence is not guaranteed"
                ));
            }
        }
        Method::Ahpd => {
            warnings.push("constant-step Arrow-Hurwicz iterations may cycle on general problems".into());
        }
    }
    warnings
}

/// Norm of the projected-gradient residual at the state's `(x, y)`, with
/// subgradients read off the optimality conditions of the last subproblems:
///
/// ```text
/// ξ = −(Aᵀỹ + μ(∇ψ(x) − ∇ψ(x_prev)))          ∈ ∂f(x) + N_X(x)
/// ζ = (A x̃ − b) − γ(∇φ(y) − ∇φ(y_prev))        ∈ ∂g(y) + N_Y(y)
/// E = ( x − Π_X[x − t(ξ + Aᵀy)],  y − Π_Y[y − t(ζ − (Ax − b))] )
/// ```
///
/// `E` vanishes exactly at saddle points.
pub fn kkt_residual(problem: &SaddleProblem, state: &IterateState, config: &SolverConfig, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument("residual scaling t must be positive".into()));
    }
    let op = problem.op();
    let grad_psi = config.psi.gradient(&state.x)? - config.psi.gradient(&state.x_prev)?;
    let xi = -(op.adjoint_apply(&state.y_tilde)? + grad_psi * config.mu);
    let grad_phi = config.phi.gradient(&state.y)? - config.phi.gradient(&state.y_prev)?;
    let zeta = problem.residual(&state.x_tilde)? - grad_phi * config.gamma;

    let ex = &state.x - problem.primal().set().project(&(&state.x - (xi + op.adjoint_apply(&state.y)?) * t))?;
    let ey = &state.y - problem.dual().set().project(&(&state.y - (zeta - problem.residual(&state.x)?) * t))?;
    Ok((ex.norm_squared() + ey.norm_squared()).sqrt())
}

/// Means of the primal iterates and of the duals used in the primal updates.
pub fn ergodic_average(history: &[IterateState]) -> Result<(Vector, Vector)> {
    let first = history.first().ok_or_else(|| Error::InvalidArgument("ergodic average of an empty history".into()))?;
    let mut xs = Vector::zeros(first.x.len());
    let mut ys = Vector::zeros(first.y_tilde.len());
    for s in history {
        xs += &s.x;
        ys += &s.y_tilde;
    }
    let n = history.len() as f64;
    Ok((xs / n, ys / n))
}

/// `γ·B_φ(y*, y) + μ·B_ψ(x*, x)`.
pub fn bregman_gap(state: &IterateState, reference: (&Vector, &Vector), config: &SolverConfig) -> Result<f64> {
    let (xs, ys) = reference;
    Ok(config.gamma * config.phi.distance(ys, &state.y)? + config.mu * config.psi.distance(xs, &state.x)?)
}
