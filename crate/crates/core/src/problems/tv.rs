use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::bb::projected_bb;
use crate::bregman::{BregmanKernel, GramSide, Metric};
use crate::error::{check_len, Error, Result};
use crate::linops::{estimate_norm, make_grad2d, Blur2d, LinearOperator, NORM_MAX_ITER, NORM_TOL};
use crate::proxmaps::{unsupported_kernel, Exactness, FeasibleSet, LinearOracle, ProxOracle, Subproblem};
use crate::rng::seeded;
use crate::saddle::{Method, SaddleProblem, SolverConfig};
use crate::Vector;

pub const TV_INNER_BUDGET: usize = 50;
const TV_INNER_TOL: f64 = 1e-10;

/// `20·log10(‖x‖ / ‖x − x̂‖)` in dB; `+∞` when the estimate is exact.
pub fn snr(reference: &Vector, estimate: &Vector) -> Result<f64> {
    check_len(reference.len(), estimate.len())?;
    let err = (reference - estimate).norm();
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (reference.norm() / err).log10())
}

/// Blurred, noisy observation of an image together with the operators used
/// to restore it.
#[derive(Clone, Debug)]
pub struct TvRestoreInstance {
    pub x_true: Vector,
    pub height: usize,
    pub width: usize,
    pub kernel_size: usize,
    pub noise_std: f64,
    pub lambda: f64,
    pub seed: u64,
    pub b: Vector,
    pub blur: Arc<LinearOperator>,
    pub grad: Arc<LinearOperator>,
}

/// `K·x + noise` for a `size × size` uniform blur `K` with periodic boundary
/// and i.i.d. Gaussian noise.
pub fn degrade_image(
    x_true: &Vector,
    height: usize,
    width: usize,
    kernel_size: usize,
    noise_std: f64,
    seed: u64,
) -> Result<(Vector, Arc<LinearOperator>)> {
    check_len(height * width, x_true.len())?;
    if !(noise_std >= 0.0) {
        return Err(Error::InvalidArgument("noise level must be nonnegative".into()));
    }
    let blur = Arc::new(LinearOperator::Blur2d(Blur2d::uniform(kernel_size, height, width)?));
    let mut rng = seeded(seed);
    let clean = blur.apply(x_true)?;
    let b = clean.map(|v| v + noise_std * rng.sample::<f64, _>(StandardNormal));
    Ok((b, blur))
}

pub fn gen_tv(
    x_true: Vector,
    (height, width): (usize, usize),
    kernel_size: usize,
    noise_std: f64,
    lambda: f64,
    seed: u64,
) -> Result<TvRestoreInstance> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument("fidelity weight must be positive".into()));
    }
    let (b, blur) = degrade_image(&x_true, height, width, kernel_size, noise_std, seed)?;
    let grad = Arc::new(make_grad2d(height, width)?);
    Ok(TvRestoreInstance { x_true, height, width, kernel_size, noise_std, lambda, seed, b, blur, grad })
}

/// `h(x) = (λ/2)‖Kx − b‖²` on a box.
///
/// Euclidean subproblems go to projected BB. For the kernel
/// `½‖·‖²_M` with `M = ρI + ωKᵀK` and `weight·ω = −λ` the smooth part cancels
/// the curvature of `K` and the subproblem is a single projection.
#[derive(Clone, Debug)]
pub struct TvDataOracle {
    blur: Arc<LinearOperator>,
    b: Vector,
    lambda: f64,
    set: FeasibleSet,
    blur_norm2: f64,
    budget: usize,
}

impl TvDataOracle {
    pub fn new(blur: Arc<LinearOperator>, b: Vector, lambda: f64, (lo, hi): (f64, f64)) -> Result<Self> {
        check_len(blur.codomain_dim(), b.len())?;
        let blur_norm2 = estimate_norm(&blur, NORM_MAX_ITER, NORM_TOL, 0).value.powi(2);
        Ok(TvDataOracle { blur, b, lambda, set: FeasibleSet::Box { lo, hi }, blur_norm2, budget: TV_INNER_BUDGET })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn bounds(&self) -> (f64, f64) {
        match self.set {
            FeasibleSet::Box { lo, hi } => (lo, hi),
            _ => unreachable!("data oracle is always box constrained"),
        }
    }

    fn cancels_blur(&self, metric: &Metric, weight: f64) -> Option<f64> {
        match metric {
            Metric::Gram { op, side: GramSide::Inner, weight: omega, ridge }
                if *ridge > 0.0
                    && Arc::ptr_eq(op, &self.blur)
                    && (weight * omega + self.lambda).abs() <= 1e-12 * self.lambda =>
            {
                Some(*ridge)
            }
            _ => None,
        }
    }
}

impl ProxOracle for TvDataOracle {
    fn label(&self) -> String {
        format!("{}/2·|Kx - b|^2 on a box", self.lambda)
    }

    fn dim(&self) -> usize {
        self.blur.domain_dim()
    }

    fn exactness(&self) -> Exactness {
        Exactness::InnerIterative { max_iter: self.budget }
    }

    fn set(&self) -> &FeasibleSet {
        &self.set
    }

    fn value(&self, x: &Vector) -> f64 {
        self.blur.apply(x).map(|kx| 0.5 * self.lambda * (kx - &self.b).norm_squared()).unwrap_or(f64::NAN)
    }

    fn solve(&self, sub: &Subproblem<'_>) -> Result<Vector> {
        let n = self.dim();
        check_len(n, sub.linear.len())?;
        check_len(n, sub.center.len())?;
        let (lo, hi) = self.bounds();
        let (z, w, lam) = (sub.center, sub.weight, self.lambda);
        let budget = sub.inner_budget.unwrap_or(self.budget);
        let ktb = self.blur.adjoint_apply(&self.b)? * lam;
        match sub.kernel {
            BregmanKernel::Euclidean => {
                let linear = sub.linear - &ktb - z * w;
                let hess = |v: &Vector| Ok(self.blur.normal_apply(v)? * lam + v * w);
                let l = lam * self.blur_norm2 + w;
                Ok(projected_bb(hess, &linear, (lo, hi), z, l, budget, TV_INNER_TOL)?.x)
            }
            BregmanKernel::Quadratic(q) => {
                if let Some(ridge) = self.cancels_blur(q.metric(), w) {
                    let grad = self.blur.normal_apply(z)? * lam - &ktb + sub.linear;
                    return Ok((z - grad / (w * ridge)).map(|t| t.clamp(lo, hi)));
                }
                let metric = q.metric();
                let linear = sub.linear - &ktb - metric.apply(z)? * w;
                let hess = |v: &Vector| Ok(self.blur.normal_apply(v)? * lam + metric.apply(v)? * w);
                let l = lam * self.blur_norm2 + w * q.bounds().1.max(0.0);
                Ok(projected_bb(hess, &linear, (lo, hi), z, l, budget, TV_INNER_TOL)?.x)
            }
            kernel => Err(unsupported_kernel(&self.label(), kernel)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TvVariant {
    /// Dual-first primal-dual with extrapolated dual, `(γ, μ) = (0.016, 500)`.
    FopdaTv,
    /// SPIDA with Euclidean kernels, `(γ, μ) = (0.016, 375)`.
    SpidaI,
    /// SPIDA with `ψ = ½‖·‖²_{I − (λ/μ)KᵀK}`, `(γ, μ) = (0.016, 500)`;
    /// the primal update becomes a projected gradient step.
    SpidaII,
}

impl TvVariant {
    pub const ALL: [TvVariant; 3] = [TvVariant::FopdaTv, TvVariant::SpidaI, TvVariant::SpidaII];

    pub fn label(&self) -> &'static str {
        match self {
            TvVariant::FopdaTv => "fopda-tv",
            TvVariant::SpidaI => "spida-i",
            TvVariant::SpidaII => "spida-ii",
        }
    }
}

impl TvVariant {
    /// Default `(γ, μ)`.
    pub fn default_params(&self) -> (f64, f64) {
        match self {
            TvVariant::FopdaTv | TvVariant::SpidaII => (0.016, 500.0),
            TvVariant::SpidaI => (0.016, 375.0),
        }
    }
}

/// Solver settings for a restoration variant at tolerance `1e−4`.
pub fn tv_config(instance: &TvRestoreInstance, variant: TvVariant) -> Result<SolverConfig> {
    let (gamma, mu) = variant.default_params();
    tv_config_with(instance, variant, gamma, mu)
}

/// [`tv_config`] with explicit `(γ, μ)`; the SPIDA-II kernel follows `μ`.
pub fn tv_config_with(instance: &TvRestoreInstance, variant: TvVariant, gamma: f64, mu: f64) -> Result<SolverConfig> {
    let cfg = match variant {
        TvVariant::FopdaTv => SolverConfig::new(Method::FopdaDualFirst { tau: 1.0 }, gamma, mu),
        TvVariant::SpidaI => SolverConfig::new(Method::Spida, gamma, mu),
        TvVariant::SpidaII => {
            let psi = BregmanKernel::gram(instance.blur.clone(), GramSide::Inner, -instance.lambda / mu, 1.0)?;
            SolverConfig::new(Method::Spida, gamma, mu).with_kernels(BregmanKernel::Euclidean, psi)
        }
    };
    Ok(cfg.with_tolerance(1e-4, 5000).with_inner_budget(TV_INNER_BUDGET))
}

/// `min_{x ∈ [0,1]ⁿ} max_{‖y‖∞ ≤ 1} ⟨Dx, y⟩ + (λ/2)‖Kx − b‖²` started from
/// the clipped observation and a zero dual, with SNR as the tracked metric.
pub fn build_tv_restore(instance: &TvRestoreInstance) -> Result<SaddleProblem> {
    let primal: Arc<dyn ProxOracle> =
        Arc::new(TvDataOracle::new(instance.blur.clone(), instance.b.clone(), instance.lambda, (0.0, 1.0))?);
    let m = instance.grad.codomain_dim();
    let dual: Arc<dyn ProxOracle> = Arc::new(LinearOracle::indicator(m, FeasibleSet::LinfBall { radius: 1.0 }));
    let x0 = instance.b.map(|v| v.clamp(0.0, 1.0));
    let truth = instance.x_true.clone();
    Ok(SaddleProblem::new(primal, dual, instance.grad.clone())?
        .with_start(x0, Vector::zeros(m))?
        .with_metric("snr", Arc::new(move |x, _| snr(&truth, x).unwrap_or(f64::NAN))))
}
