use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bregman::{BregmanKernel, GramSide};
use crate::error::{check_len, Error, Result};
use crate::lcp::{run_lcp, LcpProblem, LcpScheme, MultiBlockConfig};
use crate::linops::{estimate_norm, LinearOperator, PartialDct, NORM_MAX_ITER, NORM_TOL};
use crate::proxmaps::{L1Oracle, ProxOracle};
use crate::rng::seeded;
use crate::saddle::{run, Method, SolverConfig, Termination};
use crate::{Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SensingKind {
    /// i.i.d. Gaussian entries scaled to unit spectral norm.
    Gaussian,
    /// Random rows of the orthonormal DCT.
    Dct,
}

/// `min ‖x‖₁ s.t. Ax = b` with a planted sparse solution.
#[derive(Clone, Debug)]
pub struct BasisPursuitInstance {
    pub a: Arc<LinearOperator>,
    pub b: Vector,
    pub x_true: Vector,
    pub kind: SensingKind,
    pub sparsity: usize,
    pub seed: u64,
}

impl BasisPursuitInstance {
    pub fn m(&self) -> usize {
        self.a.codomain_dim()
    }

    pub fn n(&self) -> usize {
        self.a.domain_dim()
    }
}

/// Standard sizes `(m, n, s) = (180i, 960i, 30i)`.
pub fn bp_dims(i: usize) -> (usize, usize, usize) {
    (180 * i, 960 * i, 30 * i)
}

pub fn gen_bp(i: usize, kind: SensingKind, seed: u64) -> Result<BasisPursuitInstance> {
    let (m, n, s) = bp_dims(i);
    gen_bp_dims(m, n, s, kind, seed)
}

pub fn gen_bp_dims(m: usize, n: usize, s: usize, kind: SensingKind, seed: u64) -> Result<BasisPursuitInstance> {
    if m == 0 || m > n || s > n {
        return Err(Error::InvalidArgument(format!("need 0 < m <= n and s <= n, got m={m} n={n} s={s}")));
    }
    let mut rng = seeded(seed);
    let a = match kind {
        SensingKind::Gaussian => {
            let g = Matrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let norm = estimate_norm(&LinearOperator::dense(g.clone()), NORM_MAX_ITER, NORM_TOL, seed).value;
            LinearOperator::dense(g / norm)
        }
        SensingKind::Dct => LinearOperator::PartialDct(PartialDct::random(n, m, rng.random())?),
    };
    let mut x_true = Vector::zeros(n);
    for idx in sample(&mut rng, n, s) {
        x_true[idx] = rng.sample(StandardNormal);
    }
    let b = a.apply(&x_true)?;
    Ok(BasisPursuitInstance { a: Arc::new(a), b, x_true, kind, sparsity: s, seed })
}

pub fn build_basis_pursuit(instance: &BasisPursuitInstance) -> Result<LcpProblem> {
    let f: Arc<dyn ProxOracle> = Arc::new(L1Oracle::new(instance.n(), 1.0));
    LcpProblem::new(vec![(f, instance.a.clone())], instance.b.clone())
}

/// `‖x − x_true‖ / ‖x_true‖`.
pub fn rel_err(x: &Vector, x_true: &Vector) -> Result<f64> {
    check_len(x_true.len(), x.len())?;
    let den = x_true.norm();
    if den == 0.0 {
        return Ok(x.norm());
    }
    Ok((x - x_true).norm() / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BpFlavor {
    /// Primal-dual with extrapolation, `(γ, μ) = (1, 1)`.
    Fopda,
    /// Balanced ALM, `(γ, κ) = (1.5, 0.015)`.
    Balm,
    /// SPIDA with Euclidean kernels, `(γ, μ) = (0.6, 0.6)`.
    SpidaI,
    /// SPIDA with `φ = ½‖·‖²_{AAᵀ + κI}`, `(γ, μ, κ) = (0.6, 0.6, 0.01)`.
    SpidaII,
}

impl BpFlavor {
    pub const ALL: [BpFlavor; 4] = [BpFlavor::Fopda, BpFlavor::Balm, BpFlavor::SpidaI, BpFlavor::SpidaII];

    pub fn label(&self) -> &'static str {
        match self {
            BpFlavor::Fopda => "fopda",
            BpFlavor::Balm => "balm",
            BpFlavor::SpidaI => "spida-i",
            BpFlavor::SpidaII => "spida-ii",
        }
    }

    /// Default `(γ, μ, κ)`; entries a flavor does not use are ignored.
    pub fn default_params(&self) -> BpParams {
        match self {
            BpFlavor::Fopda => BpParams { gamma: 1.0, mu: 1.0, kappa: 0.0 },
            BpFlavor::Balm => BpParams { gamma: 1.5, mu: 1.0, kappa: 0.015 },
            BpFlavor::SpidaI => BpParams { gamma: 0.6, mu: 0.6, kappa: 0.0 },
            BpFlavor::SpidaII => BpParams { gamma: 0.6, mu: 0.6, kappa: 0.01 },
        }
    }

    /// Saddle-form settings; `None` for BALM, which runs as a constrained-program scheme.
    pub fn solver_config(&self, instance: &BasisPursuitInstance, params: BpParams) -> Result<Option<SolverConfig>> {
        let BpParams { gamma, mu, kappa } = params;
        let mut cfg = match self {
            BpFlavor::Fopda => SolverConfig::new(Method::Fopda { tau: 1.0 }, gamma, mu),
            BpFlavor::SpidaI => SolverConfig::new(Method::Spida, gamma, mu),
            BpFlavor::SpidaII => {
                let phi = BregmanKernel::gram(instance.a.clone(), GramSide::Outer, 1.0, kappa)?;
                SolverConfig::new(Method::Spida, gamma, mu).with_kernels(phi, BregmanKernel::Euclidean)
            }
            BpFlavor::Balm => return Ok(None),
        };
        cfg.seed = instance.seed;
        Ok(Some(cfg))
    }

    pub fn balm_config(params: BpParams) -> MultiBlockConfig {
        MultiBlockConfig::new(params.gamma, params.mu).with_kappa(params.kappa)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpParams {
    pub gamma: f64,
    pub mu: f64,
    pub kappa: f64,
}

#[derive(Clone, Debug)]
pub struct BpOutcome {
    pub flavor: BpFlavor,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub termination: Termination,
    pub x: Vector,
    pub rel_err: f64,
}

/// Runs one flavor with its default parameters from the zero start.
pub fn solve_bp(instance: &BasisPursuitInstance, flavor: BpFlavor, eps: f64, max_iter: usize) -> Result<BpOutcome> {
    solve_bp_with(instance, flavor, flavor.default_params(), eps, max_iter)
}

pub fn solve_bp_with(
    instance: &BasisPursuitInstance,
    flavor: BpFlavor,
    params: BpParams,
    eps: f64,
    max_iter: usize,
) -> Result<BpOutcome> {
    let problem = build_basis_pursuit(instance)?;
    let (iterations, wall_time_s, termination, x) = match flavor.solver_config(instance, params)? {
        Some(cfg) => {
            let r = run(&problem.to_saddle()?, &cfg.with_tolerance(eps, max_iter))?;
            (r.iterations, r.wall_time_s, r.termination, r.state.x)
        }
        None => {
            let r = run_lcp(&problem, &BpFlavor::balm_config(params).with_tolerance(eps, max_iter), LcpScheme::Balm)?;
            (r.iterations, r.wall_time_s, r.termination, r.state.x)
        }
    };
    let rel_err = rel_err(&x, &instance.x_true)?;
    Ok(BpOutcome { flavor, iterations, wall_time_s, termination, x, rel_err })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_shapes_and_norm() {
        let inst = gen_bp_dims(30, 80, 5, SensingKind::Gaussian, 2).unwrap();
        assert_eq!((inst.m(), inst.n()), (30, 80));
        assert_eq!(inst.x_true.iter().filter(|v| **v != 0.0).count(), 5);
        let norm = estimate_norm(&inst.a, NORM_MAX_ITER, NORM_TOL, 9).value;
        assert!((norm - 1.0).abs() < 1e-8);
        assert!((inst.a.apply(&inst.x_true).unwrap() - &inst.b).amax() < 1e-14);
        let dct = gen_bp_dims(16, 64, 3, SensingKind::Dct, 2).unwrap();
        assert!((estimate_norm(&dct.a, NORM_MAX_ITER, NORM_TOL, 1).value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(gen_bp_dims(10, 5, 1, SensingKind::Gaussian, 0).is_err());
        assert!(gen_bp_dims(3, 5, 6, SensingKind::Dct, 0).is_err());
    }

    #[test]
    fn all_flavors_recover_small_instance() {
        let inst = gen_bp_dims(90, 480, 12, SensingKind::Gaussian, 5).unwrap();
        for flavor in BpFlavor::ALL {
            let out = solve_bp(&inst, flavor, 1e-8, 50_000).unwrap();
            assert_eq!(out.termination, Termination::Tolerance, "{}", flavor.label());
            assert!(out.rel_err < 1e-4, "{}: {}", flavor.label(), out.rel_err);
        }
    }
}
