use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::Vector;

const STEP_MIN: f64 = 1e-10;
const STEP_MAX: f64 = 1e10;
const MEMORY: usize = 10;
const SUFFICIENT_DECREASE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct BbOutcome {
    pub x: Vector,
    pub iterations: usize,
    /// `‖x − Π(x − ∇q(x))‖` at the returned point.
    pub pg_norm: f64,
}

/// Minimizes `q(x) = ½⟨x, Hx⟩ + ⟨linear, x⟩` over the box `[lo, hi]ⁿ` by
/// projected Barzilai-Borwein steps.
///
/// The first step is `1/lipschitz`; later ones use the BB1 quotient clamped to
/// `[1e−10, 1e10]`. A step is accepted if it passes a nonmonotone Armijo test
/// against the last ten objective values, otherwise the exact minimizer of
/// `q` along the projected direction (clipped to the segment) is taken.
pub fn projected_bb(
    hess: impl Fn(&Vector) -> Result<Vector>,
    linear: &Vector,
    (lo, hi): (f64, f64),
    x0: &Vector,
    lipschitz: f64,
    max_iter: usize,
    tol: f64,
) -> Result<BbOutcome> {
    crate::error::check_len(linear.len(), x0.len())?;
    if lo > hi || !(lipschitz > 0.0) {
        return Err(Error::InvalidArgument("box bounds must be ordered and the Lipschitz constant positive".into()));
    }
    let project = |v: &Vector| v.map(|t| t.clamp(lo, hi));
    let pg_norm = |x: &Vector, g: &Vector| (x - project(&(x - g))).norm();

    let mut x = project(x0);
    let hx = hess(&x)?;
    let mut g = &hx + linear;
    let mut f = 0.5 * x.dot(&hx) + linear.dot(&x);
    let mut history = VecDeque::from([f]);
    let mut step = (1.0 / lipschitz).clamp(STEP_MIN, STEP_MAX);
    let mut pg = pg_norm(&x, &g);
    let mut iterations = 0;

    while iterations < max_iter && pg > tol {
        let d = project(&(&x - &g * step)) - &x;
        if d.norm_squared() == 0.0 {
            break;
        }
        let hd = hess(&d)?;
        let gd = g.dot(&d);
        let dhd = d.dot(&hd);
        let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let full = f + gd + 0.5 * dhd;
        let t = if full <= reference + SUFFICIENT_DECREASE * gd {
            1.0
        } else if dhd > 0.0 {
            (-gd / dhd).clamp(0.0, 1.0)
        } else {
            1.0
        };
        f += t * gd + 0.5 * t * t * dhd;
        if !f.is_finite() {
            return Err(Error::Solver("projected BB produced a non-finite objective".into()));
        }
        x += &d * t;
        g += &hd * t;
        iterations += 1;

        let ss = t * t * d.norm_squared();
        let sy = t * t * dhd;
        step = if sy > 0.0 { (ss / sy).clamp(STEP_MIN, STEP_MAX) } else { STEP_MAX };
        history.push_back(f);
        if history.len() > MEMORY {
            history.pop_front();
        }
        pg = pg_norm(&x, &g);
    }
    Ok(BbOutcome { x, iterations, pg_norm: pg })
}
