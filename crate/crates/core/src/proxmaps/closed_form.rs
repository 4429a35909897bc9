use faer::Mat;

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// `sign(vᵢ) · max(|vᵢ| − λ, 0)`, the prox of `λ‖·‖₁`.
pub fn soft_threshold(v: &Vector, lambda: f64) -> Vector {
    v.map(|x| x.signum() * (x.abs() - lambda).max(0.0))
}

fn to_faer(m: &Matrix) -> Mat<f64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Singular values in descending order.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    to_faer(m).singular_values().map_err(|e| Error::Solver(format!("singular value decomposition failed: {e:?}")))
}

/// Singular-value soft thresholding, the prox of `λ‖·‖_*`.
pub fn prox_nuclear(m: &Matrix, lambda: f64) -> Result<Matrix> {
    if lambda < 0.0 {
        return Err(Error::InvalidArgument("threshold must be nonnegative".into()));
    }
    let (rows, cols) = m.shape();
    if lambda == 0.0 || m.is_empty() {
        return Ok(m.clone());
    }
    let svd =
        to_faer(m).thin_svd().map_err(|e| Error::Solver(format!("singular value decomposition failed: {e:?}")))?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let kept: Vec<(usize, f64)> = (0..s.nrows())
        .filter_map(|k| {
            let shrunk = s[k] - lambda;
            (shrunk > 0.0).then_some((k, shrunk))
        })
        .collect();
    let r = kept.len();
    let us = Matrix::from_fn(rows, r, |i, c| u[(i, kept[c].0)] * kept[c].1);
    let vk = Matrix::from_fn(cols, r, |j, c| v[(j, kept[c].0)]);
    Ok(us * vk.transpose())
}

/// Euclidean projection onto the unit simplex by the sorted-threshold rule.
pub fn project_simplex(v: &Vector) -> Result<Vector> {
    if v.is_empty() {
        return Err(Error::InvalidArgument("cannot project an empty vector onto the simplex".into()));
    }
    let mut sorted: Vec<f64> = v.iter().copied().collect();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    Ok(v.map(|x| (x - theta).max(0.0)))
}

pub fn project_box(v: &Vector, lo: f64, hi: f64) -> Result<Vector> {
    if lo > hi || lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidArgument(format!("empty box [{lo}, {hi}]")));
    }
    Ok(v.map(|x| x.clamp(lo, hi)))
}

pub fn project_linf_ball(v: &Vector, radius: f64) -> Result<Vector> {
    if radius <= 0.0 || radius.is_nan() {
        return Err(Error::InvalidArgument("l-infinity radius must be positive".into()));
    }
    Ok(v.map(|x| x.clamp(-radius, radius)))
}

/// `argmin_{y ∈ Δ} ⟨−c, y⟩ + γ·KL(y, y_prev)`, i.e. `y ∝ y_prev · exp(c/γ)`.
pub fn entropy_mirror_step(y_prev: &Vector, c: &Vector, gamma: f64) -> Result<Vector> {
    if y_prev.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::Domain("mirror step needs a strictly positive center".into()));
    }
    if gamma <= 0.0 {
        return Err(Error::InvalidArgument("mirror step weight must be positive".into()));
    }
    crate::error::check_len(y_prev.len(), c.len())?;
    // shift by the max exponent so exp never overflows
    let logits: Vec<f64> = y_prev.iter().zip(c.iter()).map(|(&p, &ci)| p.ln() + ci / gamma).collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logits.iter().map(|&l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(Vector::from_iterator(w.len(), w.into_iter().map(|x| x / total)))
}
