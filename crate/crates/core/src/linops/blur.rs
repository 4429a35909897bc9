use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::{Matrix, Vector};

/// Periodic 2D convolution of a row-major `height × width` image with a
/// normalized point-spread function.
///
/// Diagonalized by the 2D DFT. The spectrum is stored in transposed layout
/// (column index major) so the forward and inverse passes need one transpose each.
#[derive(Clone)]
pub struct Blur2d {
    height: usize,
    width: usize,
    spectrum: Arc<Vec<Complex64>>,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Blur2d {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Blur2d").field("height", &self.height).field("width", &self.width).finish()
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = src[i * cols + j];
        }
    }
    out
}

impl Blur2d {
    /// `kernel` is rescaled to unit sum; its center entry `(kh/2, kw/2)` sits on the
    /// output pixel.
    pub fn new(kernel: &Matrix, height: usize, width: usize) -> Result<Self> {
        let (kh, kw) = kernel.shape();
        if height == 0 || width == 0 || kh == 0 || kw == 0 {
            return Err(Error::InvalidArgument("blur dimensions must be positive".into()));
        }
        if kh > height || kw > width {
            return Err(Error::InvalidArgument(format!("blur kernel {kh}x{kw} larger than image {height}x{width}")));
        }
        let total = kernel.sum();
        if total.abs() < 1e-300 || !total.is_finite() {
            return Err(Error::InvalidArgument("blur kernel must have nonzero finite sum".into()));
        }
        let mut planner = FftPlanner::new();
        let mut op = Blur2d {
            height,
            width,
            spectrum: Arc::new(Vec::new()),
            row_fwd: planner.plan_fft_forward(width),
            row_inv: planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        };
        let (ci, cj) = (kh / 2, kw / 2);
        let mut psf = vec![Complex64::new(0.0, 0.0); height * width];
        for a in 0..kh {
            for b in 0..kw {
                let i = (a + height - ci) % height;
                let j = (b + width - cj) % width;
                psf[i * width + j] += Complex64::new(kernel[(a, b)] / total, 0.0);
            }
        }
        op.spectrum = Arc::new(op.forward(psf));
        Ok(op)
    }

    /// Uniform `size × size` averaging kernel.
    pub fn uniform(size: usize, height: usize, width: usize) -> Result<Self> {
        Self::new(&Matrix::from_element(size, size, 1.0), height, width)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Eigenvalues of the operator in transposed DFT layout.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    fn forward(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        self.row_fwd.process(&mut buf);
        let mut t = transpose(&buf, self.height, self.width);
        self.col_fwd.process(&mut t);
        t
    }

    fn inverse(&self, mut t: Vec<Complex64>) -> Vec<Complex64> {
        self.col_inv.process(&mut t);
        let mut buf = transpose(&t, self.width, self.height);
        self.row_inv.process(&mut buf);
        let scale = 1.0 / (self.height * self.width) as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    fn filter(&self, x: &Vector, multiplier: impl Fn(Complex64) -> Complex64) -> Vector {
        let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut t = self.forward(buf);
        for (v, &s) in t.iter_mut().zip(self.spectrum.iter()) {
            *v *= multiplier(s);
        }
        Vector::from_iterator(x.len(), self.inverse(t).into_iter().map(|c| c.re))
    }

    pub(super) fn apply(&self, x: &Vector) -> Vector {
        self.filter(x, |s| s)
    }

    pub(super) fn adjoint_apply(&self, y: &Vector) -> Vector {
        self.filter(y, |s| s.conj())
    }

    pub(super) fn normal_apply(&self, x: &Vector) -> Vector {
        self.filter(x, |s| Complex64::new(s.norm_sqr(), 0.0))
    }
}
