use crate::error::{Error, Result};
use crate::Vector;

/// Discrete gradient of a row-major `height × width` image.
///
/// The output stacks horizontal differences (along a row) followed by vertical
/// differences (along a column). The last difference in each direction is zero,
/// which is the replicate boundary.
#[derive(Clone, Debug)]
pub struct Grad2d {
    height: usize,
    width: usize,
}

impl Grad2d {
    pub fn new(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidArgument("image dimensions must be positive".into()));
        }
        Ok(Grad2d { height, width })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub(super) fn apply(&self, x: &Vector) -> Vector {
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let mut out = Vector::zeros(2 * n);
        for i in 0..h {
            for j in 0..w {
                let p = i * w + j;
                if j + 1 < w {
                    out[p] = x[p + 1] - x[p];
                }
                if i + 1 < h {
                    out[n + p] = x[p + w] - x[p];
                }
            }
        }
        out
    }

    /// Negative divergence matching the forward-difference boundary.
    pub(super) fn adjoint_apply(&self, y: &Vector) -> Vector {
        let (h, w) = (self.height, self.width);
        let n = h * w;
        let mut out = Vector::zeros(n);
        for i in 0..h {
            for j in 0..w {
                let p = i * w + j;
                let mut v = 0.0;
                if j + 1 < w {
                    v -= y[p];
                }
                if j > 0 {
                    v += y[p - 1];
                }
                if i + 1 < h {
                    v -= y[n + p];
                }
                if i > 0 {
                    v += y[n + p - w];
                }
                out[p] = v;
            }
        }
        out
    }
}
