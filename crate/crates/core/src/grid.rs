//! Frequency-domain sample grids.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Samples of a Fourier transform on xi_k = (k - n/2) / extent, k = 0..n,
/// stored row-major with rows indexed by xi2 and columns by xi1.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqGrid {
    n: usize,
    extent: f64,
    data: Vec<Complex64>,
}

impl FreqGrid {
    pub fn zeros(n: usize, extent: f64) -> Result<Self> {
        check_shape(n, extent)?;
        Ok(FreqGrid { n, extent, data: crate::fft::zeroed(n * n) })
    }

    pub fn from_fn<F: FnMut([f64; 2]) -> Complex64>(n: usize, extent: f64, mut f: F) -> Result<Self> {
        let mut g = Self::zeros(n, extent)?;
        for r in 0..n {
            let x2 = g.freq(r);
            for c in 0..n {
                g.data[r * n + c] = f([g.freq(c), x2]);
            }
        }
        Ok(g)
    }

    pub fn from_data(n: usize, extent: f64, data: Vec<Complex64>) -> Result<Self> {
        check_shape(n, extent)?;
        if data.len() != n * n {
            return Err(Error::Config(format!("expected {} samples, got {}", n * n, data.len())));
        }
        Ok(FreqGrid { n, extent, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Frequency spacing 1/extent.
    pub fn step(&self) -> f64 {
        1.0 / self.extent
    }

    /// Largest represented |xi_k|, n / (2 extent).
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.extent)
    }

    #[inline]
    pub fn freq(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) / self.extent
    }

    #[inline]
    pub fn xi(&self, row: usize, col: usize) -> [f64; 2] {
        [self.freq(col), self.freq(row)]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    /// Riemann sum of |f_hat|^2 over the grid.
    pub fn energy(&self) -> f64 {
        let d = self.step();
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * d * d
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Multiplies every sample by `w(xi)`.
    pub fn map_weight<F: FnMut([f64; 2]) -> f64>(&self, mut w: F) -> FreqGrid {
        let mut out = self.clone();
        for r in 0..self.n {
            for c in 0..self.n {
                let xi = self.xi(r, c);
                out.data[r * self.n + c] *= w(xi);
            }
        }
        out
    }
}

fn check_shape(n: usize, extent: f64) -> Result<()> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(Error::Config(format!("grid size must be a positive multiple of 4, got {n}")));
    }
    if !(extent > 0.0 && extent.is_finite()) {
        return Err(Error::Config(format!("grid extent must be positive, got {extent}")));
    }
    Ok(())
}
