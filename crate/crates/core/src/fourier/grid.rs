use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::CircleFunction;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// Real samples `q(j/n)`, `j = 0..n`, on a power-of-two grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    values: Vec<f64>,
}

impl GridSamples {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("grid size {} is not a power of two", values.len()),
            });
        }
        Ok(GridSamples { values })
    }

    /// Samples `f` on `n` equispaced points. Requires `n ≥ 2M+1`.
    pub fn from_function(f: &CircleFunction, n: usize) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 * f.band_limit() + 1 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("grid size {n} cannot carry band {}", f.band_limit()),
            });
        }
        let mut grid = SpectralGrid::new(n);
        let mut values = vec![0.0; n];
        grid.to_grid(f.nonnegative(), &mut values);
        Ok(GridSamples { values })
    }

    /// Recovers the coefficients `k = -band..=band`. Requires `n ≥ 2·band+1`.
    pub fn to_function(&self, band: usize) -> Result<CircleFunction> {
        let n = self.values.len();
        if n < 2 * band + 1 {
            return Err(Error::InvalidParameter {
                name: "band",
                reason: format!("band {band} exceeds what {n} samples resolve"),
            });
        }
        let mut grid = SpectralGrid::new(n);
        let mut half = vec![Complex64::new(0.0, 0.0); band + 1];
        grid.from_grid(&self.values, &mut half);
        Ok(CircleFunction::from_nonnegative(&half))
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Reusable FFT workspace for moving real functions between coefficients
/// and grid samples.
pub struct SpectralGrid {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
    values: Vec<f64>,
}

impl SpectralGrid {
    pub fn new(n: usize) -> Self {
        let (fwd, inv) = plans(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        SpectralGrid {
            n,
            fwd,
            inv,
            buf: vec![Complex64::new(0.0, 0.0); n],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
            values: vec![0.0; n],
        }
    }

    /// Smallest power-of-two grid on which products of two band-`band`
    /// functions are exact for the retained modes.
    pub fn for_quadratic(band: usize) -> Self {
        Self::new((3 * band + 1).next_power_of_two().max(2))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Synthesizes samples from nonnegative coefficients (`half[k]`, `k = 0..=M`).
    pub fn to_grid(&mut self, half: &[Complex64], values: &mut [f64]) {
        let n = self.n;
        debug_assert!(2 * (half.len() - 1) < n);
        self.buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        self.buf[0] = Complex64::new(half[0].re, 0.0);
        for (k, c) in half.iter().enumerate().skip(1) {
            self.buf[k] = *c;
            self.buf[n - k] = c.conj();
        }
        self.inv.process_with_scratch(&mut self.buf, &mut self.scratch);
        for (v, c) in values.iter_mut().zip(&self.buf) {
            *v = c.re;
        }
    }

    /// Analyzes samples into nonnegative coefficients, filling `half.len()` modes.
    pub fn from_grid(&mut self, values: &[f64], half: &mut [Complex64]) {
        let n = self.n;
        for (c, v) in self.buf.iter_mut().zip(values) {
            *c = Complex64::new(*v, 0.0);
        }
        self.fwd.process_with_scratch(&mut self.buf, &mut self.scratch);
        let inv_n = 1.0 / n as f64;
        for (k, out) in half.iter_mut().enumerate() {
            *out = self.buf[k] * inv_n;
        }
        half[0].im = 0.0;
    }

    /// Coefficients of `f²` for `k = 0..half.len()`, computed on the grid.
    pub fn square(&mut self, half: &[Complex64], out: &mut [Complex64]) {
        let mut values = std::mem::take(&mut self.values);
        self.to_grid(half, &mut values);
        values.iter_mut().for_each(|v| *v *= *v);
        self.from_grid(&values, out);
        self.values = values;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::random_rough;

    #[test]
    fn round_trip_on_band_limited_input() {
        let f = random_rough(-0.3, 5, 20, 1.0).unwrap();
        let g = GridSamples::from_function(&f, 64).unwrap();
        let back = g.to_function(20).unwrap();
        for k in -20..=20 {
            assert!((back.coeff(k) - f.coeff(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        let f = random_rough(-0.3, 5, 20, 1.0).unwrap();
        assert!(GridSamples::from_function(&f, 32).is_err());
        assert!(GridSamples::from_function(&f, 48).is_err());
        assert!(GridSamples::new(vec![0.0; 3]).is_err());
    }

    #[test]
    fn samples_match_point_evaluation() {
        let f = random_rough(-0.2, 9, 6, 1.0).unwrap();
        let g = GridSamples::from_function(&f, 16).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            assert!((v - f.eval(j as f64 / 16.0)).abs() < 1e-13);
        }
    }
}
