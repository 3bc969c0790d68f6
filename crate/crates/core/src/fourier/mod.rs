//! Band-limited functions on the circle ℝ/ℤ and the elementary Fourier
//! multipliers acting on them.
//!
//! A function is stored through its Fourier coefficients on the lattice
//! 2πℤ: `q(x) = Σ_k q̂(2πk) e^{2πikx}` with `q̂(ξ) = ∫₀¹ e^{-ixξ} q(x) dx`.
//! Coefficients are kept in a dense array over `k ∈ [-M, M]`.

mod grid;
mod io;
mod random;

pub use grid::{GridSamples, SpectralGrid};
pub use io::{CoefficientFile, ModeEntry};
pub use random::{random_rough, random_smooth};

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for Hermitian symmetry on construction.
pub const SYMMETRY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Angular frequency ξ = 2πk of lattice index `k`.
#[inline]
pub fn freq(k: i64) -> f64 {
    2.0 * PI * k as f64
}

/// A real-valued function on the circle with coefficients supported in `[-M, M]`.
///
/// Hermitian symmetry `q̂(-ξ) = conj(q̂(ξ))` holds exactly: every constructor
/// fills the negative half from the nonnegative one.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleFunction {
    band: usize,
    coeffs: Vec<Complex64>,
}

/// A complex-valued band-limited function, e.g. the image of a Cauchy projection.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCircleFunction {
    band: usize,
    coeffs: Vec<Complex64>,
}

/// Which Hardy space a Cauchy projection maps onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HardySign {
    Plus,
    Minus,
}

impl CircleFunction {
    pub fn zero(band: usize) -> Self {
        CircleFunction {
            band,
            coeffs: vec![ZERO; 2 * band + 1],
        }
    }

    pub fn constant(value: f64) -> Self {
        CircleFunction {
            band: 0,
            coeffs: vec![Complex64::new(value, 0.0)],
        }
    }

    /// Builds a function from its coefficients at `k = 0..=band`.
    ///
    /// The imaginary part of the zero mode is dropped; callers that need to
    /// validate it go through [`synthesize`] or [`CircleFunction::try_from_nonnegative`].
    pub fn from_nonnegative(half: &[Complex64]) -> Self {
        assert!(!half.is_empty(), "need at least the zero mode");
        let band = half.len() - 1;
        let mut coeffs = vec![ZERO; 2 * band + 1];
        coeffs[band] = Complex64::new(half[0].re, 0.0);
        for k in 1..=band {
            coeffs[band + k] = half[k];
            coeffs[band - k] = half[k].conj();
        }
        CircleFunction { band, coeffs }
    }

    /// Like [`CircleFunction::from_nonnegative`] but rejects non-finite
    /// coefficients and a zero mode that is not real.
    pub fn try_from_nonnegative(half: &[Complex64]) -> Result<Self> {
        if half.is_empty() {
            return Err(Error::InvalidParameter {
                name: "modes",
                reason: "at least the zero mode is required".into(),
            });
        }
        for (k, c) in half.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite { k: k as i64 });
            }
        }
        let scale = half.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if half[0].im.abs() > SYMMETRY_TOL * scale {
            return Err(Error::SymmetryViolation {
                k: 0,
                defect: half[0].im.abs() / scale,
            });
        }
        Ok(Self::from_nonnegative(half))
    }

    pub fn band_limit(&self) -> usize {
        self.band
    }

    /// Coefficient q̂(2πk); zero outside the band.
    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        let m = self.band as i64;
        if k.abs() > m {
            ZERO
        } else {
            self.coeffs[(k + m) as usize]
        }
    }

    /// Coefficients for `k = 0..=M`.
    pub fn nonnegative(&self) -> &[Complex64] {
        &self.coeffs[self.band..]
    }

    /// Dense coefficients over `[-M, M]`.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(k, q̂(2πk))` pairs over the full band.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let m = self.band as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (i as i64 - m, *c))
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[self.band].re
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean() == 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// L² norm on the unit circle (Plancherel).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Point evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = self.mean();
        for (k, c) in self.nonnegative().iter().enumerate().skip(1) {
            let phase = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x);
            acc += 2.0 * (c * phase).re;
        }
        acc
    }

    /// Same function stored with band limit `band` (zero-padded or truncated).
    pub fn with_band(&self, band: usize) -> Self {
        let mut half = vec![ZERO; band + 1];
        for (k, c) in self.nonnegative().iter().enumerate().take(band + 1) {
            half[k] = *c;
        }
        Self::from_nonnegative(&half)
    }

    /// Drops trailing modes whose modulus is below `rel_tol` times the largest one.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let half = self.nonnegative();
        let scale = half.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut top = 0;
        for (k, c) in half.iter().enumerate() {
            if c.norm() > rel_tol * scale {
                top = k;
            }
        }
        self.with_band(top)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CircleFunction {
            band: self.band,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &CircleFunction) -> Self {
        let band = self.band.max(other.band);
        let half: Vec<Complex64> = (0..=band as i64)
            .map(|k| self.coeff(k) + other.coeff(k))
            .collect();
        Self::from_nonnegative(&half)
    }

    pub fn sub(&self, other: &CircleFunction) -> Self {
        self.add(&other.scaled(-1.0))
    }

    /// Applies a real-even multiplier `m(ξ)` with `m(-ξ) = conj(m(ξ))`, given on `k ≥ 0`.
    pub(crate) fn map_nonnegative(&self, mut symbol: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let half: Vec<Complex64> = self
            .nonnegative()
            .iter()
            .enumerate()
            .map(|(k, c)| symbol(k as i64, *c))
            .collect();
        Self::from_nonnegative(&half)
    }

    /// Translation `x ↦ f(x - a)`.
    pub fn translate(&self, a: f64) -> Self {
        self.map_nonnegative(|k, c| c * Complex64::from_polar(1.0, -freq(k) * a))
    }

    /// Reflection `x ↦ f(-x)`.
    pub fn reflect(&self) -> Self {
        self.map_nonnegative(|_, c| c.conj())
    }

    pub fn to_complex(&self) -> ComplexCircleFunction {
        ComplexCircleFunction {
            band: self.band,
            coeffs: self.coeffs.clone(),
        }
    }
}

impl ComplexCircleFunction {
    pub fn zero(band: usize) -> Self {
        ComplexCircleFunction {
            band,
            coeffs: vec![ZERO; 2 * band + 1],
        }
    }

    /// Builds from a dense coefficient array over `[-M, M]` (length must be odd).
    pub fn from_dense(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "dense coefficient array must have odd length");
        ComplexCircleFunction {
            band: coeffs.len() / 2,
            coeffs,
        }
    }

    /// The pure exponential `e^{2πikx}`.
    pub fn exponential(k: i64) -> Self {
        let band = k.unsigned_abs() as usize;
        let mut f = Self::zero(band);
        f.coeffs[(k + band as i64) as usize] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn band_limit(&self) -> usize {
        self.band
    }

    #[inline]
    pub fn coeff(&self, k: i64) -> Complex64 {
        let m = self.band as i64;
        if k.abs() > m {
            ZERO
        } else {
            self.coeffs[(k + m) as usize]
        }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn add(&self, other: &ComplexCircleFunction) -> Self {
        let band = self.band.max(other.band) as i64;
        Self::from_dense((-band..=band).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    /// Converts back to a real function if the coefficients are Hermitian.
    pub fn to_real(&self) -> Result<CircleFunction> {
        let mut modes = BTreeMap::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            modes.insert(i as i64 - self.band as i64, *c);
        }
        synthesize(&modes)
    }
}

/// Builds a validated real function from a sparse coefficient map.
///
/// Pairs `(k, -k)` are averaged as `½(q̂(k) + conj(q̂(-k)))`. A pair whose
/// defect exceeds [`SYMMETRY_TOL`] relative to the largest coefficient is
/// rejected, as is any non-finite value.
pub fn synthesize(modes: &BTreeMap<i64, Complex64>) -> Result<CircleFunction> {
    for (&k, c) in modes {
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::NonFinite { k });
        }
    }
    let band = modes.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
    let scale = modes.values().map(|c| c.norm()).fold(0.0, f64::max);
    let get = |k: i64| modes.get(&k).copied().unwrap_or(ZERO);

    let mut half = vec![ZERO; band + 1];
    for k in 0..=band as i64 {
        let a = get(k);
        let b = get(-k).conj();
        let defect = (a - b).norm();
        if defect > SYMMETRY_TOL * scale {
            return Err(Error::SymmetryViolation {
                k,
                defect: defect / scale,
            });
        }
        half[k as usize] = (a + b) * 0.5;
    }
    Ok(CircleFunction::from_nonnegative(&half))
}

fn sgn(k: i64) -> f64 {
    (k.signum()) as f64
}

/// Hilbert transform, `(Hf)^(ξ) = -i sgn(ξ) f̂(ξ)`.
pub fn hilbert_transform(f: &CircleFunction) -> CircleFunction {
    f.map_nonnegative(|k, c| Complex64::new(0.0, -sgn(k)) * c)
}

/// Cauchy projection `C_± f = ½(f ± iHf)`.
///
/// The zero mode goes to half of itself under either sign, so that
/// `C₊ + C₋` is the identity on all of L².
pub fn cauchy_project(f: &CircleFunction, sign: HardySign) -> ComplexCircleFunction {
    let m = f.band as i64;
    let keep = |k: i64| match sign {
        HardySign::Plus => k > 0,
        HardySign::Minus => k < 0,
    };
    let coeffs = (-m..=m)
        .map(|k| {
            if k == 0 {
                f.coeff(0) * 0.5
            } else if keep(k) {
                f.coeff(k)
            } else {
                ZERO
            }
        })
        .collect();
    ComplexCircleFunction::from_dense(coeffs)
}

/// Cauchy projection of a complex function; same zero-mode convention as [`cauchy_project`].
pub fn cauchy_project_complex(f: &ComplexCircleFunction, sign: HardySign) -> ComplexCircleFunction {
    let m = f.band as i64;
    let coeffs = (-m..=m)
        .map(|k| match (k.signum(), sign) {
            (0, _) => f.coeff(0) * 0.5,
            (1, HardySign::Plus) | (-1, HardySign::Minus) => f.coeff(k),
            _ => ZERO,
        })
        .collect();
    ComplexCircleFunction::from_dense(coeffs)
}

/// `f̂(ξ) ↦ iξ f̂(ξ)`.
pub fn derivative(f: &CircleFunction) -> CircleFunction {
    f.map_nonnegative(|k, c| Complex64::new(0.0, freq(k)) * c)
}

/// Pointwise product of two real functions.
///
/// With `dealias` off the result is the exact coefficient convolution with
/// band `M_f + M_g`. With `dealias` on the product is formed on a grid of at
/// least `3·max(M_f, M_g) + 1` points and truncated back to `max(M_f, M_g)`,
/// which is alias-free for the retained modes.
pub fn pointwise_product(f: &CircleFunction, g: &CircleFunction, dealias: bool) -> CircleFunction {
    if dealias {
        let band = f.band.max(g.band);
        let n = (3 * band + 1).next_power_of_two().max(2);
        let fg = GridSamples::from_function(f, n).expect("grid size chosen large enough");
        let gg = GridSamples::from_function(g, n).expect("grid size chosen large enough");
        let prod: Vec<f64> = fg
            .values()
            .iter()
            .zip(gg.values())
            .map(|(a, b)| a * b)
            .collect();
        GridSamples::new(prod)
            .expect("power-of-two grid")
            .to_function(band)
            .expect("band fits the grid")
    } else {
        direct_convolution(f, g)
    }
}

fn direct_convolution(f: &CircleFunction, g: &CircleFunction) -> CircleFunction {
    let mf = f.band as i64;
    let mg = g.band as i64;
    let band = (mf + mg) as usize;
    let mut half = vec![ZERO; band + 1];
    for (k, out) in half.iter_mut().enumerate() {
        let k = k as i64;
        let lo = (-mf).max(k - mg);
        let hi = mf.min(k + mg);
        let mut acc = ZERO;
        for i in lo..=hi {
            acc += f.coeff(i) * g.coeff(k - i);
        }
        *out = acc;
    }
    CircleFunction::from_nonnegative(&half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cos1() -> CircleFunction {
        CircleFunction::from_nonnegative(&[ZERO, c(0.5, 0.0)])
    }

    fn sin1() -> CircleFunction {
        CircleFunction::from_nonnegative(&[ZERO, c(0.0, -0.5)])
    }

    fn assert_close(a: &CircleFunction, b: &CircleFunction, tol: f64) {
        let band = a.band_limit().max(b.band_limit()) as i64;
        for k in -band..=band {
            assert!(
                (a.coeff(k) - b.coeff(k)).norm() <= tol,
                "k={k}: {} vs {}",
                a.coeff(k),
                b.coeff(k)
            );
        }
    }

    #[test]
    fn synthesize_examples() {
        let z = synthesize(&BTreeMap::new()).unwrap();
        assert!(z.is_zero());

        let modes = BTreeMap::from([(1, c(0.5, 0.0)), (-1, c(0.5, 0.0))]);
        let f = synthesize(&modes).unwrap();
        assert_eq!(f, cos1());
        assert_abs_diff_eq!(f.eval(0.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval(0.25), 0.0, epsilon = 1e-15);

        let bad = BTreeMap::from([(1, c(0.5, 0.0)), (-1, c(0.4, 0.0))]);
        assert!(matches!(synthesize(&bad), Err(Error::SymmetryViolation { k: 1, .. })));

        let nan = BTreeMap::from([(2, c(f64::NAN, 0.0))]);
        assert!(matches!(synthesize(&nan), Err(Error::NonFinite { k: 2 })));
    }

    #[test]
    fn synthesize_averages_small_defects() {
        let modes = BTreeMap::from([(1, c(0.5, 1e-14)), (-1, c(0.5, 0.0))]);
        let f = synthesize(&modes).unwrap();
        assert_eq!(f.coeff(1), f.coeff(-1).conj());
        assert_abs_diff_eq!(f.coeff(1).im, 5e-15, epsilon = 1e-20);
    }

    #[test]
    fn hilbert_examples() {
        assert_close(&hilbert_transform(&cos1()), &sin1(), 0.0);
        assert!(hilbert_transform(&CircleFunction::constant(1.0)).is_zero());
        assert_close(&hilbert_transform(&sin1()), &cos1().scaled(-1.0), 0.0);
    }

    #[test]
    fn cauchy_examples() {
        let p = cauchy_project(&cos1(), HardySign::Plus);
        assert_eq!(p.coeff(1), c(0.5, 0.0));
        assert_eq!(p.coeff(-1), ZERO);

        let e = ComplexCircleFunction::exponential(1);
        assert_eq!(cauchy_project_complex(&e, HardySign::Plus), e);

        // C₊f + C₋f = f, here also with a nonzero mean
        let f = CircleFunction::from_nonnegative(&[c(0.3, 0.0), c(0.1, 0.2), c(-0.4, 0.05)]);
        let sum = cauchy_project(&f, HardySign::Plus).add(&cauchy_project(&f, HardySign::Minus));
        assert_eq!(sum, f.to_complex());
    }

    #[test]
    fn derivative_examples() {
        assert!(derivative(&CircleFunction::constant(3.0)).is_zero());
        assert_close(&derivative(&cos1()), &sin1().scaled(-2.0 * PI), 1e-15);
        assert_close(&derivative(&sin1()), &cos1().scaled(2.0 * PI), 1e-15);
    }

    #[test]
    fn product_examples() {
        let f = cos1();
        for dealias in [false, true] {
            let zero = CircleFunction::zero(3);
            assert!(pointwise_product(&f, &zero, dealias).l2_norm() < 1e-16);
        }
        let sq = pointwise_product(&f, &f, false);
        let expected = CircleFunction::from_nonnegative(&[c(0.5, 0.0), ZERO, c(0.25, 0.0)]);
        assert_close(&sq, &expected, 1e-16);
        // dealiased product keeps band max(M_f, M_g) = 1: the cos(4πx) part is cut
        let sq = pointwise_product(&f, &f, true);
        assert_eq!(sq.band_limit(), 1);
        assert_abs_diff_eq!(sq.coeff(0).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn translate_moves_peak() {
        let f = cos1().translate(0.25);
        assert_abs_diff_eq!(f.eval(0.25), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn trimmed_drops_tail() {
        let f = CircleFunction::from_nonnegative(&[ZERO, c(1.0, 0.0), c(1e-20, 0.0), ZERO]);
        assert_eq!(f.trimmed(1e-16).band_limit(), 1);
    }

    #[test]
    fn complex_to_real_round_trip() {
        let f = CircleFunction::from_nonnegative(&[c(0.3, 0.0), c(0.1, 0.2)]);
        assert_eq!(f.to_complex().to_real().unwrap(), f);
        assert!(ComplexCircleFunction::exponential(1).to_real().is_err());
    }
}
