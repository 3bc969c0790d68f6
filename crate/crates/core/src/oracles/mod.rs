//! Brute-force counterparts of the fast paths, plus verifiers for the trace
//! identities behind conservation of α.
//!
//! Nothing here calls into `kappa::build_a` except where a verifier is meant
//! to exercise it (the head identity). Kernels are assembled from scratch by
//! [`kernel_matrix`] so that a bug in the fast assembly cannot cancel out.

mod besov;
mod identities;
mod line;
mod quadrature;
mod report;

pub use besov::{
    besov_building_check, besov_norm_direct, building_corpus_sample, calibrate_building_constants,
    calibrate_equivalence, BesovBuilding, BuildingConstants, EquivalenceInterval,
};
pub use identities::{
    commutator_residual, convergence_sweep, verify_commutator_identity, verify_head_identity,
    verify_lemma1_bounds, verify_lemma1_operator, verify_telescope_identity, CommutatorAssembly,
    ConvergenceSweep, TRUNCATION_TOL,
};
pub use line::{line_hs_identity_check, line_integrals, LineIntegrals, SpectralProfile, LINE_TOL};
pub use quadrature::integrate;

pub use report::{IdentityReport, ReportBatch, ReportParams, ReportSummary};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::CircleFunction;

/// `ξ_j = 2πj`, spelled out instead of going through `fourier::freq`.
fn xi(j: i64) -> f64 {
    2.0 * PI * j as f64
}

/// `K[j,k] = ĝ(j-k)/√((κ+ξ_j)(κ+ξ_k))` for `j, k = 1..=dim`.
pub fn kernel_matrix(g: impl Fn(i64) -> Complex64, kappa: f64, dim: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for j in 1..=dim as i64 {
        for k in 1..=dim as i64 {
            let w = ((kappa + xi(j)) * (kappa + xi(k))).sqrt();
            m[(j as usize - 1, k as usize - 1)] = g(j - k) / w;
        }
    }
    m
}

/// `Σ_{j,k=1..M⁺} |q̂(ξ_j-ξ_k)|² / ((κ+ξ_j)(κ+ξ_k))`, the squared
/// Hilbert-Schmidt norm by direct double summation.
pub fn hs_double_sum(q: &CircleFunction, kappa: f64, dim: usize) -> f64 {
    let mut acc = 0.0;
    for j in 1..=dim as i64 {
        for k in 1..=dim as i64 {
            let c = q.coeff(j - k);
            if c.re != 0.0 || c.im != 0.0 {
                acc += c.norm_sqr() / ((kappa + xi(j)) * (kappa + xi(k)));
            }
        }
    }
    acc
}

/// Untruncated `‖A(κ;q)‖²_{I₂}` for mean-zero `q`.
///
/// For `d > 0` the row sum telescopes:
/// `Σ_{j≥1} 1/((a+j)(a+j+d)) = (1/d) Σ_{j=1}^{d} 1/(a+j)` with `a = κ/2π`.
pub fn hs_squared_exact(q: &CircleFunction, kappa: f64) -> Result<f64> {
    if !q.is_mean_zero() {
        return Err(Error::NonZeroMean { mean: q.mean() });
    }
    let a = kappa / (2.0 * PI);
    let mut harmonic = 0.0;
    let mut acc = 0.0;
    for d in 1..=q.band_limit() as i64 {
        harmonic += 1.0 / (a + d as f64);
        let row = harmonic / (d as f64 * 4.0 * PI * PI);
        acc += 2.0 * q.coeff(d).norm_sqr() * row;
    }
    Ok(acc)
}

/// `tr(A^ℓ)` as an explicit ℓ-fold index sum. Cost `(M⁺)^ℓ`.
pub fn trace_direct_sum(q: &CircleFunction, kappa: f64, ell: usize, dim: usize) -> Result<Complex64> {
    if !(2..=3).contains(&ell) {
        return Err(Error::InvalidParameter {
            name: "ell",
            reason: format!("direct sums are provided for ℓ ∈ {{2, 3}}, got {ell}"),
        });
    }
    if dim > 32 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("M⁺ = {dim} exceeds 32"),
        });
    }
    let n = dim as i64;
    let k = |a: i64, b: i64| q.coeff(a - b) / ((kappa + xi(a)) * (kappa + xi(b))).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..=n {
        for b in 1..=n {
            if ell == 2 {
                acc += k(a, b) * k(b, a);
            } else {
                let kab = k(a, b);
                for c in 1..=n {
                    acc += kab * k(b, c) * k(c, a);
                }
            }
        }
    }
    Ok(acc)
}

/// Coefficients of a real function held as `k ↦ ĝ(k)` on `|k| ≤ band`.
#[derive(Clone, Debug)]
pub(crate) struct Modes {
    band: i64,
    coeffs: Vec<Complex64>,
}

impl Modes {
    pub(crate) fn from_function(q: &CircleFunction) -> Self {
        let band = q.band_limit() as i64;
        Modes {
            band,
            coeffs: (-band..=band).map(|k| q.coeff(k)).collect(),
        }
    }

    fn from_fn(band: i64, g: impl Fn(i64) -> Complex64) -> Self {
        Modes {
            band,
            coeffs: (-band..=band).map(g).collect(),
        }
    }

    pub(crate) fn get(&self, k: i64) -> Complex64 {
        if k.abs() > self.band {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.band) as usize]
        }
    }

    /// Full convolution, no truncation.
    pub(crate) fn product(&self, other: &Modes) -> Modes {
        let band = self.band + other.band;
        Modes::from_fn(band, |k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -self.band..=self.band {
                acc += self.get(m) * other.get(k - m);
            }
            acc
        })
    }

    pub(crate) fn multiplier(&self, symbol: impl Fn(f64) -> Complex64) -> Modes {
        Modes::from_fn(self.band, |k| symbol(xi(k)) * self.get(k))
    }
}
