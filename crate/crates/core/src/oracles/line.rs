//! The Hilbert-Schmidt identity on the line, where it is exact:
//!
//! ```text
//! ∬_{ξ,η≥0} |q̂(ξ-η)|² / ((κ+ξ)(κ+η)) dη dξ = ∫ log(1+|ξ|/κ)/|ξ| · |q̂(ξ)|² dξ
//! ```
//!
//! The left side is integrated in the coordinates `d = ξ - η` and
//! `u = min(ξ, η)`, with `u = κt/(1-t)` mapping `[0, ∞)` onto `[0, 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quadrature::integrate;
use super::report::{IdentityReport, ReportParams};
use crate::error::{Error, Result};

/// Tolerance on `|2D - 1D| / 1D`.
pub const LINE_TOL: f64 = 1e-6;
const QUAD_RTOL: f64 = 1e-12;
const TAIL_RTOL: f64 = 1e-10;
const OUTER_PANELS: usize = 16;

/// A Fourier transform on the line with `q̂(-ξ) = conj(q̂(ξ))` and
/// exponentially decaying modulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectralProfile {
    /// `q̂(ξ) = a·exp(-ξ²/(2σ²))`.
    Gaussian { amplitude: f64, width: f64 },
    /// Two Lorentzians centred at `±c`: `q̂(ξ) = 2a·exp(-b|ξ|)·cos(cξ)`.
    LorentzianPair {
        amplitude: f64,
        decay: f64,
        separation: f64,
    },
}

impl SpectralProfile {
    pub fn eval(&self, xi: f64) -> Complex64 {
        match *self {
            SpectralProfile::Gaussian { amplitude, width } => {
                Complex64::new(amplitude * (-xi * xi / (2.0 * width * width)).exp(), 0.0)
            }
            SpectralProfile::LorentzianPair {
                amplitude,
                decay,
                separation,
            } => Complex64::new(2.0 * amplitude * (-decay * xi.abs()).exp() * (separation * xi).cos(), 0.0),
        }
    }

    fn power(&self, xi: f64) -> f64 {
        self.eval(xi).norm_sqr()
    }

    /// `∫ |q̂|²` over the line.
    pub fn mass(&self) -> f64 {
        match *self {
            SpectralProfile::Gaussian { amplitude, width } => amplitude * amplitude * width * PI.sqrt(),
            SpectralProfile::LorentzianPair {
                amplitude: a,
                decay: b,
                separation: c,
            } => 4.0 * a * a * (1.0 / (2.0 * b) + b / (2.0 * (b * b + c * c))),
        }
    }

    /// Upper bound for `∫_{|ξ|>Ξ} |q̂|²`.
    pub fn tail_mass(&self, cutoff: f64) -> f64 {
        match *self {
            SpectralProfile::Gaussian { amplitude, width } => {
                amplitude * amplitude * width * width / cutoff * (-(cutoff / width).powi(2)).exp()
            }
            SpectralProfile::LorentzianPair { amplitude, decay, .. } => {
                4.0 * amplitude * amplitude * (-2.0 * decay * cutoff).exp() / decay
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SpectralProfile::Gaussian { amplitude, width } => amplitude.is_finite() && width > 0.0 && width.is_finite(),
            SpectralProfile::LorentzianPair {
                amplitude,
                decay,
                separation,
            } => amplitude.is_finite() && decay > 0.0 && decay.is_finite() && separation.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "profile",
                reason: format!("{self:?} has non-finite or non-positive shape parameters"),
            })
        }
    }

    /// Smallest `Ξ = 2^n` whose discarded tail is below `TAIL_RTOL` of the
    /// weakest possible retained contribution.
    fn cutoff(&self, kappa: f64) -> Result<f64> {
        let mass = self.mass();
        let mut cutoff: f64 = 1.0;
        while cutoff < 1e8 {
            let tail = self.tail_mass(cutoff);
            let weight_floor = (cutoff / kappa).ln_1p() / cutoff;
            if tail / kappa <= TAIL_RTOL * weight_floor * (mass - tail).max(0.0) {
                return Ok(cutoff);
            }
            cutoff *= 2.0;
        }
        Err(Error::Quadrature("profile tail does not decay".into()))
    }
}

/// `log(1+x)/x` with its limit 1 at the origin.
fn log1p_over(x: f64) -> f64 {
    if x < 1e-8 {
        1.0 - 0.5 * x
    } else {
        x.ln_1p() / x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineIntegrals {
    pub double_integral: f64,
    pub single_integral: f64,
    pub cutoff: f64,
}

fn panels(lo: f64, hi: f64, f: &impl Fn(f64) -> f64) -> Result<f64> {
    let h = (hi - lo) / OUTER_PANELS as f64;
    (0..OUTER_PANELS).try_fold(0.0, |acc, i| {
        Ok(acc + integrate(f, lo + i as f64 * h, lo + (i + 1) as f64 * h, QUAD_RTOL)?)
    })
}

/// Both sides of the line identity.
pub fn line_integrals(p: &SpectralProfile, kappa: f64) -> Result<LineIntegrals> {
    p.validate()?;
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: format!("{kappa} is below 1"),
        });
    }
    let cutoff = p.cutoff(kappa)?;

    let single = |xi: f64| log1p_over(xi.abs() / kappa) / kappa * p.power(xi);
    let single_integral = panels(-cutoff, 0.0, &single)? + panels(0.0, cutoff, &single)?;

    // inner integral over u = min(ξ, η) ≥ 0 at fixed d = ξ - η
    let inner = |d: f64| -> Result<f64> {
        let g = |t: f64| {
            let u = kappa * t / (1.0 - t);
            let jac = kappa / ((1.0 - t) * (1.0 - t));
            jac / ((kappa + d.abs() + u) * (kappa + u))
        };
        integrate(&g, 0.0, 1.0, QUAD_RTOL)
    };
    let failure = std::cell::Cell::new(None);
    let outer = |d: f64| match inner(d) {
        Ok(v) => v * p.power(d),
        Err(e) => {
            failure.set(Some(e.to_string()));
            f64::NAN
        }
    };
    let double = panels(-cutoff, 0.0, &outer).and_then(|a| Ok(a + panels(0.0, cutoff, &outer)?));
    if let Some(msg) = failure.take() {
        return Err(Error::Quadrature(msg));
    }
    Ok(LineIntegrals {
        double_integral: double?,
        single_integral,
        cutoff,
    })
}

/// Relative gap between the double and single integrals, tolerance 1e-6.
pub fn line_hs_identity_check(p: &SpectralProfile, kappa: f64) -> Result<IdentityReport> {
    let v = line_integrals(p, kappa)?;
    Ok(IdentityReport::new(
        "line",
        (v.double_integral - v.single_integral).abs(),
        v.single_integral,
        LINE_TOL,
        ReportParams {
            kappa: Some(kappa),
            ..Default::default()
        },
    ))
}
