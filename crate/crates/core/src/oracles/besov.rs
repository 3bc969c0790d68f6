//! Building `‖f‖_{B^{s,2}_r}` one frequency scale at a time from the `T_κ`
//! form at `κ = κ₀N`:
//!
//! ```text
//! L = ‖f‖^r,   R = Σ_{N = 1, 2, 4, …} N^{rs} (κ₀N ⟨f, T_{κ₀N} f⟩)^{r/2},   B = κ₀^{-rs} ‖f‖^r
//! ```
//!
//! with `L ≲ R ≲ B`. For `r = ∞` the sum becomes a supremum and the powers
//! are dropped.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{IdentityReport, ReportParams};
use super::{hs_squared_exact, xi};
use crate::error::{Error, Result};
use crate::fourier::CircleFunction;
use crate::norms::Summability;

/// `κ₀N` must pass this multiple of the top frequency before the rest of the
/// sum is replaced by its geometric limit.
const SATURATION: f64 = 1e8;

/// Direct block-by-block Besov norm: `|ξ| < 2` is the unweighted low block,
/// then `N ≤ |ξ| < 2N` for `N = 2, 4, …` weighted by `N^s`.
pub fn besov_norm_direct(f: &CircleFunction, s: f64, r: Summability) -> f64 {
    let mut blocks: Vec<f64> = Vec::new();
    for (k, c) in f.modes() {
        let x = xi(k).abs();
        let j = if x < 2.0 { 0 } else { x.log2().floor() as usize };
        if blocks.len() <= j {
            blocks.resize(j + 1, 0.0);
        }
        blocks[j] += c.norm_sqr();
    }
    let weighted = blocks
        .iter()
        .enumerate()
        .map(|(j, sq)| if j == 0 { 1.0 } else { 2f64.powi(j as i32).powf(s) } * sq.sqrt());
    match r {
        Summability::Infinite => weighted.fold(0.0, f64::max),
        Summability::Finite(r) => weighted.map(|w| w.powf(r)).sum::<f64>().powf(1.0 / r),
    }
}

/// `⟨f, T_κ f⟩` summed directly over the coefficients.
fn t_form(f: &CircleFunction, kappa: f64) -> f64 {
    f.modes()
        .map(|(k, c)| {
            let x = xi(k).abs();
            (2.0 + x / kappa).ln() / (kappa * kappa + x * x).sqrt() * c.norm_sqr()
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesovBuilding {
    pub s: f64,
    pub r: Summability,
    pub kappa0: f64,
    /// `‖f‖^r` (or `‖f‖` when `r = ∞`).
    pub l: f64,
    pub r_sum: f64,
    /// `κ₀^{-rs} ‖f‖^r` (or `κ₀^{-s} ‖f‖`).
    pub b: f64,
    /// `L / R`, zero for `f = 0`.
    pub lower_ratio: f64,
    /// `R / B`, zero for `f = 0`.
    pub upper_ratio: f64,
}

fn check_params(s: f64, r: Summability, kappa0: f64) -> Result<()> {
    if !(s > -0.5 && s < 0.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: format!("{s} is outside (-1/2, 0)"),
        });
    }
    if let Summability::Finite(r) = r {
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("{r} is below 1"),
            });
        }
    }
    if !(kappa0 >= 1.0 && kappa0.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "kappa0",
            reason: format!("{kappa0} is below 1"),
        });
    }
    Ok(())
}

/// The three quantities of the scale-by-scale construction.
pub fn besov_building_check(f: &CircleFunction, s: f64, r: Summability, kappa0: f64) -> Result<BesovBuilding> {
    check_params(s, r, kappa0)?;
    let norm = besov_norm_direct(f, s, r);
    let top = xi(f.band_limit().max(1) as i64);
    let mut n = 1.0f64;
    let mut terms = Vec::new();
    while kappa0 * n < SATURATION * top {
        let scale = kappa0 * n * t_form(f, kappa0 * n);
        terms.push((n, scale));
        n *= 2.0;
    }
    let (l, r_sum, b) = match r {
        Summability::Infinite => {
            let sup = terms.iter().map(|&(n, c)| n.powf(s) * c.sqrt()).fold(0.0, f64::max);
            (norm, sup, kappa0.powf(-s) * norm)
        }
        Summability::Finite(r) => {
            let head: f64 = terms.iter().map(|&(n, c)| n.powf(r * s) * c.powf(r / 2.0)).sum();
            // beyond saturation κ₀N⟨f,T f⟩ → log 2 · ‖f‖²_{L²}
            let limit = std::f64::consts::LN_2 * f.l2_norm().powi(2);
            let ratio = 2f64.powf(r * s);
            let last = terms.last().map_or(1.0, |&(n, _)| n);
            let tail = limit.powf(r / 2.0) * last.powf(r * s) * ratio / (1.0 - ratio);
            (norm.powf(r), head + tail, kappa0.powf(-r * s) * norm.powf(r))
        }
    };
    let div = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a / b };
    Ok(BesovBuilding {
        s,
        r,
        kappa0,
        l,
        r_sum,
        b,
        lower_ratio: div(l, r_sum),
        upper_ratio: div(r_sum, b),
    })
}

/// Recorded constants with `L ≤ C₁ R` and `R ≤ C₂ B` over a corpus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildingConstants {
    pub s: f64,
    pub r: Summability,
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
}

impl BuildingConstants {
    /// Residual is the larger of `L/(C₁R)` and `R/(C₂B)`; passes at ≤ 1.
    pub fn report(&self, b: &BesovBuilding) -> IdentityReport {
        let used = (b.lower_ratio / self.c1).max(b.upper_ratio / self.c2);
        IdentityReport::new(
            "besov",
            used,
            1.0,
            1.0,
            ReportParams {
                kappa: Some(b.kappa0),
                ..Default::default()
            },
        )
    }
}

/// Random mean-zero data with `|f̂(k)| ∝ k^{-(s+½)}` jittered by a factor in
/// `[½, 3/2]`, band `8·2^{seed mod 4}`.
pub fn building_corpus_sample(s: f64, seed: u64) -> CircleFunction {
    let band = 8usize << (seed % 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6265_736f_7600);
    let mut half = vec![num_complex::Complex64::new(0.0, 0.0); band + 1];
    for (k, c) in half.iter_mut().enumerate().skip(1) {
        let mag = (k as f64).powf(-(s + 0.5)) * rng.gen_range(0.5..1.5);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        *c = num_complex::Complex64::from_polar(mag, phase);
    }
    CircleFunction::from_nonnegative(&half)
}

/// Largest `L/R` and `R/B` over corpus samples `seeds` and the given `κ₀`.
pub fn calibrate_building_constants(
    s: f64,
    r: Summability,
    seeds: Range<u64>,
    kappas: &[f64],
) -> Result<BuildingConstants> {
    let mut c1: f64 = 0.0;
    let mut c2: f64 = 0.0;
    let mut samples = 0;
    for seed in seeds {
        let f = building_corpus_sample(s, seed);
        for &k in kappas {
            let b = besov_building_check(&f, s, r, k)?;
            c1 = c1.max(b.lower_ratio);
            c2 = c2.max(b.upper_ratio);
            samples += 1;
        }
    }
    Ok(BuildingConstants { s, r, c1, c2, samples })
}

/// Observed range of `‖A(κ;f)‖²_{I₂} / ⟨f, T_κ f⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceInterval {
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
}

impl EquivalenceInterval {
    pub fn contains(&self, ratio: f64) -> bool {
        ratio >= self.c1 && ratio <= self.c2
    }
}

/// Min and max of the Hilbert-Schmidt to `T_κ` ratio over corpus samples
/// `seeds` and the given `κ`, with the untruncated Hilbert-Schmidt sum.
pub fn calibrate_equivalence(s: f64, seeds: Range<u64>, kappas: &[f64]) -> Result<EquivalenceInterval> {
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut samples = 0;
    for seed in seeds {
        let f = building_corpus_sample(s, seed);
        for &k in kappas {
            let ratio = hs_squared_exact(&f, k)? / t_form(&f, k);
            c1 = c1.min(ratio);
            c2 = c2.max(ratio);
            samples += 1;
        }
    }
    if samples == 0 {
        return Err(Error::InvalidParameter {
            name: "seeds",
            reason: "empty calibration corpus".into(),
        });
    }
    Ok(EquivalenceInterval { c1, c2, samples })
}
