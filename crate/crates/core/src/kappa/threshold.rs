use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{build_a, hs_norm};
use crate::error::{Error, Result};
use crate::fourier::{random_rough, CircleFunction};
use crate::norms::sobolev_norm;

const KAPPA_LIMIT: f64 = 1e9;
const BISECTION_RTOL: f64 = 1e-3;

/// Size of the random corpus behind [`threshold_constant`].
pub const CALIBRATION_SAMPLES: u64 = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Smallest κ ≥ 1 (to 1e-3 relative) with `‖A‖² ≤ (1-margin)²/9`.
    pub kappa: f64,
    pub hs_norm: f64,
    /// `1 + C(s)‖q‖_{H^s}^{2/(1+2s)}` with the calibrated constant.
    pub formula_kappa: f64,
    pub constant: f64,
    pub dim: usize,
}

fn default_dim(q: &CircleFunction) -> usize {
    (4 * q.band_limit()).max(4)
}

/// Bisection for the smallest κ with `hs(κ)² ≤ bound`; `hs` is nonincreasing in κ.
fn smallest_kappa(q: &CircleFunction, dim: usize, bound: f64) -> Result<(f64, f64)> {
    let hs_at = |kappa: f64| -> Result<f64> { Ok(hs_norm(&build_a(q, kappa, dim)?)) };
    let ok = |h: f64| h * h <= bound;

    let h1 = hs_at(1.0)?;
    if ok(h1) {
        return Ok((1.0, h1));
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    let mut h_hi = hs_at(hi)?;
    while !ok(h_hi) {
        lo = hi;
        hi *= 2.0;
        if hi > KAPPA_LIMIT {
            return Err(Error::ThresholdNotFound { limit: KAPPA_LIMIT });
        }
        h_hi = hs_at(hi)?;
    }
    while (hi - lo) > BISECTION_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        let h = hs_at(mid)?;
        if ok(h) {
            hi = mid;
            h_hi = h;
        } else {
            lo = mid;
        }
    }
    Ok((hi, h_hi))
}

fn check_s(s: f64) -> Result<()> {
    if !(s > -0.5 && s < 0.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: format!("{s} is outside (-1/2, 0)"),
        });
    }
    Ok(())
}

/// Smallest κ for which `‖A(κ; q)‖_{I₂} ≤ (1 - margin)/3`, together with the
/// value of the closed-form threshold `1 + C(s)‖q‖_{H^s}^{2/(1+2s)}`.
pub fn kappa_threshold(q: &CircleFunction, s: f64, margin: f64) -> Result<ThresholdReport> {
    check_s(s)?;
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::InvalidParameter {
            name: "margin",
            reason: format!("{margin} is outside (0, 1)"),
        });
    }
    if !q.is_mean_zero() {
        return Err(Error::NonZeroMean { mean: q.mean() });
    }
    let dim = default_dim(q);
    let bound = (1.0 - margin).powi(2) / 9.0;
    let (kappa, hs) = smallest_kappa(q, dim, bound)?;
    let constant = threshold_constant(s)?;
    let formula_kappa = 1.0 + constant * sobolev_norm(q, s).powf(2.0 / (1.0 + 2.0 * s));
    Ok(ThresholdReport {
        kappa,
        hs_norm: hs,
        formula_kappa,
        constant,
        dim,
    })
}

fn calibration_sample(s: f64, seed: u64) -> CircleFunction {
    // amplitudes sweep 2^-2 .. 2^7 so that both κ₀ = 1 and large κ₀ occur
    let amp = 2f64.powi((seed % 10) as i32 - 2);
    random_rough(s, seed, 16, amp).expect("s validated by caller")
}

static CACHE: Mutex<Option<HashMap<u64, f64>>> = Mutex::new(None);

/// Calibrated `C(s)`: twice the largest `(κ₀ - 1)/‖q‖_{H^s}^{2/(1+2s)}` over a
/// fixed corpus, where κ₀ is the smallest κ giving `‖A‖_{I₂} ≤ 1/3`.
/// Cached per `s`.
pub fn threshold_constant(s: f64) -> Result<f64> {
    check_s(s)?;
    if let Some(c) = CACHE.lock().unwrap().as_ref().and_then(|m| m.get(&s.to_bits())) {
        return Ok(*c);
    }
    let exponent = 2.0 / (1.0 + 2.0 * s);
    let worst = (0..CALIBRATION_SAMPLES)
        .into_par_iter()
        .map(|seed| -> Result<f64> {
            let q = calibration_sample(s, seed);
            let (kappa, _) = smallest_kappa(&q, default_dim(&q), 1.0 / 9.0)?;
            Ok((kappa - 1.0) / sobolev_norm(&q, s).powf(exponent))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let c = 2.0 * worst;
    CACHE
        .lock()
        .unwrap()
        .get_or_insert_with(HashMap::new)
        .insert(s.to_bits(), c);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::random_smooth;

    #[test]
    fn zero_data_needs_no_kappa() {
        let r = kappa_threshold(&CircleFunction::zero(4), -0.25, 0.1).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert_eq!(r.hs_norm, 0.0);
    }

    #[test]
    fn returned_kappa_satisfies_bound_and_is_tight() {
        let q = random_smooth(1.0, 2, 8, 6.0).unwrap();
        let r = kappa_threshold(&q, -0.25, 0.1).unwrap();
        assert!(r.kappa > 1.0);
        assert!(r.hs_norm < 1.0 / 3.0);
        assert!(r.hs_norm <= 0.9 / 3.0);
        let below = hs_norm(&build_a(&q, r.kappa * (1.0 - 2e-3), r.dim).unwrap());
        assert!(below > 0.9 / 3.0);
    }

    #[test]
    fn threshold_is_monotone_in_amplitude() {
        let q = random_rough(-0.25, 5, 12, 2.0).unwrap();
        let kappas: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&l| kappa_threshold(&q.scaled(l), -0.25, 0.1).unwrap().kappa)
            .collect();
        assert!(kappas.windows(2).all(|w| w[0] <= w[1]), "{kappas:?}");
        assert!(kappas[2] > 1.0);
    }

    #[test]
    fn formula_threshold_dominates_bisection_on_corpus() {
        let s = -0.25;
        let c = threshold_constant(s).unwrap();
        assert!(c.is_finite() && c > 0.0);
        for seed in 0..CALIBRATION_SAMPLES {
            let q = calibration_sample(s, seed);
            let r = kappa_threshold(&q, s, 1e-9).unwrap();
            assert!(r.formula_kappa >= r.kappa * (1.0 - 1e-3));
            let at_formula = hs_norm(&build_a(&q, r.formula_kappa, r.dim).unwrap());
            assert!(at_formula < 1.0 / 3.0);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let q = random_rough(-0.25, 5, 12, 2.0).unwrap();
        assert!(kappa_threshold(&q, 0.2, 0.1).is_err());
        assert!(kappa_threshold(&q, -0.25, 1.0).is_err());
        assert!(kappa_threshold(&q.add(&CircleFunction::constant(1.0)), -0.25, 0.1).is_err());
    }
}
