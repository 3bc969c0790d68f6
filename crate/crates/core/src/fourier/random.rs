use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CircleFunction;
use crate::error::{Error, Result};

fn with_random_phases(seed: u64, band: usize, magnitude: impl Fn(usize) -> f64) -> CircleFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut half = vec![Complex64::new(0.0, 0.0); band + 1];
    for (k, c) in half.iter_mut().enumerate().skip(1) {
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        *c = Complex64::from_polar(magnitude(k), phase);
    }
    CircleFunction::from_nonnegative(&half)
}

/// Mean-zero test data sitting just inside `H^s`: `|q̂(2πk)| = amp·|k|^{-(s+½)-0.01}`
/// with seeded uniform phases.
pub fn random_rough(s: f64, seed: u64, band: usize, amplitude: f64) -> Result<CircleFunction> {
    if !(s > -0.5 && s < 0.0) {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: format!("{s} is outside (-1/2, 0)"),
        });
    }
    if band < 1 {
        return Err(Error::InvalidParameter {
            name: "band",
            reason: "need at least one mode".into(),
        });
    }
    let exponent = -(s + 0.5) - 0.01;
    Ok(with_random_phases(seed, band, |k| amplitude * (k as f64).powf(exponent)))
}

/// Mean-zero smooth data, `|q̂(2πk)| = amp·(1+|k|)^{-decay}` with seeded phases.
pub fn random_smooth(decay: f64, seed: u64, band: usize, amplitude: f64) -> Result<CircleFunction> {
    if band < 1 || !decay.is_finite() {
        return Err(Error::InvalidParameter {
            name: "band",
            reason: "need at least one mode and a finite decay".into(),
        });
    }
    Ok(with_random_phases(seed, band, |k| amplitude * (1.0 + k as f64).powf(-decay)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::sobolev_norm;

    #[test]
    fn deterministic_and_mean_zero() {
        let a = random_rough(-0.25, 1, 64, 1.0).unwrap();
        let b = random_rough(-0.25, 1, 64, 1.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.mean(), 0.0);
        assert_ne!(a, random_rough(-0.25, 2, 64, 1.0).unwrap());
    }

    #[test]
    fn rejects_out_of_range_regularity() {
        assert!(random_rough(0.1, 1, 8, 1.0).is_err());
        assert!(random_rough(-0.5, 1, 8, 1.0).is_err());
        assert!(random_rough(-0.2, 1, 0, 1.0).is_err());
    }

    #[test]
    fn sobolev_norms_track_the_target_regularity() {
        // H^s grows slowly while H^0 gains about 2^{0.24} per doubling
        let s = -0.25;
        let norms: Vec<(f64, f64)> = [64, 128, 256]
            .iter()
            .map(|&m| {
                let q = random_rough(s, 3, m, 1.0).unwrap();
                (sobolev_norm(&q, s), sobolev_norm(&q, 0.0))
            })
            .collect();
        for w in norms.windows(2) {
            assert!(w[1].1 > 1.15 * w[0].1, "{norms:?}");
            assert!(w[1].0 < 1.1 * w[0].0, "{norms:?}");
        }
        assert!(norms.iter().all(|(a, _)| a.is_finite()));
    }
}
