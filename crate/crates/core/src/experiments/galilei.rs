use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TrackedNorm};
use crate::dynamics::{evolve, galilei};
use crate::error::{Error, Result};
use crate::fourier::CircleFunction;
use crate::norms::besov_norm;

/// Boosted and directly evolved solutions must agree to this (relative L²).
pub const GALILEI_TOL: f64 = 1e-6;

/// The boost only changes the lowest block, which holds `μ` alone, so
/// `‖q̃‖² / (‖q‖² + μ²)` lies in this interval for every `r ∈ [1, ∞]`.
pub const COMPARABILITY_BOUNDS: (f64, f64) = (0.5, 2.0);

/// `‖q̃‖²` against `‖q‖² + μ²` for one tracked norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    pub label: String,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalileiReport {
    pub mu: f64,
    pub final_time: f64,
    /// `max_t ‖boost(q)(t) - evolve(q₀ + μ)(t)‖_{L²}`.
    pub max_discrepancy: f64,
    pub relative_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub comparability: Vec<Comparability>,
}

fn comparability(norm: &TrackedNorm, pairs: &[(CircleFunction, CircleFunction)], mu: f64) -> Comparability {
    let p = norm.params();
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio: f64 = 0.0;
    for (q, boosted) in pairs {
        let base = besov_norm(q, p).powi(2) + mu * mu;
        let r = if base == 0.0 { 1.0 } else { besov_norm(boosted, p).powi(2) / base };
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
    }
    let (lo, hi) = COMPARABILITY_BOUNDS;
    Comparability {
        label: norm.label(),
        min_ratio,
        max_ratio,
        within: min_ratio >= lo * (1.0 - 1e-12) && max_ratio <= hi * (1.0 + 1e-12),
    }
}

/// Evolves `q₀` and `q₀ + μ` separately and compares the second with the
/// boost of the first at every snapshot.
pub fn run_galilei(cfg: &ExperimentConfig) -> Result<GalileiReport> {
    cfg.validate()?;
    let (q0, _) = cfg.initial_data()?;
    if !q0.is_mean_zero() {
        return Err(Error::NonZeroMean { mean: q0.mean() });
    }
    let mu = cfg.galilei_mu;
    let base = evolve(&q0, &cfg.solver)?;
    let direct = evolve(&q0.add(&CircleFunction::constant(mu)), &cfg.solver)?;
    let mut max_discrepancy: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut pairs = Vec::with_capacity(base.len());
    for ((&t, q), d) in base.times.iter().zip(&base.states).zip(&direct.states) {
        let boosted = galilei(q, mu, t);
        max_discrepancy = max_discrepancy.max(boosted.sub(d).l2_norm());
        scale = scale.max(d.l2_norm());
        pairs.push((q.clone(), boosted));
    }
    let relative_discrepancy = if scale == 0.0 { 0.0 } else { max_discrepancy / scale };
    let comparability: Vec<Comparability> = cfg.norms_to_track.iter().map(|n| comparability(n, &pairs, mu)).collect();
    Ok(GalileiReport {
        mu,
        final_time: cfg.solver.final_time,
        max_discrepancy,
        relative_discrepancy,
        tolerance: GALILEI_TOL,
        pass: relative_discrepancy <= GALILEI_TOL && comparability.iter().all(|c| c.within),
        comparability,
    })
}

pub fn cmd_galilei_demo(cfg: &ExperimentConfig, out: &Path) -> Result<GalileiReport> {
    let report = run_galilei(cfg)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("galilei.json"), serde_json::to_string_pretty(&report)?)?;
    if !report.pass {
        return Err(Error::VerificationFailed(format!(
            "Galilei discrepancy {:.3e} (tolerance {GALILEI_TOL:e}) or norm comparability outside {COMPARABILITY_BOUNDS:?}",
            report.relative_discrepancy
        )));
    }
    Ok(report)
}
