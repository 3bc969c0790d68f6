//! Certified two-sided bounds `‖q(t)‖ / ‖q(0)‖ ∈ [1/U, U]` for tracked Besov
//! norms, assembled from the conserved Hilbert-Schmidt control and recorded
//! constants:
//!
//! ```text
//! U = (C₁C₂)^{1/r} (2c₂/c₁)^{1/2} κ₀^{-s}      (r < ∞)
//! U = C₁C₂ (2c₂/c₁)^{1/2} κ₀^{-s}              (r = ∞)
//! ```
//!
//! `C₁, C₂` are the scale-by-scale building constants, `[c₁, c₂]` the observed
//! range of `‖A‖²/⟨q, T_κ q⟩`. Alongside `U` the report carries the
//! data-dependent factors `F = (1 + ‖q₀‖^{2/(1+2s)})^{-s}` and `F'` with
//! exponent `2/(1+2s)²`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TrackedNorm};
use super::conservation::{run_conservation, ConservationReport};
use crate::error::{Error, Result};
use crate::norms::Summability;
use crate::oracles::{calibrate_building_constants, calibrate_equivalence, BuildingConstants, EquivalenceInterval};

/// Corpus seeds for the recorded constants.
pub const CALIBRATION_SEEDS: std::ops::Range<u64> = 0..200;
/// κ₀ values for the building constants.
pub const BUILDING_KAPPAS: [f64; 5] = [1.0, 4.0, 16.0, 64.0, 256.0];
/// κ values for the equivalence interval; it has to cover every `κ₀N`.
pub const EQUIVALENCE_KAPPAS: [f64; 8] = [1.0, 4.0, 16.0, 64.0, 1e3, 1e4, 1e6, 1e9];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub building: BuildingConstants,
    pub equivalence: EquivalenceInterval,
}

impl BoundConstants {
    pub fn calibrate(norm: TrackedNorm) -> Result<Self> {
        norm.params().validate()?;
        Ok(BoundConstants {
            building: calibrate_building_constants(norm.s, norm.r, CALIBRATION_SEEDS, &BUILDING_KAPPAS)?,
            equivalence: calibrate_equivalence(norm.s, CALIBRATION_SEEDS, &EQUIVALENCE_KAPPAS)?,
        })
    }

    /// The upper factor `U` at `κ₀`.
    pub fn upper(&self, kappa0: f64) -> f64 {
        let b = &self.building;
        let e = &self.equivalence;
        let hs = (2.0 * e.c2 / e.c1).sqrt();
        let building = match b.r {
            Summability::Finite(r) => (b.c1 * b.c2).powf(1.0 / r),
            Summability::Infinite => b.c1 * b.c2,
        };
        building * hs * kappa0.powf(-b.s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedRow {
    pub t: f64,
    pub label: String,
    pub norm: f64,
    /// `‖q(t)‖/‖q(0)‖`, 1 when both vanish.
    pub ratio: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub norm: TrackedNorm,
    pub label: String,
    pub initial: f64,
    pub constants: BoundConstants,
    pub upper_factor: f64,
    pub lower_factor: f64,
    pub factor_f: f64,
    pub factor_f_alt: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub flagged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedReport {
    pub config_hash: String,
    pub kappa0: f64,
    pub bounds: Vec<NormBound>,
    pub rows: Vec<TwoSidedRow>,
}

impl TwoSidedReport {
    pub fn all_within(&self) -> bool {
        self.bounds.iter().all(|b| b.flagged == 0)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("two_sided.csv"))?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        std::fs::write(dir.join("two_sided.json"), serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else {
        a / b
    }
}

/// Bounds for every tracked norm, checked against the rows of a conservation run.
pub fn two_sided_from_report(report: &ConservationReport) -> Result<TwoSidedReport> {
    let kappa0 = report.header.kappa;
    let first = report
        .rows
        .first()
        .ok_or_else(|| Error::Precondition("conservation report has no rows".into()))?;
    let mut bounds = Vec::new();
    let mut rows = Vec::new();
    for (i, &norm) in report.header.tracked.iter().enumerate() {
        if norm.s >= 0.0 {
            return Err(Error::Config(format!("two-sided bounds need s < 0, got {}", norm.s)));
        }
        let constants = BoundConstants::calibrate(norm)?;
        let upper = constants.upper(kappa0);
        let lower = 1.0 / upper;
        let label = norm.label();
        let initial = first.norms[i];
        let a = 2.0 / (1.0 + 2.0 * norm.s);
        let mut max_ratio: f64 = 0.0;
        let mut min_ratio = f64::INFINITY;
        let mut flagged = 0;
        for row in &report.rows {
            let rho = ratio(row.norms[i], initial);
            let within = rho >= lower && rho <= upper;
            if !within {
                log::warn!("{label}: ratio {rho:.4} at t = {} outside [{lower:.4}, {upper:.4}]", row.t);
                flagged += 1;
            }
            max_ratio = max_ratio.max(rho);
            min_ratio = min_ratio.min(rho);
            rows.push(TwoSidedRow {
                t: row.t,
                label: label.clone(),
                norm: row.norms[i],
                ratio: rho,
                within,
            });
        }
        bounds.push(NormBound {
            norm,
            label,
            initial,
            constants,
            upper_factor: upper,
            lower_factor: lower,
            factor_f: (1.0 + initial.powf(a)).powf(-norm.s),
            factor_f_alt: (1.0 + initial.powf(a / (1.0 + 2.0 * norm.s))).powf(-norm.s),
            max_ratio,
            min_ratio,
            flagged,
        });
    }
    Ok(TwoSidedReport {
        config_hash: report.header.config_hash.clone(),
        kappa0,
        bounds,
        rows,
    })
}

/// Runs the conservation experiment, then checks the tracked norms against
/// their two-sided bounds. Out-of-bound ratios are flagged, not fatal.
pub fn cmd_two_sided(cfg: &ExperimentConfig, out: &Path) -> Result<TwoSidedReport> {
    if cfg.norms_to_track.is_empty() {
        return Err(Error::Config("`norms_to_track` is empty".into()));
    }
    let (conservation, _) = run_conservation(cfg)?;
    let report = two_sided_from_report(&conservation)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.json"), cfg.to_json()?)?;
    conservation.write(out)?;
    report.write(out)?;
    Ok(report)
}
