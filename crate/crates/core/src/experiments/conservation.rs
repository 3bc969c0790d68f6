use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, KappaPolicy, TrackedNorm};
use crate::dynamics::{evolve_with_provenance, tail_fraction, Provenance, Trajectory};
use crate::error::{Error, Result};
use crate::fourier::CircleFunction;
use crate::kappa::{alpha_logdet_banded, build_a, hs_norm, kappa_threshold};
use crate::norms::{besov_norm, t_kappa_form};

/// `sup_t ‖A(t)‖² ≤ HS_FACTOR · ‖A(0)‖²` along the flow.
pub const HS_FACTOR: f64 = 2.0;
/// Drift denominators never drop below this.
pub const DRIFT_FLOOR: f64 = 1e-30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationRow {
    pub t: f64,
    pub alpha: f64,
    pub hs_squared: f64,
    pub t_form: f64,
    /// Tracked Besov norms in the order of the header.
    pub norms: Vec<f64>,
    pub mean: f64,
    pub l2: f64,
    pub tail_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationHeader {
    pub kappa: f64,
    pub kappa_policy: KappaPolicy,
    pub config_hash: String,
    pub alpha_dim: usize,
    pub alpha_drift_tol: f64,
    pub hs_factor: f64,
    pub tracked: Vec<TrackedNorm>,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationSummary {
    pub snapshots: usize,
    /// `max_t |α(t) - α(0)| / max(α(0), 1e-30)`.
    pub max_alpha_drift: f64,
    pub alpha_drift_pass: bool,
    /// `max_t ‖A(t)‖² / ‖A(0)‖²` (1 for zero data).
    pub max_hs_ratio: f64,
    pub hs_bound_pass: bool,
    /// `max_t ⟨q(t), T_κ q(t)⟩ / ⟨q(0), T_κ q(0)⟩` (1 for zero data).
    pub max_t_form_ratio: f64,
    pub max_tail_fraction: f64,
    pub max_abs_mean: f64,
    /// `max_t |‖q(t)‖ - ‖q(0)‖| / ‖q(0)‖`.
    pub max_l2_drift: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        1.0
    } else {
        a / b
    }
}

impl ConservationSummary {
    /// Statistics computed from the rows alone.
    pub fn from_rows(rows: &[ConservationRow], drift_tol: f64) -> Self {
        let first = &rows[0];
        let max_of = |f: &dyn Fn(&ConservationRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        let max_alpha_drift = max_of(&|r| (r.alpha - first.alpha).abs() / first.alpha.max(DRIFT_FLOOR));
        let max_hs_ratio = max_of(&|r| ratio(r.hs_squared, first.hs_squared));
        ConservationSummary {
            snapshots: rows.len(),
            max_alpha_drift,
            alpha_drift_pass: max_alpha_drift <= drift_tol,
            max_hs_ratio,
            hs_bound_pass: max_hs_ratio <= HS_FACTOR,
            max_t_form_ratio: max_of(&|r| ratio(r.t_form, first.t_form)),
            max_tail_fraction: max_of(&|r| r.tail_fraction),
            max_abs_mean: max_of(&|r| r.mean.abs()),
            max_l2_drift: max_of(&|r| ratio((r.l2 - first.l2).abs(), first.l2).min(f64::MAX)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub header: ConservationHeader,
    pub rows: Vec<ConservationRow>,
    pub summary: ConservationSummary,
}

/// κ from the policy, gated on `‖A(κ; q₀)‖_{I₂} < 1/3`.
pub fn resolve_kappa(cfg: &ExperimentConfig, q0: &CircleFunction) -> Result<f64> {
    if !q0.is_mean_zero() {
        return Err(Error::NonZeroMean { mean: q0.mean() });
    }
    let kappa = match cfg.kappa_policy {
        KappaPolicy::Fixed(k) => k,
        KappaPolicy::Threshold { s, margin } => kappa_threshold(q0, s, margin)?.kappa,
    };
    let h = hs_norm(&build_a(q0, kappa, cfg.alpha_dim())?);
    if h >= 1.0 / 3.0 {
        return Err(Error::Precondition(format!(
            "‖A(κ; q₀)‖ = {h:.4} ≥ 1/3 at κ = {kappa}; raise κ or use the threshold policy"
        )));
    }
    Ok(kappa)
}

/// One row of diagnostics for a snapshot.
pub fn snapshot_row(
    t: f64,
    q: &CircleFunction,
    kappa: f64,
    alpha_dim: usize,
    tracked: &[TrackedNorm],
) -> Result<ConservationRow> {
    let report = alpha_logdet_banded(&build_a(q, kappa, alpha_dim)?)?;
    Ok(ConservationRow {
        t,
        alpha: report.alpha,
        hs_squared: report.hs_norm * report.hs_norm,
        t_form: t_kappa_form(q, kappa),
        norms: tracked.iter().map(|n| besov_norm(q, n.params())).collect(),
        mean: q.mean(),
        l2: q.l2_norm(),
        tail_fraction: tail_fraction(q.nonnegative()),
    })
}

/// Evolves the configured data and evaluates α and the norms at every snapshot.
pub fn run_conservation(cfg: &ExperimentConfig) -> Result<(ConservationReport, Trajectory)> {
    cfg.validate()?;
    let (q0, provenance) = cfg.initial_data()?;
    let kappa = resolve_kappa(cfg, &q0)?;
    let traj = evolve_with_provenance(&q0, &cfg.solver, provenance.clone())?;
    let dim = cfg.alpha_dim();
    let rows = traj
        .times
        .par_iter()
        .zip(traj.states.par_iter())
        .map(|(&t, q)| snapshot_row(t, q, kappa, dim, &cfg.norms_to_track))
        .collect::<Result<Vec<_>>>()?;
    let summary = ConservationSummary::from_rows(&rows, cfg.alpha_drift_tol);
    let header = ConservationHeader {
        kappa,
        kappa_policy: cfg.kappa_policy,
        config_hash: cfg.hash(),
        alpha_dim: dim,
        alpha_drift_tol: cfg.alpha_drift_tol,
        hs_factor: HS_FACTOR,
        tracked: cfg.norms_to_track.clone(),
        provenance,
    };
    Ok((ConservationReport { header, rows, summary }, traj))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    header: &'a ConservationHeader,
    summary: &'a ConservationSummary,
}

impl ConservationReport {
    /// Columns: `t, alpha, hs_squared, t_form, <tracked labels…>, mean, l2, tail_fraction`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut head = vec!["t".to_string(), "alpha".into(), "hs_squared".into(), "t_form".into()];
        head.extend(self.header.tracked.iter().map(TrackedNorm::label));
        head.extend(["mean".into(), "l2".into(), "tail_fraction".into()]);
        w.write_record(&head)?;
        for r in &self.rows {
            let mut rec = vec![r.t, r.alpha, r.hs_squared, r.t_form];
            rec.extend(&r.norms);
            rec.extend([r.mean, r.l2, r.tail_fraction]);
            w.write_record(rec.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SummaryFile {
            header: &self.header,
            summary: &self.summary,
        })?)
    }

    /// Writes `conservation.csv`, `summary.json` and gnuplot `.dat` series.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        self.write_csv(&dir.join("conservation.csv"))?;
        std::fs::write(dir.join("summary.json"), self.summary_json()?)?;
        write_dat(&dir.join("alpha.dat"), "alpha", self.rows.iter().map(|r| (r.t, r.alpha)))?;
        write_dat(&dir.join("hs_squared.dat"), "hs_squared", self.rows.iter().map(|r| (r.t, r.hs_squared)))?;
        write_dat(&dir.join("t_form.dat"), "t_form", self.rows.iter().map(|r| (r.t, r.t_form)))?;
        for (i, n) in self.header.tracked.iter().enumerate() {
            let label = n.label();
            write_dat(
                &dir.join(format!("{label}.dat")),
                &label,
                self.rows.iter().map(|r| (r.t, r.norms[i])),
            )?;
        }
        Ok(())
    }
}

/// Two whitespace-separated columns with a `#` header line.
pub fn write_dat(path: &Path, label: &str, points: impl Iterator<Item = (f64, f64)>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "# t {label}")?;
    for (x, y) in points {
        writeln!(f, "{x:e} {y:e}")?;
    }
    f.flush()?;
    Ok(())
}

/// Evolves and writes the trajectory plus the config it came from.
pub fn cmd_evolve(cfg: &ExperimentConfig, out: &Path) -> Result<Trajectory> {
    cfg.validate()?;
    let (q0, provenance) = cfg.initial_data()?;
    let traj = evolve_with_provenance(&q0, &cfg.solver, provenance)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.json"), cfg.to_json()?)?;
    traj.save(&out.join("trajectory"))?;
    Ok(traj)
}

/// Runs [`run_conservation`] and writes its report under `out`.
pub fn cmd_conservation(cfg: &ExperimentConfig, out: &Path) -> Result<ConservationReport> {
    let (report, _) = run_conservation(cfg)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.json"), cfg.to_json()?)?;
    report.write(out)?;
    Ok(report)
}
