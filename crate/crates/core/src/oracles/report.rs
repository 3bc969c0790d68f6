use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub kappa: Option<f64>,
    pub dim: Option<usize>,
    pub ell: Option<usize>,
    pub seed: Option<u64>,
}

/// One check: passes iff `residual ≤ tolerance · scale`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub residual: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Precondition not met; the check was not attempted and does not fail.
    pub skipped: bool,
    pub params: ReportParams,
}

impl IdentityReport {
    pub fn new(name: &str, residual: f64, scale: f64, tolerance: f64, params: ReportParams) -> Self {
        IdentityReport {
            name: name.to_string(),
            residual,
            scale,
            tolerance,
            pass: residual <= tolerance * scale,
            skipped: false,
            params,
        }
    }

    pub fn skipped(name: &str, tolerance: f64, params: ReportParams) -> Self {
        IdentityReport {
            name: name.to_string(),
            residual: 0.0,
            scale: 0.0,
            tolerance,
            pass: true,
            skipped: true,
            params,
        }
    }

    /// `residual / scale`, or 0 when both vanish.
    pub fn relative(&self) -> f64 {
        if self.residual == 0.0 {
            0.0
        } else {
            self.residual / self.scale
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.params.seed = Some(seed);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NameSummary {
    pub checks: usize,
    pub failed: usize,
    pub skipped: usize,
    pub max_relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub all_pass: bool,
    pub by_name: BTreeMap<String, NameSummary>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    kappa: Option<f64>,
    dim: Option<usize>,
    ell: Option<usize>,
    seed: Option<u64>,
    residual: f64,
    scale: f64,
    tolerance: f64,
    relative: f64,
    pass: bool,
    skipped: bool,
}

/// A batch of checks with CSV and JSON output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportBatch {
    pub reports: Vec<IdentityReport>,
}

impl ReportBatch {
    pub fn push(&mut self, r: IdentityReport) {
        self.reports.push(r);
    }

    pub fn extend(&mut self, rs: impl IntoIterator<Item = IdentityReport>) {
        self.reports.extend(rs);
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityReport> {
        self.reports.iter().filter(|r| !r.pass)
    }

    pub fn summary(&self) -> ReportSummary {
        let mut by_name: BTreeMap<String, NameSummary> = BTreeMap::new();
        for r in &self.reports {
            let e = by_name.entry(r.name.clone()).or_insert(NameSummary {
                checks: 0,
                failed: 0,
                skipped: 0,
                max_relative: 0.0,
            });
            e.checks += 1;
            e.failed += usize::from(!r.pass);
            e.skipped += usize::from(r.skipped);
            e.max_relative = e.max_relative.max(r.relative());
        }
        let failed = self.reports.iter().filter(|r| !r.pass).count();
        let skipped = self.reports.iter().filter(|r| r.skipped).count();
        ReportSummary {
            total: self.reports.len(),
            passed: self.reports.len() - failed - skipped,
            failed,
            skipped,
            all_pass: failed == 0,
            by_name,
        }
    }

    /// Columns: `name,kappa,dim,ell,seed,residual,scale,tolerance,relative,pass,skipped`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        Self::write_rows(self.reports.iter(), path)
    }

    pub fn write_failures_csv(&self, path: &Path) -> Result<()> {
        Self::write_rows(self.failures(), path)
    }

    fn write_rows<'a>(rows: impl Iterator<Item = &'a IdentityReport>, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in rows {
            w.serialize(CsvRow {
                name: &r.name,
                kappa: r.params.kappa,
                dim: r.params.dim,
                ell: r.params.ell,
                seed: r.params.seed,
                residual: r.residual,
                scale: r.scale,
                tolerance: r.tolerance,
                relative: r.relative(),
                pass: r.pass,
                skipped: r.skipped,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_summary(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.summary())?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule_and_zero_scale() {
        let r = IdentityReport::new("x", 1e-13, 1.0, 1e-12, ReportParams::default());
        assert!(r.pass);
        let r = IdentityReport::new("x", 2e-12, 1.0, 1e-12, ReportParams::default());
        assert!(!r.pass);
        let z = IdentityReport::new("x", 0.0, 0.0, 1e-12, ReportParams::default());
        assert!(z.pass);
        assert_eq!(z.relative(), 0.0);
    }

    #[test]
    fn batch_outputs() {
        let mut b = ReportBatch::default();
        b.push(IdentityReport::new("a", 0.0, 1.0, 1e-12, ReportParams::default()).with_seed(3));
        b.push(IdentityReport::new("b", 1.0, 1.0, 1e-12, ReportParams::default()));
        b.push(IdentityReport::skipped("a", 1e-12, ReportParams::default()));
        let s = b.summary();
        assert_eq!((s.total, s.passed, s.failed, s.skipped), (3, 1, 1, 1));
        assert!(!s.all_pass);
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("rows.csv");
        b.write_csv(&csv_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with("name,kappa,dim,ell,seed,residual,scale,tolerance,relative,pass,skipped"));
        assert_eq!(text.lines().count(), 4);
        b.write_failures_csv(&csv_path).unwrap();
        assert_eq!(std::fs::read_to_string(&csv_path).unwrap().lines().count(), 2);
    }
}
