use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Provenance, SolverConfig};
use crate::error::{Error, Result};
use crate::fourier::{random_rough, random_smooth, CircleFunction, CoefficientFile};
use crate::kappa::{build_a, hs_norm};
use crate::norms::{BesovParams, Summability};

/// Random data with `|q̂(k)| ∝ k^{-(s+½)}` (or `(1+k)^{-decay}` when `decay`
/// is set) and uniformly random phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub s: f64,
    pub seed: u64,
    #[serde(rename = "M")]
    pub band: usize,
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// Rescale so that `‖A(1; q₀)‖_{I₂}` equals this value, overriding `amplitude`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_hs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    Inline(CoefficientFile),
    RandomRough(RandomSpec),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaPolicy {
    Fixed(f64),
    Threshold { s: f64, margin: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackedNorm {
    pub s: f64,
    pub r: Summability,
}

impl TrackedNorm {
    pub fn params(&self) -> BesovParams {
        BesovParams { s: self.s, r: self.r }
    }

    /// Column label such as `besov_s-0.25_r2`.
    pub fn label(&self) -> String {
        format!("besov_s{}_r{}", self.s, self.r)
    }
}

fn default_mu() -> f64 {
    0.5
}

fn default_drift_tol() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub initial_data: InitialData,
    pub solver: SolverConfig,
    pub kappa_policy: KappaPolicy,
    #[serde(default)]
    pub norms_to_track: Vec<TrackedNorm>,
    pub output_dir: PathBuf,
    /// Truncation `M⁺` for α along trajectories; defaults to `4·M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_dim: Option<usize>,
    /// Mean added by the Galilei demo.
    #[serde(default = "default_mu")]
    pub galilei_mu: f64,
    /// Pass threshold for the relative α drift.
    #[serde(default = "default_drift_tol")]
    pub alpha_drift_tol: f64,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    /// Parses JSON, reporting the offending field path with line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let inner = e.inner();
            config_err(format!(
                "at `{}` (line {}, column {}): {inner}",
                e.path(),
                inner.line(),
                inner.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => config_err(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    pub fn alpha_dim(&self) -> usize {
        self.alpha_dim.unwrap_or(4 * self.solver.band)
    }

    /// Replaces the seed of random initial data.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let InitialData::RandomRough(spec) = &mut self.initial_data {
            spec.seed = seed;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate().map_err(|e| config_err(format!("solver: {e}")))?;
        let initial_band = match &self.initial_data {
            InitialData::Inline(file) => file.band_limit,
            InitialData::RandomRough(spec) => {
                if !(spec.s > -0.5 && spec.s < 0.0) {
                    return Err(config_err(format!("initial_data.s = {} is outside (-1/2, 0)", spec.s)));
                }
                if spec.band == 0 {
                    return Err(config_err("initial_data.M must be positive"));
                }
                if let Some(d) = spec.decay {
                    if !(d.is_finite() && d > 0.0) {
                        return Err(config_err(format!("initial_data.decay = {d} must be positive")));
                    }
                }
                if let Some(h) = spec.target_hs {
                    if !(h > 0.0 && h < 1.0 / 3.0) {
                        return Err(config_err(format!("initial_data.target_hs = {h} is outside (0, 1/3)")));
                    }
                }
                spec.band
            }
        };
        if initial_band > self.solver.band {
            return Err(config_err(format!(
                "initial band {initial_band} exceeds solver band {}",
                self.solver.band
            )));
        }
        match self.kappa_policy {
            KappaPolicy::Fixed(k) if !(k >= 1.0 && k.is_finite()) => {
                return Err(config_err(format!("kappa_policy.fixed = {k} is below 1")))
            }
            KappaPolicy::Threshold { s, margin } if !(s > -0.5 && s < 0.0 && margin > 0.0 && margin < 1.0) => {
                return Err(config_err(format!(
                    "kappa_policy.threshold needs s in (-1/2, 0) and margin in (0, 1), got s = {s}, margin = {margin}"
                )))
            }
            _ => {}
        }
        for (i, n) in self.norms_to_track.iter().enumerate() {
            n.params()
                .validate()
                .map_err(|e| config_err(format!("norms_to_track[{i}]: {e}")))?;
        }
        if let Some(d) = self.alpha_dim {
            if d < self.solver.band {
                return Err(config_err(format!("alpha_dim {d} is below the solver band {}", self.solver.band)));
            }
        }
        if !self.galilei_mu.is_finite() {
            return Err(config_err("galilei_mu must be finite"));
        }
        if !(self.alpha_drift_tol > 0.0) {
            return Err(config_err("alpha_drift_tol must be positive"));
        }
        Ok(())
    }

    /// Builds `q₀` and records where it came from.
    pub fn initial_data(&self) -> Result<(CircleFunction, Provenance)> {
        match &self.initial_data {
            InitialData::Inline(file) => Ok((
                file.to_function()?,
                Provenance {
                    description: "inline coefficients".into(),
                    seed: None,
                },
            )),
            InitialData::RandomRough(spec) => {
                let q = match spec.decay {
                    Some(d) => random_smooth(d, spec.seed, spec.band, spec.amplitude)?,
                    None => random_rough(spec.s, spec.seed, spec.band, spec.amplitude)?,
                };
                let q = match spec.target_hs {
                    Some(target) => {
                        let h = hs_norm(&build_a(&q, 1.0, 4 * spec.band)?);
                        if h == 0.0 {
                            q
                        } else {
                            q.scaled(target / h)
                        }
                    }
                    None => q,
                };
                let shape = match spec.decay {
                    Some(d) => format!("decay (1+k)^-{d}"),
                    None => format!("regularity s = {}", spec.s),
                };
                Ok((
                    q,
                    Provenance {
                        description: format!("random, {shape}, band {}", spec.band),
                        seed: Some(spec.seed),
                    },
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> ExperimentConfig {
        ExperimentConfig::from_json(include_str!("../../configs/smoke.json")).unwrap()
    }

    #[test]
    fn round_trips_bit_exactly() {
        let cfg = sample();
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let text = include_str!("../../configs/smoke.json").replace("\"dt\"", "\"dtt\"");
        let err = ExperimentConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("solver") && err.contains("line"), "{err}");
        let bad = include_str!("../../configs/smoke.json").replace("\"margin\": 0.1", "\"margin\": 1.5");
        assert!(matches!(ExperimentConfig::from_json(&bad), Err(Error::Config(_))));
        assert_eq!(ExperimentConfig::from_json("{").unwrap_err().exit_code(), 4);
    }

    #[test]
    fn seed_override_and_target_scaling() {
        let cfg = sample().with_seed(11);
        let (q, prov) = cfg.initial_data().unwrap();
        assert_eq!(prov.seed, Some(11));
        if let InitialData::RandomRough(spec) = &cfg.initial_data {
            let h = hs_norm(&build_a(&q, 1.0, 4 * spec.band).unwrap());
            assert!((h - spec.target_hs.unwrap()).abs() < 1e-12);
        }
        assert_ne!(sample().hash(), cfg.hash());
    }
}
