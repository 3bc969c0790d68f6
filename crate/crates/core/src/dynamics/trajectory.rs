use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::error::{Error, Result};
use crate::fourier::{CircleFunction, CoefficientFile};

/// Where the initial data came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub description: String,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CircleFunction>,
    pub config: SolverConfig,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    config: SolverConfig,
    provenance: Provenance,
    times: Vec<f64>,
    steps: Vec<usize>,
    files: Vec<String>,
}

/// File name of the snapshot taken after `step` steps.
pub fn snapshot_name(step: usize) -> String {
    format!("{step:08}.json")
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &CircleFunction {
        self.states.last().expect("trajectory holds the initial state")
    }

    fn steps(&self) -> Vec<usize> {
        self.times
            .iter()
            .map(|t| (t / self.config.dt).round() as usize)
            .collect()
    }

    /// Writes `metadata.json` and one coefficient file per snapshot.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let steps = self.steps();
        let files: Vec<String> = steps.iter().map(|&s| snapshot_name(s)).collect();
        for (state, name) in self.states.iter().zip(&files) {
            CoefficientFile::from_function(state).write(&dir.join(name))?;
        }
        let meta = Metadata {
            config: self.config.clone(),
            provenance: self.provenance.clone(),
            times: self.times.clone(),
            steps,
            files,
        };
        std::fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let meta: Metadata = serde_json::from_str(&std::fs::read_to_string(dir.join("metadata.json"))?)?;
        if meta.files.len() != meta.times.len() {
            return Err(Error::Format("metadata lists a different number of files and times".into()));
        }
        let states = meta
            .files
            .iter()
            .map(|f| CoefficientFile::read(&dir.join(f))?.to_function())
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory {
            times: meta.times,
            states,
            config: meta.config,
            provenance: meta.provenance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve_with_provenance, Integrator};
    use crate::fourier::random_smooth;

    #[test]
    fn save_and_load_round_trip() {
        let q0 = random_smooth(3.0, 1, 6, 0.5).unwrap();
        let cfg = SolverConfig {
            band: 16,
            dt: 1e-3,
            final_time: 0.01,
            integrator: Integrator::Etdrk4,
            dealias: true,
            snapshot_every: 5,
            linear_only: false,
            tail_limit: None,
        };
        let prov = Provenance {
            description: "smooth".into(),
            seed: Some(1),
        };
        let traj = evolve_with_provenance(&q0, &cfg, prov).unwrap();
        let dir = tempfile::tempdir().unwrap();
        traj.save(dir.path()).unwrap();
        assert!(dir.path().join("00000000.json").exists());
        assert!(dir.path().join("00000010.json").exists());
        let back = Trajectory::load(dir.path()).unwrap();
        assert_eq!(back, traj);
    }
}
