use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::ExperimentConfig;
use super::verify::Suite;
use super::{cmd_conservation, cmd_evolve, cmd_galilei_demo, cmd_two_sided, cmd_verify};
use crate::error::{Error, Result};

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "BOCONSERVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "boconserve", version, about = "Conservation-law experiments for the periodic Benjamin-Ono equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (JSON); optional for `verify`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to the config's `output_dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the seed of random initial data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Oracle suite for `verify`.
    #[arg(long, global = true, default_value = "all")]
    pub suite: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    Evolve,
    Conservation,
    TwoSided,
    Verify,
    Galilei,
}

impl Cli {
    fn load_config(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_ref()
            .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
        let cfg = ExperimentConfig::read(path)?;
        Ok(match self.seed {
            Some(seed) => cfg.with_seed(seed),
            None => cfg,
        })
    }

    fn out_dir(&self, cfg: Option<&ExperimentConfig>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.map(|c| c.output_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("runs/verify"))
    }

    /// Executes the command; the error carries the exit code.
    pub fn run(&self) -> Result<()> {
        if self.command == Command::Verify {
            let suite: Suite = self.suite.parse()?;
            let cfg = self.config.as_ref().map(|_| self.load_config()).transpose()?;
            let out = self.out_dir(cfg.as_ref());
            let batch = cmd_verify(suite, &out)?;
            let s = batch.summary();
            println!("{} checks passed ({} skipped); report in {}", s.passed, s.skipped, out.display());
            return Ok(());
        }
        let cfg = self.load_config()?;
        let out = self.out_dir(Some(&cfg));
        match self.command {
            Command::Evolve => {
                let traj = cmd_evolve(&cfg, &out)?;
                println!("{} snapshots written to {}", traj.len(), out.display());
            }
            Command::Conservation => {
                let r = cmd_conservation(&cfg, &out)?;
                println!(
                    "κ = {}, max α drift {:.3e}, max hs² ratio {:.4}",
                    r.header.kappa, r.summary.max_alpha_drift, r.summary.max_hs_ratio
                );
                if !r.summary.alpha_drift_pass || !r.summary.hs_bound_pass {
                    return Err(Error::VerificationFailed(format!(
                        "α drift {:.3e} (tolerance {:e}), hs² ratio {:.4} (bound {})",
                        r.summary.max_alpha_drift, cfg.alpha_drift_tol, r.summary.max_hs_ratio, r.header.hs_factor
                    )));
                }
            }
            Command::TwoSided => {
                let r = cmd_two_sided(&cfg, &out)?;
                for b in &r.bounds {
                    println!(
                        "{}: ratio in [{:.4}, {:.4}], bound [{:.4}, {:.4}], F = {:.4}, F' = {:.4}, flagged {}",
                        b.label, b.min_ratio, b.max_ratio, b.lower_factor, b.upper_factor, b.factor_f, b.factor_f_alt, b.flagged
                    );
                }
            }
            Command::Galilei => {
                let r = cmd_galilei_demo(&cfg, &out)?;
                println!("μ = {}, relative discrepancy {:.3e}", r.mu, r.relative_discrepancy);
            }
            Command::Verify => unreachable!(),
        }
        Ok(())
    }
}

/// Caps the global rayon pool from [`THREADS_ENV`] when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={v} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 4 } else { 0 };
        }
    };
    match configure_threads().and_then(|_| cli.run()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_form() {
        let cli = Cli::try_parse_from(["boconserve", "two-sided", "--config", "c.json", "--seed", "3"]).unwrap();
        assert_eq!(cli.command, Command::TwoSided);
        assert_eq!(cli.seed, Some(3));
        let v = Cli::try_parse_from(["boconserve", "verify", "--suite", "line", "--out", "o"]).unwrap();
        assert_eq!(v.suite, "line");
        assert!(Cli::try_parse_from(["boconserve", "nope"]).is_err());
    }

    #[test]
    fn config_errors_map_to_exit_4() {
        assert_eq!(main_with_args(["boconserve", "evolve"]), 4);
        assert_eq!(main_with_args(["boconserve", "evolve", "--config", "/nonexistent.json"]), 4);
        assert_eq!(main_with_args(["boconserve", "verify", "--suite", "bogus"]), 4);
        assert_eq!(main_with_args(["boconserve", "--bogus"]), 4);
    }
}
