//! End-to-end experiment drivers behind the `boconserve` binary. Every
//! command is deterministic given its config and seed, and every report
//! embeds the config hash.

pub mod cli;
mod config;
mod conservation;
mod galilei;
mod two_sided;
pub mod verify;

pub use config::{ExperimentConfig, InitialData, KappaPolicy, RandomSpec, TrackedNorm};
pub use conservation::{
    cmd_conservation, cmd_evolve, resolve_kappa, run_conservation, snapshot_row, write_dat, ConservationHeader,
    ConservationReport, ConservationRow, ConservationSummary, DRIFT_FLOOR, HS_FACTOR,
};
pub use galilei::{cmd_galilei_demo, run_galilei, Comparability, GalileiReport, COMPARABILITY_BOUNDS, GALILEI_TOL};
pub use two_sided::{
    cmd_two_sided, two_sided_from_report, BoundConstants, NormBound, TwoSidedReport, TwoSidedRow, BUILDING_KAPPAS,
    CALIBRATION_SEEDS, EQUIVALENCE_KAPPAS,
};
pub use verify::{cmd_verify, run_suite, Suite};
