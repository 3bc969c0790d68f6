//! Oracle sweeps behind `boconserve verify`. Default parameters per suite:
//!
//! | suite        | inputs                                                            | check                                   |
//! |--------------|-------------------------------------------------------------------|-----------------------------------------|
//! | `hs`         | 20 rough seeds, band 10, κ = 1+seed                               | double sum, truncation gap, direct traces |
//! | `head`       | 50 smooth seeds, band 16, κ = 1+seed mod 8, M⁺ = 128              | normalized trace ≤ 1e-12                |
//! | `telescope`  | 4 smooth seeds, band 8, κ = 2, ℓ ∈ {2,3}, M⁺ ∈ {64,128,256}       | residual ≤ 0.256/M⁺, order ≥ 1          |
//! | `commutator` | cosine pairs and band-3 pairs, κ = 1, M⁺ ∈ {32,64,128}            | residual ≤ 0.256/M⁺, order ≥ 1          |
//! | `lemma1`     | 100 cases from [`lemma1_case`]                                    | sandwich, exterior ≤ 1e-12·hs²          |
//! | `besov`      | s ∈ {-0.1,-0.25,-0.4}, r ∈ {1,2,∞}, κ₀ ∈ {1,4,16}, seeds 1000..1020 | constants from seeds 0..200           |
//! | `line`       | gaussian and lorentzian-pair profiles, κ ∈ {1,4,16}               | 2D vs 1D ≤ 1e-6                         |

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{random_rough, random_smooth, CircleFunction};
use crate::kappa::{build_a, hs_norm, trace_product};
use crate::norms::Summability;
use crate::oracles::{
    besov_building_check, building_corpus_sample, calibrate_building_constants, convergence_sweep,
    hs_double_sum, hs_squared_exact, line_hs_identity_check, trace_direct_sum, verify_commutator_identity,
    verify_head_identity, verify_lemma1_bounds, verify_telescope_identity, IdentityReport, ReportBatch,
    ReportParams, SpectralProfile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Hs,
    Head,
    Telescope,
    Commutator,
    Lemma1,
    Besov,
    Line,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Hs,
        Suite::Head,
        Suite::Telescope,
        Suite::Commutator,
        Suite::Lemma1,
        Suite::Besov,
        Suite::Line,
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "hs" => Suite::Hs,
            "head" => Suite::Head,
            "telescope" => Suite::Telescope,
            "commutator" => Suite::Commutator,
            "lemma1" => Suite::Lemma1,
            "besov" => Suite::Besov,
            "line" => Suite::Line,
            other => {
                return Err(Error::Config(format!(
                    "unknown suite `{other}`; expected all, hs, head, telescope, commutator, lemma1, besov or line"
                )))
            }
        })
    }
}

pub const TELESCOPE_DIMS: [usize; 3] = [64, 128, 256];
pub const COMMUTATOR_DIMS: [usize; 3] = [32, 64, 128];
pub const BESOV_S: [f64; 3] = [-0.1, -0.25, -0.4];
pub const BESOV_R: [Summability; 3] = [Summability::Finite(1.0), Summability::Finite(2.0), Summability::Infinite];
pub const BESOV_KAPPAS: [f64; 3] = [1.0, 4.0, 16.0];
pub const LINE_KAPPAS: [f64; 3] = [1.0, 4.0, 16.0];
pub const LINE_PROFILES: [SpectralProfile; 2] = [
    SpectralProfile::Gaussian {
        amplitude: 1.0,
        width: 3.0,
    },
    SpectralProfile::LorentzianPair {
        amplitude: 0.5,
        decay: 0.4,
        separation: 1.5,
    },
];

/// `cos(2πkx)·amp`.
pub fn cos_mode(k: usize, amp: f64) -> CircleFunction {
    let mut half = vec![Complex64::new(0.0, 0.0); k + 1];
    half[k] = Complex64::new(amp / 2.0, 0.0);
    CircleFunction::from_nonnegative(&half)
}

/// Random `(q, κ)` with band in `8..=16`, κ in `[1, 16)` and `q` rescaled so
/// that `‖A(κ; q)‖_{I₂}` is uniform in `(0.02, 0.98)·hs_max` at `M⁺ = 4·band`.
pub fn random_operator_case(seed: u64, hs_max: f64) -> Result<(CircleFunction, f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6c65_6d6d_6131);
    let band = rng.gen_range(8..=16);
    let kappa = rng.gen_range(1.0..16.0);
    let target = hs_max * rng.gen_range(0.02..0.98);
    let q = random_rough(-0.25, seed, band, 1.0)?;
    let dim = 4 * band;
    let h = hs_norm(&build_a(&q, kappa, dim)?);
    Ok((q.scaled(target / h), kappa, dim))
}

/// The lemma-1 sweep case for `seed`: hs norm below 1/3.
pub fn lemma1_case(seed: u64) -> Result<(CircleFunction, f64)> {
    let (q, kappa, _) = random_operator_case(seed, 1.0 / 3.0)?;
    Ok((q, kappa))
}

fn params(kappa: f64, dim: usize, ell: Option<usize>, seed: u64) -> ReportParams {
    ReportParams {
        kappa: Some(kappa),
        dim: Some(dim),
        ell,
        seed: Some(seed),
    }
}

/// One row per sweep: residual `max(0, 1 - min order)`, tolerance 0, so it
/// passes iff the residual decreases at least like `1/M⁺` between every pair
/// of consecutive truncations.
pub fn order_report(name: &str, reports: &[IdentityReport], seed: u64) -> IdentityReport {
    let sweep = convergence_sweep(reports);
    let min_order = if reports.iter().all(|r| r.residual == 0.0) {
        f64::INFINITY
    } else {
        sweep.orders.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let residual = if min_order.is_nan() { 1.0 } else { (1.0 - min_order).max(0.0) };
    IdentityReport::new(
        name,
        residual,
        1.0,
        0.0,
        ReportParams {
            ell: reports.first().and_then(|r| r.params.ell),
            kappa: reports.first().and_then(|r| r.params.kappa),
            seed: Some(seed),
            dim: None,
        },
    )
}

fn suite_hs() -> Result<Vec<IdentityReport>> {
    let rows: Vec<Vec<IdentityReport>> = (0..20u64)
        .into_par_iter()
        .map(|seed| -> Result<Vec<IdentityReport>> {
            let q = random_rough(-0.3, seed, 10, 1.0)?;
            let kappa = 1.0 + seed as f64;
            let mut out = Vec::new();
            let dim = 40;
            let a = build_a(&q, kappa, dim)?;
            let fast = hs_norm(&a).powi(2);
            let direct = hs_double_sum(&q, kappa, dim);
            out.push(IdentityReport::new("hs_double_sum", (fast - direct).abs(), fast, 1e-13, params(kappa, dim, None, seed)));
            // truncation gap is nonnegative and at most ‖q‖²/M⁺
            let exact = hs_squared_exact(&q, kappa)?;
            let gap = exact - fast;
            let bound = q.l2_norm().powi(2) / dim as f64;
            let outside = (-gap).max(gap - bound).max(0.0);
            out.push(IdentityReport::new("hs_truncation", outside, exact, 1e-13, params(kappa, dim, None, seed)));
            let small = build_a(&q, kappa, 16)?;
            for ell in [2, 3] {
                let ops = vec![&small; ell];
                let fast = trace_product(&ops)?;
                let direct = trace_direct_sum(&q, kappa, ell, 16)?;
                out.push(IdentityReport::new(
                    "trace_direct",
                    (fast - direct).norm(),
                    fast.norm().max(hs_norm(&small).powi(ell as i32)),
                    1e-12,
                    params(kappa, 16, Some(ell), seed),
                ));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn suite_head() -> Result<Vec<IdentityReport>> {
    (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let q = random_smooth(3.0, seed, 16, 1.0)?;
            Ok(verify_head_identity(&q, 1.0 + (seed % 8) as f64, 128)?.with_seed(seed))
        })
        .collect()
}

/// Band-8 smooth data for the telescope sweep.
pub fn telescope_case(seed: u64) -> Result<CircleFunction> {
    random_smooth(2.0, seed, 8, 1.0)
}

fn suite_telescope() -> Result<Vec<IdentityReport>> {
    let rows: Vec<Vec<IdentityReport>> = (0..4u64)
        .into_par_iter()
        .map(|seed| -> Result<Vec<IdentityReport>> {
            let q = telescope_case(seed)?;
            let mut out = Vec::new();
            for ell in [2, 3] {
                let sweep = TELESCOPE_DIMS
                    .iter()
                    .map(|&dim| Ok(verify_telescope_identity(&q, ell, 2.0, dim)?.with_seed(seed)))
                    .collect::<Result<Vec<_>>>()?;
                out.push(order_report("telescope_order", &sweep, seed));
                out.extend(sweep);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// Input pairs of the commutator sweep: two cosine pairs and three random
/// band-3 pairs.
pub fn commutator_cases() -> Result<Vec<(CircleFunction, CircleFunction)>> {
    let mut cases = vec![(cos_mode(1, 1.0), cos_mode(2, 1.0)), (cos_mode(2, 1.0), cos_mode(3, 0.5))];
    for seed in 0..3 {
        cases.push((random_smooth(2.0, seed, 3, 1.0)?, random_smooth(2.0, seed + 100, 3, 1.0)?));
    }
    Ok(cases)
}

fn suite_commutator() -> Result<Vec<IdentityReport>> {
    let rows: Vec<Vec<IdentityReport>> = commutator_cases()?
        .into_par_iter()
        .enumerate()
        .map(|(i, (q, f))| -> Result<Vec<IdentityReport>> {
            let sweep = COMMUTATOR_DIMS
                .iter()
                .map(|&dim| Ok(verify_commutator_identity(&q, &f, 1.0, dim)?.with_seed(i as u64)))
                .collect::<Result<Vec<_>>>()?;
            let mut out = vec![order_report("commutator_order", &sweep, i as u64)];
            out.extend(sweep);
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn suite_lemma1() -> Result<Vec<IdentityReport>> {
    (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let (q, kappa) = lemma1_case(seed)?;
            Ok(verify_lemma1_bounds(&q, kappa)?.with_seed(seed))
        })
        .collect()
}

fn suite_besov() -> Result<Vec<IdentityReport>> {
    let grid: Vec<(f64, Summability)> = BESOV_S
        .iter()
        .flat_map(|&s| BESOV_R.iter().map(move |&r| (s, r)))
        .collect();
    let rows: Vec<Vec<IdentityReport>> = grid
        .into_par_iter()
        .map(|(s, r)| -> Result<Vec<IdentityReport>> {
            let constants = calibrate_building_constants(s, r, 0..200, &BESOV_KAPPAS)?;
            let mut out = Vec::new();
            for seed in 1000..1020 {
                let f = building_corpus_sample(s, seed);
                for &k in &BESOV_KAPPAS {
                    out.push(constants.report(&besov_building_check(&f, s, r, k)?).with_seed(seed));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn suite_line() -> Result<Vec<IdentityReport>> {
    let mut out = Vec::new();
    for p in LINE_PROFILES {
        for k in LINE_KAPPAS {
            out.push(line_hs_identity_check(&p, k)?);
        }
    }
    Ok(out)
}

/// Runs one suite (or all of them) and collects the reports.
pub fn run_suite(suite: Suite) -> Result<ReportBatch> {
    let mut batch = ReportBatch::default();
    let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    for s in suites {
        log::info!("running suite {s:?}");
        batch.extend(match s {
            Suite::Hs => suite_hs()?,
            Suite::Head => suite_head()?,
            Suite::Telescope => suite_telescope()?,
            Suite::Commutator => suite_commutator()?,
            Suite::Lemma1 => suite_lemma1()?,
            Suite::Besov => suite_besov()?,
            Suite::Line => suite_line()?,
            Suite::All => unreachable!(),
        });
    }
    Ok(batch)
}

/// Writes `verify.csv`, `verify_summary.json` and, on failure,
/// `verify_failures.csv`; fails with a verification error unless every row passes.
pub fn cmd_verify(suite: Suite, out: &Path) -> Result<ReportBatch> {
    let batch = run_suite(suite)?;
    std::fs::create_dir_all(out)?;
    batch.write_csv(&out.join("verify.csv"))?;
    batch.write_summary(&out.join("verify_summary.json"))?;
    if !batch.all_pass() {
        batch.write_failures_csv(&out.join("verify_failures.csv"))?;
        let s = batch.summary();
        return Err(Error::VerificationFailed(format!(
            "{} of {} checks failed; see verify_failures.csv",
            s.failed, s.total
        )));
    }
    Ok(batch)
}
