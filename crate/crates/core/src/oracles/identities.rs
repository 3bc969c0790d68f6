use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{IdentityReport, ReportParams};
use super::{kernel_matrix, Modes};
use crate::error::{Error, Result};
use crate::fourier::{derivative, hilbert_transform, CircleFunction};
use crate::kappa::{alpha_logdet, build_a, hs_norm, trace_product, OperatorA};

/// Residuals of the truncated commutator and telescope identities must sit
/// below `TRUNCATION_TOL / M⁺`.
pub const TRUNCATION_TOL: f64 = 0.256;
pub const HEAD_TOL: f64 = 1e-12;
pub const LEMMA1_TOL: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn params(kappa: f64, dim: usize, ell: Option<usize>) -> ReportParams {
    ReportParams {
        kappa: Some(kappa),
        dim: Some(dim),
        ell,
        seed: None,
    }
}

fn require_mean_zero(q: &CircleFunction) -> Result<()> {
    if q.is_mean_zero() {
        Ok(())
    } else {
        Err(Error::NonZeroMean { mean: q.mean() })
    }
}

fn trace_ab(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.transpose().iter()).map(|(x, y)| x * y).sum()
}

/// `tr{A(q) A(Hq'')}`, normalized by `‖A(q)‖ ‖A(Hq'')‖`. The summand is odd
/// under `ξ ↔ η`, so only round-off survives.
pub fn verify_head_identity(q: &CircleFunction, kappa: f64, dim: usize) -> Result<IdentityReport> {
    let hq2 = hilbert_transform(&derivative(&derivative(q)));
    let a = build_a(q, kappa, dim)?;
    let b = build_a(&hq2, kappa, dim)?;
    let t = trace_product(&[&a, &b])?;
    Ok(IdentityReport::new(
        "head",
        t.norm(),
        hs_norm(&a) * hs_norm(&b),
        HEAD_TOL,
        params(kappa, dim, None),
    ))
}

/// How intermediate frequencies are summed when forming
/// `√R C₊ q C₊ f C₊ √R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorAssembly {
    /// Each factor carries its exact kernel (intermediate sum over all of
    /// `H⁺`) and is then cut to `M⁺ × M⁺`.
    ExactKernels,
    /// Every multiplication operator is cut to `M⁺ × M⁺` first. The identity
    /// then holds exactly at every `M⁺`.
    Truncated,
}

/// `(‖LHS - RHS‖_F, ‖LHS‖_F)` for
/// `A(q)A(f')A(q) = i√R C₊qC₊fC₊√R A(q) - i A(q) √R C₊fC₊qC₊√R`.
pub fn commutator_residual(
    q: &CircleFunction,
    f: &CircleFunction,
    kappa: f64,
    dim: usize,
    assembly: CommutatorAssembly,
) -> Result<(f64, f64)> {
    require_mean_zero(q)?;
    require_mean_zero(f)?;
    let (bq, bf) = (q.band_limit(), f.band_limit());
    if 4 * (bq + bf) > dim {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("bands {bq} + {bf} are too close to the truncation M⁺ = {dim}"),
        });
    }
    let qm = Modes::from_function(q);
    let fm = Modes::from_function(f);
    let fp = fm.multiplier(|x| I * x);
    let a = kernel_matrix(|d| qm.get(d), kappa, dim);
    let afp = kernel_matrix(|d| fp.get(d), kappa, dim);

    let inner = match assembly {
        CommutatorAssembly::ExactKernels => dim + bq + bf,
        CommutatorAssembly::Truncated => dim,
    };
    // plain multiplication operators on 1..=inner, weights applied after
    let mult = |m: &Modes| DMatrix::from_fn(inner, inner, |j, k| m.get(j as i64 - k as i64));
    let (mq, mf) = (mult(&qm), mult(&fm));
    let weight = |j: usize| 1.0 / (kappa + 2.0 * std::f64::consts::PI * (j + 1) as f64).sqrt();
    let sandwich = |x: DMatrix<Complex64>| {
        DMatrix::from_fn(dim, dim, |j, k| x[(j, k)] * (weight(j) * weight(k)))
    };
    let x = sandwich(&mq * &mf);
    let y = sandwich(&mf * &mq);

    let lhs = &a * &afp * &a;
    let rhs = (&x * &a - &a * &y) * I;
    Ok(((lhs.clone() - rhs).norm(), lhs.norm()))
}

/// Commutator identity with exact factor kernels. The mismatch comes only
/// from rows near the truncation edge; the tolerance is `TRUNCATION_TOL/M⁺`.
pub fn verify_commutator_identity(
    q: &CircleFunction,
    f: &CircleFunction,
    kappa: f64,
    dim: usize,
) -> Result<IdentityReport> {
    let (res, scale) = commutator_residual(q, f, kappa, dim, CommutatorAssembly::ExactKernels)?;
    Ok(IdentityReport::new(
        "commutator",
        res,
        scale,
        TRUNCATION_TOL / dim as f64,
        params(kappa, dim, None),
    ))
}

/// `2 tr{A(q)^{ℓ-1} A(qq')}` against `tr{A(q)^{ℓ-1} A(Hq'') A(q)}`,
/// normalized by the larger of the two.
pub fn verify_telescope_identity(q: &CircleFunction, ell: usize, kappa: f64, dim: usize) -> Result<IdentityReport> {
    if !(2..=4).contains(&ell) {
        return Err(Error::InvalidParameter {
            name: "ell",
            reason: format!("ℓ = {ell} is outside 2..=4"),
        });
    }
    require_mean_zero(q)?;
    if 4 * q.band_limit() > dim {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("band {} is too close to the truncation M⁺ = {dim}", q.band_limit()),
        });
    }
    let qm = Modes::from_function(q);
    let qp = qm.multiplier(|x| I * x);
    let qqp = qm.product(&qp);
    let hq2 = qm.multiplier(|x| I * x.signum() * x * x);

    let a = kernel_matrix(|d| qm.get(d), kappa, dim);
    let b_prod = kernel_matrix(|d| qqp.get(d), kappa, dim);
    let b_disp = kernel_matrix(|d| hq2.get(d), kappa, dim);
    let mut power = a.clone();
    for _ in 2..ell {
        power = &power * &a;
    }
    let lhs = trace_ab(&power, &b_prod) * 2.0;
    let rhs = trace_ab(&(&power * &b_disp), &a);
    Ok(IdentityReport::new(
        "telescope",
        (lhs - rhs).norm(),
        lhs.norm().max(rhs.norm()),
        TRUNCATION_TOL / dim as f64,
        params(kappa, dim, Some(ell)),
    ))
}

/// Residuals of one check at increasing `M⁺`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSweep {
    pub dims: Vec<usize>,
    pub relative: Vec<f64>,
    /// `log2(r(M)/r(2M))`-style orders between consecutive entries.
    pub orders: Vec<f64>,
    /// Least-squares slope of `-log r` against `log M⁺`.
    pub fitted_order: f64,
    pub decreasing: bool,
}

/// Collects reports produced at increasing `M⁺` into orders of convergence.
pub fn convergence_sweep(reports: &[IdentityReport]) -> ConvergenceSweep {
    let dims: Vec<usize> = reports.iter().map(|r| r.params.dim.unwrap_or(0)).collect();
    let relative: Vec<f64> = reports.iter().map(IdentityReport::relative).collect();
    let logs: Vec<(f64, f64)> = dims
        .iter()
        .zip(&relative)
        .map(|(&m, &r)| ((m as f64).ln(), -r.ln()))
        .collect();
    let orders = logs
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect();
    let n = logs.len() as f64;
    let (mx, my) = logs.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    ConvergenceSweep {
        decreasing: relative.windows(2).all(|w| w[1] < w[0]),
        dims,
        relative,
        orders,
        fitted_order: sxy / sxx,
    }
}

/// `(1/3)‖A‖² ≤ α ≤ (2/3)‖A‖²` with `α` from the log-determinant. Skipped
/// when `‖A‖_{I₂} ≥ 1/3`.
pub fn verify_lemma1_operator(a: &OperatorA) -> Result<IdentityReport> {
    let h = hs_norm(a);
    let p = params(a.kappa(), a.dim(), None);
    if h >= 1.0 / 3.0 {
        return Ok(IdentityReport::skipped("lemma1", LEMMA1_TOL, p));
    }
    let alpha = alpha_logdet(a)?.alpha;
    let h2 = h * h;
    let outside = (h2 / 3.0 - alpha).max(alpha - 2.0 * h2 / 3.0).max(0.0);
    Ok(IdentityReport::new("lemma1", outside, h2, LEMMA1_TOL, p))
}

/// [`verify_lemma1_operator`] at the default truncation `M⁺ = 4·band`.
pub fn verify_lemma1_bounds(q: &CircleFunction, kappa: f64) -> Result<IdentityReport> {
    let dim = (4 * q.band_limit()).max(4);
    verify_lemma1_operator(&build_a(q, kappa, dim)?)
}
