//! Finite-rank realization of `A(κ; q) = √R_κ C₊ q C₊ √R_κ` on the positive
//! frequencies `ξ_j = 2πj`, `j = 1..=M⁺`, and the conserved functional
//!
//! ```text
//! α(κ; q) = Σ_{ℓ≥2} tr(A^ℓ)/ℓ = Σ_i [-log(1 - λ_i) - λ_i].
//! ```
//!
//! The matrix entries are `A[j,k] = q̂(ξ_j - ξ_k) / √((κ+ξ_j)(κ+ξ_k))`.

mod threshold;

pub use threshold::{kappa_threshold, threshold_constant, ThresholdReport};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{freq, CircleFunction};

/// Imaginary round-off tolerated in traces of powers, relative to `max(|α|, ‖A‖²)`.
const REALNESS_TOL: f64 = 1e-12;

/// Eigenvalues must stay this far below 1 for the log-determinant.
const EIGEN_MARGIN: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct OperatorA {
    kappa: f64,
    matrix: DMatrix<Complex64>,
    source_band: usize,
}

impl OperatorA {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Number of retained positive frequencies `M⁺`.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn source_band(&self) -> usize {
        self.source_band
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Wraps an arbitrary Hermitian matrix, e.g. a diagonal one with
    /// prescribed eigenvalues. Rejects non-Hermitian input.
    pub fn from_hermitian(kappa: f64, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::OperatorMismatch("matrix is not square".into()));
        }
        let scale = matrix.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for j in 0..n {
            for k in j..n {
                if (matrix[(j, k)] - matrix[(k, j)].conj()).norm() > 1e-14 * scale {
                    return Err(Error::OperatorMismatch(format!("entry ({j},{k}) breaks Hermitian symmetry")));
                }
            }
        }
        Ok(OperatorA {
            kappa,
            matrix,
            source_band: n,
        })
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter {
            name: "kappa",
            reason: format!("{kappa} is not a finite value ≥ 1"),
        });
    }
    Ok(())
}

/// Assembles `A(κ; q)` on `M⁺ = dim` positive frequencies.
///
/// `q` must have mean exactly zero; data with a mean is handled by first
/// removing it with a Galilei boost.
pub fn build_a(q: &CircleFunction, kappa: f64, dim: usize) -> Result<OperatorA> {
    check_kappa(kappa)?;
    if !q.is_mean_zero() {
        return Err(Error::NonZeroMean { mean: q.mean() });
    }
    if dim < q.band_limit() || dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("M⁺ = {dim} is below the band limit {} of q", q.band_limit()),
        });
    }
    let weights: Vec<f64> = (1..=dim as i64)
        .map(|j| 1.0 / (kappa + freq(j)).sqrt())
        .collect();
    let matrix = DMatrix::from_fn(dim, dim, |j, k| {
        q.coeff(j as i64 - k as i64) * (weights[j] * weights[k])
    });
    Ok(OperatorA {
        kappa,
        matrix,
        source_band: q.band_limit(),
    })
}

/// Discrete Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(a: &OperatorA) -> f64 {
    a.matrix.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaMethod {
    Series,
    Logdet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaReport {
    pub alpha: f64,
    pub method: AlphaMethod,
    pub ell_max: Option<usize>,
    pub tail_bound: f64,
    pub hs_norm: f64,
    pub truncation_dim: usize,
}

/// Bound on `|Σ_{ℓ>L} tr(A^ℓ)/ℓ|` when `‖A‖_{I₂} = h < 1`.
pub fn series_tail_bound(h: f64, ell_max: usize) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let l1 = (ell_max + 1) as f64;
    h.powf(l1) / (l1 * (1.0 - h))
}

/// `Σ_{ℓ=2}^{L} tr(A^ℓ)/ℓ` by repeated multiplication.
pub fn alpha_series(a: &OperatorA, ell_max: usize) -> Result<AlphaReport> {
    if ell_max < 2 {
        return Err(Error::InvalidParameter {
            name: "ell_max",
            reason: "series starts at ℓ = 2".into(),
        });
    }
    let h = hs_norm(a);
    if h >= 1.0 {
        return Err(Error::HsNormTooLarge { hs: h, limit: 1.0 });
    }
    let mut power = a.matrix.clone();
    let mut sum = Complex64::new(0.0, 0.0);
    for ell in 2..=ell_max {
        power = &power * &a.matrix;
        sum += power.trace() / ell as f64;
    }
    let scale = sum.re.abs().max(h * h);
    if sum.im.abs() > REALNESS_TOL * scale {
        return Err(Error::NonRealTrace {
            real: sum.re,
            imag: sum.im,
        });
    }
    Ok(AlphaReport {
        alpha: sum.re,
        method: AlphaMethod::Series,
        ell_max: Some(ell_max),
        tail_bound: series_tail_bound(h, ell_max),
        hs_norm: h,
        truncation_dim: a.dim(),
    })
}

/// `-log(1-λ) - λ`, summed as a power series near zero to avoid cancellation.
pub(crate) fn log_det_term(lambda: f64) -> f64 {
    if lambda.abs() < 0.05 {
        let mut term = lambda;
        let mut acc = 0.0;
        for ell in 2..60 {
            term *= lambda;
            let t = term / ell as f64;
            acc += t;
            if t.abs() <= 1e-18 * acc.abs() {
                break;
            }
        }
        acc
    } else {
        -(-lambda).ln_1p() - lambda
    }
}

/// Eigenvalues of the Hermitian matrix, ascending.
pub fn eigenvalues(a: &OperatorA) -> Vec<f64> {
    let mut ev: Vec<f64> = a.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `α = Σ_i [-log(1-λ_i) - λ_i]` over the eigenvalues of `A`. Exact at the
/// given truncation, so the tail bound is zero.
pub fn alpha_logdet(a: &OperatorA) -> Result<AlphaReport> {
    let ev = eigenvalues(a);
    if let Some(&top) = ev.last() {
        if top >= 1.0 - EIGEN_MARGIN {
            return Err(Error::EigenvalueTooLarge { lambda: top });
        }
    }
    let alpha = ev.iter().map(|&l| log_det_term(l)).sum();
    Ok(AlphaReport {
        alpha,
        method: AlphaMethod::Logdet,
        ell_max: None,
        tail_bound: 0.0,
        hs_norm: hs_norm(a),
        truncation_dim: a.dim(),
    })
}

/// Same functional as [`alpha_logdet`], evaluated as `-log det(1 - A) - tr A`
/// through a banded Cholesky factorization of `1 - A`. Costs `O(M⁺ b²)` with
/// `b` the source band, which makes large truncations affordable along
/// trajectories.
pub fn alpha_logdet_banded(a: &OperatorA) -> Result<AlphaReport> {
    let h = hs_norm(a);
    if h >= 1.0 - EIGEN_MARGIN {
        return Err(Error::HsNormTooLarge { hs: h, limit: 1.0 });
    }
    let n = a.dim();
    let p = a.source_band.min(n.saturating_sub(1));
    // row i of the factor holds L[i, i-p..=i] at offsets 0..=p
    let mut l = vec![Complex64::new(0.0, 0.0); n * (p + 1)];
    let at = |i: usize, k: usize| i * (p + 1) + (k + p - i);
    let mut log_det = 0.0;
    let mut trace = 0.0;
    for j in 0..n {
        let lo = j.saturating_sub(p);
        let mut d = 1.0 - a.matrix[(j, j)].re;
        trace += a.matrix[(j, j)].re;
        for k in lo..j {
            d -= l[at(j, k)].norm_sqr();
        }
        if d <= EIGEN_MARGIN {
            return Err(Error::EigenvalueTooLarge { lambda: 1.0 - d.max(0.0) });
        }
        let djj = d.sqrt();
        l[at(j, j)] = Complex64::new(djj, 0.0);
        log_det += 2.0 * djj.ln();
        for i in j + 1..(j + p + 1).min(n) {
            let mut v = -a.matrix[(i, j)];
            for k in i.saturating_sub(p)..j {
                v -= l[at(i, k)] * l[at(j, k)].conj();
            }
            l[at(i, j)] = v / djj;
        }
    }
    Ok(AlphaReport {
        alpha: 0.0 - log_det - trace,
        method: AlphaMethod::Logdet,
        ell_max: None,
        tail_bound: 0.0,
        hs_norm: h,
        truncation_dim: n,
    })
}

/// `tr(A₁ A₂ ⋯ A_n)` for operators sharing `κ` and `M⁺`.
pub fn trace_product(ops: &[&OperatorA]) -> Result<Complex64> {
    if ops.len() < 2 {
        return Err(Error::OperatorMismatch("need at least two factors".into()));
    }
    let (kappa, dim) = (ops[0].kappa, ops[0].dim());
    for op in ops {
        if op.kappa != kappa || op.dim() != dim {
            return Err(Error::OperatorMismatch(format!(
                "factor has (κ={}, M⁺={}) against (κ={kappa}, M⁺={dim})",
                op.kappa,
                op.dim()
            )));
        }
    }
    let (last, head) = ops.split_last().expect("len ≥ 2");
    let mut prod = head[0].matrix.clone();
    for op in &head[1..] {
        prod = &prod * &op.matrix;
    }
    Ok(trace_of_product(&prod, &last.matrix))
}

/// `tr(XY)` without forming the product.
pub(crate) fn trace_of_product(x: &DMatrix<Complex64>, y: &DMatrix<Complex64>) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}
