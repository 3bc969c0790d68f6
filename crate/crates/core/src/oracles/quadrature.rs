use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

const NODES: usize = 20;
const MAX_DEPTH: usize = 40;

fn rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(NODES).expect("nonzero")))
}

/// Adaptive Gauss-Legendre on `[a, b]`: a panel is accepted once its value
/// agrees with the sum over its two halves to `rtol` of the running total.
pub fn integrate(f: &impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let whole = rule().integrate(a, b, f);
    let tol = rtol * whole.abs().max(f64::MIN_POSITIVE);
    refine(f, a, b, whole, tol, MAX_DEPTH)
}

fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = rule().integrate(a, m, f);
    let right = rule().integrate(m, b, f);
    let both = left + right;
    if !both.is_finite() {
        return Err(Error::Quadrature(format!("non-finite integrand on [{a}, {b}]")));
    }
    if (both - whole).abs() <= tol {
        return Ok(both);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "no convergence on [{a}, {b}]: panel estimates differ by {:e}",
            (both - whole).abs()
        )));
    }
    Ok(refine(f, a, m, left, 0.5 * tol, depth - 1)? + refine(f, m, b, right, 0.5 * tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_and_peaked_functions() {
        let v = integrate(&|x: f64| x.exp(), 0.0, 1.0, 1e-14).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        let w = integrate(&|x: f64| 1.0 / (1e-3 + x), 0.0, 1.0, 1e-13).unwrap();
        assert!((w - (1.0f64 / 1e-3).ln_1p()).abs() < 1e-11);
        assert_eq!(integrate(&|x: f64| x, 2.0, 2.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn reports_non_convergence() {
        assert!(integrate(&|x: f64| 1.0 / x.abs(), -1.0, 1.0, 1e-12).is_err());
    }
}
