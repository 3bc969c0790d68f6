//! Pseudospectral integration of the Benjamin-Ono equation
//!
//! ```text
//! q_t = -H q'' + 2 q q'
//! ```
//!
//! on the circle. With `(Hf)^ = -i sgn(ξ) f̂` and `(f'')^ = -ξ² f̂` we get
//! `(Hq'')^ = i sgn(ξ) ξ² q̂ = iξ|ξ| q̂`, and `2qq' = (q²)'`, so in Fourier
//! variables
//!
//! ```text
//! ∂_t q̂(ξ) = -iξ|ξ| q̂(ξ) + iξ (q²)^(ξ).
//! ```
//!
//! The linear part is purely dispersive and is integrated exactly.

mod etdrk4;
mod trajectory;

pub use trajectory::{Provenance, Trajectory};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{derivative, freq, pointwise_product, CircleFunction, SpectralGrid};

use etdrk4::Stepper;

/// Abort when the L² norm exceeds this multiple of its initial value.
pub const BLOWUP_FACTOR: f64 = 1e3;

/// Default limit on the energy fraction held by the top octave of modes.
pub const DEFAULT_TAIL_LIMIT: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    Etdrk4,
    Rk4IntegratingFactor,
}

fn default_true() -> bool {
    true
}

fn default_tail_limit() -> f64 {
    DEFAULT_TAIL_LIMIT
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Spatial band limit of the simulation.
    #[serde(rename = "M")]
    pub band: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub final_time: f64,
    pub integrator: Integrator,
    #[serde(default = "default_true")]
    pub dealias: bool,
    pub snapshot_every: usize,
    /// Drops the `2qq'` term; used for solver validation.
    #[serde(default)]
    pub linear_only: bool,
    /// Top-octave energy fraction that aborts the run; `null` disables the monitor.
    #[serde(default = "default_tail_limit_opt")]
    pub tail_limit: Option<f64>,
}

fn default_tail_limit_opt() -> Option<f64> {
    Some(default_tail_limit())
}

impl SolverConfig {
    /// ETDRK4 with dealiasing at band `8 × initial_band`.
    pub fn for_initial_band(initial_band: usize, dt: f64, final_time: f64) -> Self {
        SolverConfig {
            band: (8 * initial_band).max(4),
            dt,
            final_time,
            integrator: Integrator::Etdrk4,
            dealias: true,
            snapshot_every: 1,
            linear_only: false,
            tail_limit: Some(DEFAULT_TAIL_LIMIT),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad("dt", format!("{} must be positive", self.dt));
        }
        if !(self.final_time >= 0.0) || !self.final_time.is_finite() {
            return bad("T", format!("{} must be nonnegative", self.final_time));
        }
        if self.band < 4 {
            return bad("M", format!("{} is below the minimum of 4", self.band));
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every", "must be at least 1".into());
        }
        Ok(())
    }

    /// Number of steps; `T` must be an integer multiple of `dt` up to round-off.
    pub fn steps(&self) -> usize {
        (self.final_time / self.dt).round() as usize
    }
}

/// `f̂(ξ) ↦ e^{-iξ|ξ|t} f̂(ξ)`, the exact flow of `q_t = -Hq''`.
pub fn linear_propagator(f: &CircleFunction, t: f64) -> CircleFunction {
    f.map_nonnegative(|k, c| {
        let xi = freq(k);
        c * Complex64::from_polar(1.0, -xi * xi * t)
    })
}

/// `2 f f' = (f²)'`, computed as the derivative of the dealiased square.
pub fn nonlinear_term(f: &CircleFunction) -> CircleFunction {
    derivative(&pointwise_product(f, f, true))
}

/// Galilei boost `q(t, x + 2μt) + μ`.
pub fn galilei(f: &CircleFunction, mu: f64, t: f64) -> CircleFunction {
    let shift = 2.0 * mu * t;
    let moved = f.map_nonnegative(|k, c| c * Complex64::from_polar(1.0, freq(k) * shift));
    moved.add(&CircleFunction::constant(mu))
}

/// Fraction of `‖q‖²` carried by modes with `M/2 < |k| ≤ M`.
pub fn tail_fraction(half: &[Complex64]) -> f64 {
    let band = half.len() - 1;
    let total: f64 = half.iter().skip(1).map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let top: f64 = half.iter().skip(band / 2 + 1).map(|c| c.norm_sqr()).sum();
    top / total
}

/// Right-hand side of the nonlinear part in Fourier variables, `iξ (q²)^`.
pub(crate) struct Nonlinearity {
    grid: Option<SpectralGrid>,
    square: Vec<Complex64>,
    linear_only: bool,
}

impl Nonlinearity {
    pub(crate) fn new(band: usize, dealias: bool, linear_only: bool) -> Self {
        Nonlinearity {
            grid: dealias.then(|| SpectralGrid::for_quadratic(band)),
            square: vec![Complex64::new(0.0, 0.0); band + 1],
            linear_only,
        }
    }

    pub(crate) fn eval(&mut self, half: &[Complex64], out: &mut [Complex64]) {
        if self.linear_only {
            out.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            return;
        }
        match &mut self.grid {
            Some(grid) => grid.square(half, &mut self.square),
            None => {
                // aliased: grid with exactly 2M+1 ≤ n points, no padding
                let n = (2 * half.len() - 1).next_power_of_two();
                let mut grid = SpectralGrid::new(n);
                grid.square(half, &mut self.square);
            }
        }
        for (k, (o, s)) in out.iter_mut().zip(&self.square).enumerate() {
            *o = Complex64::new(0.0, freq(k as i64)) * s;
        }
        out[0] = Complex64::new(0.0, 0.0);
    }
}

/// Integrates from `q0` and records snapshots every `snapshot_every` steps
/// (plus the final state).
pub fn evolve(q0: &CircleFunction, config: &SolverConfig) -> Result<Trajectory> {
    evolve_with_provenance(q0, config, Provenance::default())
}

pub fn evolve_with_provenance(
    q0: &CircleFunction,
    config: &SolverConfig,
    provenance: Provenance,
) -> Result<Trajectory> {
    config.validate()?;
    if q0.band_limit() > config.band {
        return Err(Error::InvalidParameter {
            name: "M",
            reason: format!(
                "initial band {} exceeds simulation band {}",
                q0.band_limit(),
                config.band
            ),
        });
    }
    let start = q0.with_band(config.band);
    let initial_l2 = start.l2_norm();
    let mut state: Vec<Complex64> = start.nonnegative().to_vec();
    let mut stepper = Stepper::new(config);

    let steps = config.steps();
    let mut times = vec![0.0];
    let mut states = vec![start];
    for step in 1..=steps {
        stepper.step(&mut state);
        let t = step as f64 * config.dt;
        let l2 = state.iter().skip(1).map(|c| 2.0 * c.norm_sqr()).sum::<f64>() + state[0].norm_sqr();
        if !l2.is_finite() {
            return Err(Error::Blowup {
                time: t,
                reason: "non-finite coefficient".into(),
            });
        }
        if l2.sqrt() > BLOWUP_FACTOR * initial_l2.max(f64::MIN_POSITIVE) {
            return Err(Error::Blowup {
                time: t,
                reason: format!("L² norm {} exceeds {BLOWUP_FACTOR}× initial", l2.sqrt()),
            });
        }
        if step % config.snapshot_every == 0 || step == steps {
            if let Some(limit) = config.tail_limit {
                let fraction = tail_fraction(&state);
                if fraction > limit {
                    return Err(Error::TailMonitor {
                        time: t,
                        fraction,
                        limit,
                    });
                }
            }
            times.push(t);
            states.push(CircleFunction::from_nonnegative(&state));
        }
    }
    Ok(Trajectory {
        times,
        states,
        config: config.clone(),
        provenance,
    })
}

/// Final state of [`evolve`] only.
pub fn evolve_final(q0: &CircleFunction, config: &SolverConfig) -> Result<CircleFunction> {
    let mut cfg = config.clone();
    cfg.snapshot_every = usize::MAX;
    let traj = evolve(q0, &cfg)?;
    Ok(traj.states.last().expect("initial state is always recorded").clone())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    /// `‖u_{dt_i} - u_{dt_{i+1}}‖_{L²}`
    pub differences: Vec<f64>,
    /// `log₂(d_i / d_{i+1})`
    pub orders: Vec<f64>,
    /// last entry of `orders`, or NaN when there are fewer than three runs
    pub observed_order: f64,
}

/// Runs at `dt, dt/2, …, dt/2^{refinements-1}` and measures the observed
/// order from successive L² differences.
pub fn self_convergence_order(
    q0: &CircleFunction,
    config: &SolverConfig,
    refinements: usize,
) -> Result<ConvergenceStudy> {
    if refinements < 3 {
        return Err(Error::InvalidParameter {
            name: "refinements",
            reason: "need at least three runs".into(),
        });
    }
    let mut dts = Vec::with_capacity(refinements);
    let mut finals = Vec::with_capacity(refinements);
    for i in 0..refinements {
        let mut cfg = config.clone();
        cfg.dt = config.dt / 2f64.powi(i as i32);
        dts.push(cfg.dt);
        finals.push(evolve_final(q0, &cfg)?);
    }
    let differences: Vec<f64> = finals.windows(2).map(|w| w[0].sub(&w[1]).l2_norm()).collect();
    let orders: Vec<f64> = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let observed_order = orders.last().copied().unwrap_or(f64::NAN);
    Ok(ConvergenceStudy {
        dts,
        differences,
        orders,
        observed_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{hilbert_transform, random_smooth};
    use std::f64::consts::PI;

    fn cos1() -> CircleFunction {
        CircleFunction::from_nonnegative(&[Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)])
    }

    fn config(band: usize, dt: f64, t: f64) -> SolverConfig {
        SolverConfig {
            band,
            dt,
            final_time: t,
            integrator: Integrator::Etdrk4,
            dealias: true,
            snapshot_every: 10,
            linear_only: false,
            tail_limit: None,
        }
    }

    #[test]
    fn propagator_examples() {
        let f = random_smooth(1.0, 4, 10, 1.0).unwrap();
        assert_eq!(linear_propagator(&f, 0.0), f);
        let g = linear_propagator(&f, 0.37);
        assert!((g.l2_norm() - f.l2_norm()).abs() <= 1e-14 * f.l2_norm());
        // cos(2πx) ↦ cos(2πx - 4π²t)
        let t = 0.013;
        let g = linear_propagator(&cos1(), t);
        for x in [0.0, 0.1, 0.55] {
            let expected = (2.0 * PI * x - 4.0 * PI * PI * t).cos();
            assert!((g.eval(x) - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn propagator_solves_linear_equation() {
        // d/dt e^{tL} f at t = 0 equals -H f'' (finite difference check)
        let f = random_smooth(2.0, 1, 6, 1.0).unwrap();
        let h = 1e-6;
        let fd = linear_propagator(&f, h).sub(&linear_propagator(&f, -h)).scaled(0.5 / h);
        let rhs = hilbert_transform(&derivative(&derivative(&f))).scaled(-1.0);
        assert!(fd.sub(&rhs).l2_norm() < 1e-6 * rhs.l2_norm());
    }

    #[test]
    fn nonlinear_examples() {
        assert!(nonlinear_term(&CircleFunction::constant(2.0)).is_zero());
        let n = nonlinear_term(&cos1().with_band(2));
        // ∂ₓ cos² = -2π sin(4πx)
        for x in [0.0, 0.13, 0.6] {
            assert!((n.eval(x) + 2.0 * PI * (4.0 * PI * x).sin()).abs() < 1e-13);
        }
        let q = random_smooth(1.0, 3, 20, 1.0).unwrap().add(&CircleFunction::constant(0.4));
        assert_eq!(nonlinear_term(&q).mean(), 0.0);
    }

    #[test]
    fn zero_and_constant_are_fixed_points() {
        let traj = evolve(&CircleFunction::zero(4), &config(8, 1e-3, 0.05)).unwrap();
        assert!(traj.states.iter().all(|s| s.is_zero()));
        let c = CircleFunction::constant(0.7);
        let traj = evolve(&c, &config(8, 1e-3, 0.05)).unwrap();
        assert!(traj.states.iter().all(|s| *s == c.with_band(8)));
    }

    #[test]
    fn small_data_follows_linear_flow() {
        let q0 = random_smooth(4.0, 2, 16, 1e-6).unwrap();
        let cfg = config(64, 1e-4, 0.1);
        let end = evolve_final(&q0, &cfg).unwrap();
        let lin = linear_propagator(&q0.with_band(64), 0.1);
        assert!(end.sub(&lin).l2_norm() < 1e-10, "{}", end.sub(&lin).l2_norm());
    }

    #[test]
    fn snapshots_and_mean() {
        let q0 = random_smooth(4.0, 8, 8, 0.5).unwrap().add(&CircleFunction::constant(0.25));
        let traj = evolve(&q0, &config(64, 1e-3, 0.1)).unwrap();
        assert_eq!(traj.times.len(), 11);
        assert_eq!(traj.times[0], 0.0);
        assert!(traj.states.iter().all(|s| s.mean() == 0.25));
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn l2_norm_is_conserved() {
        let q0 = random_smooth(4.0, 5, 8, 0.8).unwrap();
        let traj = evolve(&q0, &config(64, 1e-4, 0.2)).unwrap();
        let n0 = q0.l2_norm();
        for s in &traj.states {
            assert!((s.l2_norm() - n0).abs() <= 1e-8 * n0);
        }
    }

    #[test]
    fn linear_regime_is_time_reversible() {
        // q(t,x) ↦ q(-t,-x) maps solutions to solutions, so reflect, run
        // forward again and reflect back
        let q0 = random_smooth(2.0, 5, 8, 1.0).unwrap();
        let mut cfg = config(16, 1e-3, 0.1);
        cfg.linear_only = true;
        let forward = evolve_final(&q0, &cfg).unwrap();
        let back = evolve_final(&forward.reflect(), &cfg).unwrap().reflect();
        assert!(back.sub(&q0.with_band(16)).l2_norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_configs() {
        let q0 = random_smooth(2.0, 5, 8, 1.0).unwrap();
        assert!(evolve(&q0, &config(4, 1e-3, 0.1)).is_err());
        assert!(evolve(&q0, &config(16, 0.0, 0.1)).is_err());
        assert!(evolve(&q0, &config(16, 1e-3, -1.0)).is_err());
    }

    #[test]
    fn blowup_and_tail_monitor_fire() {
        // under-resolved large data fills the top octave
        let q0 = random_smooth(0.5, 1, 8, 20.0).unwrap();
        let mut cfg = config(16, 1e-5, 0.01);
        cfg.tail_limit = Some(DEFAULT_TAIL_LIMIT);
        assert!(matches!(evolve(&q0, &cfg), Err(Error::TailMonitor { .. })));
        let mut cfg = config(16, 0.5, 5.0);
        cfg.dealias = false;
        let err = evolve(&q0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Blowup { .. }), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn galilei_examples() {
        let f = random_smooth(2.0, 5, 8, 1.0).unwrap();
        assert_eq!(galilei(&f, 0.0, 0.3), f);
        let g = galilei(&CircleFunction::zero(3), 1.0, 0.7);
        assert_eq!(g.mean(), 1.0);
        assert!(g.sub(&CircleFunction::constant(1.0)).is_zero());
        assert_eq!(galilei(&f, 0.3, 0.2).mean(), f.mean() + 0.3);
        // pointwise: q(x + 2μt) + μ
        let g = galilei(&f, 0.3, 0.2);
        assert!((g.eval(0.1) - f.eval(0.1 + 0.12) - 0.3).abs() < 1e-13);
    }

    #[test]
    fn both_integrators_agree() {
        let q0 = random_smooth(4.0, 6, 8, 0.5).unwrap();
        let cfg = config(64, 5e-5, 0.05);
        let a = evolve_final(&q0, &cfg).unwrap();
        let mut cfg_if = cfg.clone();
        cfg_if.integrator = Integrator::Rk4IntegratingFactor;
        let b = evolve_final(&q0, &cfg_if).unwrap();
        assert!(a.sub(&b).l2_norm() < 1e-8 * a.l2_norm(), "{}", a.sub(&b).l2_norm());
    }

    #[test]
    fn config_json_uses_documented_names() {
        let cfg = config(64, 1e-3, 0.5);
        let v = serde_json::to_value(&cfg).unwrap();
        assert_eq!(v["M"], 64);
        assert_eq!(v["T"], 0.5);
        assert_eq!(v["integrator"], "etdrk4");
        let back: SolverConfig = serde_json::from_value(v).unwrap();
        assert_eq!(back, cfg);
    }
}
