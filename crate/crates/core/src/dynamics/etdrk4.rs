//! Exponential integrators for `u' = Lu + N(u)` with diagonal `L = -iξ|ξ|`.
//!
//! ETDRK4 follows Cox & Matthews; the φ-type coefficients are evaluated
//! by a contour mean for small `|hL|` (Kassam & Trefethen) and in closed
//! form otherwise.

use num_complex::Complex64;

use super::{Integrator, Nonlinearity, SolverConfig};
use crate::fourier::freq;

const CONTOUR_POINTS: usize = 64;
/// Below this `|hL|` the closed forms lose digits to cancellation.
const CONTOUR_RADIUS_SWITCH: f64 = 0.5;

#[derive(Clone, Copy, Debug)]
struct Coefficients {
    e: Complex64,
    e2: Complex64,
    q: Complex64,
    f1: Complex64,
    f2: Complex64,
    f3: Complex64,
}

fn closed_form(z: Complex64) -> [Complex64; 4] {
    let ez = z.exp();
    let z3 = z * z * z;
    [
        ((z / 2.0).exp() - 1.0) / z,
        (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3,
        (2.0 + z + ez * (z - 2.0)) / z3,
        (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3,
    ]
}

fn coefficients(z: Complex64, h: f64) -> Coefficients {
    let [q, f1, f2, f3] = if z.norm() < CONTOUR_RADIUS_SWITCH {
        let mut acc = [Complex64::new(0.0, 0.0); 4];
        for j in 0..CONTOUR_POINTS {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64;
            let point = z + Complex64::from_polar(1.0, theta);
            for (a, v) in acc.iter_mut().zip(closed_form(point)) {
                *a += v;
            }
        }
        acc.map(|a| a / CONTOUR_POINTS as f64)
    } else {
        closed_form(z)
    };
    Coefficients {
        e: z.exp(),
        e2: (z / 2.0).exp(),
        q: q * h,
        f1: f1 * h,
        f2: f2 * h,
        f3: f3 * h,
    }
}

pub(crate) struct Stepper {
    integrator: Integrator,
    h: f64,
    coeffs: Vec<Coefficients>,
    nonlinearity: Nonlinearity,
    nu: Vec<Complex64>,
    na: Vec<Complex64>,
    nb: Vec<Complex64>,
    nc: Vec<Complex64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    c: Vec<Complex64>,
}

impl Stepper {
    pub(crate) fn new(config: &SolverConfig) -> Self {
        let h = config.dt;
        let coeffs: Vec<Coefficients> = (0..=config.band as i64)
            .map(|k| {
                let xi = freq(k);
                coefficients(Complex64::new(0.0, -xi * xi * h), h)
            })
            .collect();
        let zeros = vec![Complex64::new(0.0, 0.0); config.band + 1];
        Stepper {
            integrator: config.integrator,
            h,
            coeffs,
            nonlinearity: Nonlinearity::new(config.band, config.dealias, config.linear_only),
            nu: zeros.clone(),
            na: zeros.clone(),
            nb: zeros.clone(),
            nc: zeros.clone(),
            a: zeros.clone(),
            b: zeros.clone(),
            c: zeros,
        }
    }

    pub(crate) fn step(&mut self, u: &mut [Complex64]) {
        match self.integrator {
            Integrator::Etdrk4 => self.etdrk4(u),
            Integrator::Rk4IntegratingFactor => self.ifrk4(u),
        }
        u[0].im = 0.0;
    }

    fn etdrk4(&mut self, u: &mut [Complex64]) {
        let cf = &self.coeffs;
        self.nonlinearity.eval(u, &mut self.nu);
        for k in 0..u.len() {
            self.a[k] = cf[k].e2 * u[k] + cf[k].q * self.nu[k];
        }
        self.nonlinearity.eval(&self.a, &mut self.na);
        for k in 0..u.len() {
            self.b[k] = cf[k].e2 * u[k] + cf[k].q * self.na[k];
        }
        self.nonlinearity.eval(&self.b, &mut self.nb);
        for k in 0..u.len() {
            self.c[k] = cf[k].e2 * self.a[k] + cf[k].q * (2.0 * self.nb[k] - self.nu[k]);
        }
        self.nonlinearity.eval(&self.c, &mut self.nc);
        for k in 0..u.len() {
            u[k] = cf[k].e * u[k]
                + cf[k].f1 * self.nu[k]
                + 2.0 * cf[k].f2 * (self.na[k] + self.nb[k])
                + cf[k].f3 * self.nc[k];
        }
    }

    /// Classical RK4 on `v = e^{-tL} u`.
    fn ifrk4(&mut self, u: &mut [Complex64]) {
        let h = self.h;
        let cf = &self.coeffs;
        // k1 = h N(u), stored in nu
        self.nonlinearity.eval(u, &mut self.nu);
        for k in 0..u.len() {
            self.nu[k] *= h;
            self.a[k] = cf[k].e2 * (u[k] + 0.5 * self.nu[k]);
        }
        self.nonlinearity.eval(&self.a, &mut self.na);
        for k in 0..u.len() {
            self.na[k] *= h;
            self.b[k] = cf[k].e2 * u[k] + 0.5 * self.na[k];
        }
        self.nonlinearity.eval(&self.b, &mut self.nb);
        for k in 0..u.len() {
            self.nb[k] *= h;
            self.c[k] = cf[k].e * u[k] + cf[k].e2 * self.nb[k];
        }
        self.nonlinearity.eval(&self.c, &mut self.nc);
        for k in 0..u.len() {
            self.nc[k] *= h;
            u[k] = cf[k].e * u[k]
                + (cf[k].e * self.nu[k] + 2.0 * cf[k].e2 * (self.na[k] + self.nb[k]) + self.nc[k]) / 6.0;
        }
    }
}
