use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The Gaussian test function `h(t, p) = exp(-(t/T)^2 - (p/P)^2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    /// Width `T` in the continuous parameter.
    pub t_width: f64,
    /// Width `P` in the discrete parameter.
    pub p_width: f64,
}

impl TestFunction {
    pub fn new(t_width: f64, p_width: f64) -> Self {
        assert!(
            t_width > 0.0 && p_width > 0.0,
            "test function widths must be positive"
        );
        Self { t_width, p_width }
    }

    pub fn h(&self, t: f64, p: i64) -> f64 {
        let (a, b) = (t / self.t_width, p as f64 / self.p_width);
        (-a * a - b * b).exp()
    }

    /// Number of periodization terms `|q| <= n` needed in `theta` so that
    /// the dropped Gaussians are below `1e-15` relative, but at least
    /// `minimum`.
    pub fn theta_terms(&self, minimum: u32) -> u32 {
        let need = (6.0 / (PI * self.p_width) + 1.0).ceil() as u32;
        need.max(minimum)
    }
}

/// `k(r)`, `k''(r)`, `theta(omega)` and `theta''(omega)` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValues {
    pub k: f64,
    pub k2: f64,
    pub theta: f64,
    pub theta2: f64,
}

/// `k(r) = sqrt(pi) T exp(-(T r)^2)` and its second derivative.
pub fn radial_kernel(tf: &TestFunction, r: f64) -> (f64, f64) {
    let t = tf.t_width;
    let k = PI.sqrt() * t * (-(t * r) * (t * r)).exp();
    (k, k * (4.0 * t.powi(4) * r * r - 2.0 * t * t))
}

/// `theta(omega) = sqrt(pi) P sum_{|q| <= terms} exp(-(P (omega + pi q))^2)`
/// and its second derivative.
pub fn angular_kernel(tf: &TestFunction, omega: f64, terms: u32) -> (f64, f64) {
    let p = tf.p_width;
    let (mut th, mut th2) = (0.0, 0.0);
    let q = terms as i64;
    for j in -q..=q {
        let u = omega + PI * j as f64;
        let g = (-(p * u) * (p * u)).exp();
        th += g;
        th2 += g * (4.0 * p.powi(4) * u * u - 2.0 * p * p);
    }
    let s = PI.sqrt() * p;
    (s * th, s * th2)
}

pub fn kernels(tf: &TestFunction, r: f64, omega: f64, theta_terms: u32) -> KernelValues {
    let (k, k2) = radial_kernel(tf, r);
    let (theta, theta2) = angular_kernel(tf, omega, tf.theta_terms(theta_terms));
    KernelValues {
        k,
        k2,
        theta,
        theta2,
    }
}

/// `trh(r, omega) = cosh r cos omega + i sinh r sin omega`.
pub fn trh(r: f64, omega: f64) -> Complex64 {
    Complex64::new(r.cosh() * omega.cos(), r.sinh() * omega.sin())
}

/// `psi(r, omega) = 2 (trh(r, omega) - 1)`.
pub fn psi(r: f64, omega: f64) -> Complex64 {
    2.0 * (trh(r, omega) - 1.0)
}
