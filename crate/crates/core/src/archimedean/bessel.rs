//! Bessel functions of complex order by power series, and the kernel
//! `J_{it,p}` of the spectral side.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::rgamma;
use crate::error::{Error, Result};

/// Largest `|z|` accepted by the series evaluators.
pub const SERIES_MAX_ABS: f64 = 12.0;

/// Half-width of the band around `t = 0` bridged by interpolation.
pub const T_EPS: f64 = 1e-4;

/// A point `(t, p)` of `R x Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub t: f64,
    pub p: i64,
}

impl SpectralPoint {
    pub fn new(t: f64, p: i64) -> Self {
        Self { t, p }
    }
}

fn check_range(op: &'static str, z: Complex64) -> Result<()> {
    let abs = z.norm();
    if abs > SERIES_MAX_ABS || !abs.is_finite() {
        return Err(Error::OutOfRange {
            op,
            abs,
            max: SERIES_MAX_ABS,
        });
    }
    Ok(())
}

/// `sum_k (-w^2/4)^k / (k! Gamma(mu + k + 1))`, so that
/// `J_mu(w) = (w/2)^mu * entire_part(mu, w)`.
fn entire_part(mu: Complex64, w: Complex64) -> Complex64 {
    let x = -w * w / 4.0;
    // Leading terms vanish while mu + k + 1 is a non-positive integer.
    let mut k0 = 0u32;
    if mu.im == 0.0 && mu.re < 0.0 && mu.re == mu.re.round() {
        k0 = (-mu.re) as u32;
    }
    let mut term = rgamma(mu + (k0 as f64 + 1.0));
    for k in 1..=k0 {
        term *= x / k as f64;
    }
    let mut sum = term;
    let mut k = k0 as f64;
    loop {
        k += 1.0;
        let step = x / (k * (mu + k));
        term *= step;
        sum += term;
        let ratio = step.norm();
        // Once the ratio has dropped below 1/2 the remaining terms are
        // dominated by a geometric series.
        if ratio < 0.5 && term.norm() * ratio / (1.0 - ratio) <= 1e-17 * sum.norm() {
            break;
        }
        if term.norm() == 0.0 || k > 500.0 {
            break;
        }
    }
    sum
}

/// `J_mu(z)` on the principal branch of `(z/2)^mu`, for `|z| <= 12`.
pub fn bessel_j(mu: Complex64, z: Complex64) -> Result<Complex64> {
    check_range("bessel_j", z)?;
    let s = entire_part(mu, z);
    if z == Complex64::new(0.0, 0.0) {
        return if mu == Complex64::new(0.0, 0.0) {
            Ok(Complex64::new(1.0, 0.0))
        } else if mu.re > 0.0 || s == Complex64::new(0.0, 0.0) {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::Pole {
                op: "bessel_j",
                at: format!("z = 0 with order {mu}"),
            })
        };
    }
    Ok((mu * (z / 2.0).ln()).exp() * s)
}

/// `J_{nu+p}(z) J_{nu-p}(conj z)` written single-valued in `z`:
/// `|z/2|^{2 nu} (z/|z|)^{2p} S_{nu+p}(z) S_{nu-p}(conj z)`.
fn product_kernel(nu: Complex64, p: i64, z: Complex64) -> Complex64 {
    let radial = (2.0 * nu * (z.norm() / 2.0).ln()).exp();
    let angular = Complex64::from_polar(1.0, 2.0 * p as f64 * z.arg());
    radial
        * angular
        * entire_part(nu + p as f64, z)
        * entire_part(nu - p as f64, z.conj())
}

fn bold_j_raw(t: f64, p: i64, z: Complex64) -> Complex64 {
    let nu = Complex64::new(0.0, t);
    let pref = 2.0 * PI * PI / (nu * PI).sin();
    pref * (product_kernel(-nu, -p, z) - product_kernel(nu, p, z))
}

/// `J_{it,p}(z) = (2 pi^2 / sin(pi i t)) (J_{-it,-p}(z) - J_{it,p}(z))`.
///
/// For `|t| < T_EPS` the removable singularity at `t = 0` is bridged by
/// linear interpolation between `t = -T_EPS` and `t = T_EPS`.
pub fn bold_j(pt: SpectralPoint, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Zero { op: "bold_j" });
    }
    check_range("bold_j", z)?;
    let (t, p) = (pt.t, pt.p);
    if t.abs() >= T_EPS {
        return Ok(bold_j_raw(t, p, z));
    }
    let lo = bold_j_raw(-T_EPS, p, z);
    let hi = bold_j_raw(T_EPS, p, z);
    let w = (t + T_EPS) / (2.0 * T_EPS);
    Ok(lo * (1.0 - w) + hi * w)
}
