//! The Plancherel integral and the Bessel integral `H(z)` in its spectral
//! form and both geometric forms.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{bold_j, SpectralPoint, SERIES_MAX_ABS};
use super::kernels::{angular_kernel, radial_kernel, TestFunction};
use super::quadrature::{gauss_legendre, QuadratureConfig};
use crate::error::{Error, Result};

/// A quadrature result with the difference against a coarser pass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Midpoint nodes in `t` on `[-t_cut T, t_cut T]`; the count is a multiple
/// of 4 so neither this grid nor its half-resolution pass hits `t = 0`.
fn t_grid(tf: &TestFunction, cfg: &QuadratureConfig, coarse: bool) -> (Vec<f64>, f64) {
    let t_max = cfg.t_cut * tf.t_width;
    let step = tf.t_width.min(1.0) / cfg.t_nodes_per_width as f64;
    let mut n = (2.0 * t_max / step).ceil() as usize;
    n = n.div_ceil(4) * 4;
    if coarse {
        n /= 2;
    }
    let h = 2.0 * t_max / n as f64;
    ((0..n).map(|j| -t_max + (j as f64 + 0.5) * h).collect(), h)
}

fn p_range(tf: &TestFunction, cfg: &QuadratureConfig) -> std::ops::RangeInclusive<i64> {
    let p_max = (cfg.p_cut * tf.p_width).floor() as i64;
    -p_max..=p_max
}

/// Closed form `sum_p exp(-(p/P)^2) sqrt(pi) T (T^2/2 + p^2)`.
pub fn plancherel_closed_form(tf: &TestFunction, cfg: &QuadratureConfig) -> f64 {
    let t = tf.t_width;
    p_range(tf, cfg)
        .map(|p| {
            let p2 = (p * p) as f64;
            (-p2 / (tf.p_width * tf.p_width)).exp() * PI.sqrt() * t * (t * t / 2.0 + p2)
        })
        .sum()
}

fn plancherel_pass(tf: &TestFunction, cfg: &QuadratureConfig, coarse: bool) -> f64 {
    let (ts, h) = t_grid(tf, cfg, coarse);
    p_range(tf, cfg)
        .map(|p| {
            ts.iter()
                .map(|&t| tf.h(t, p) * (t * t + (p * p) as f64) * h)
                .sum::<f64>()
        })
        .sum()
}

/// `sum_p int h(t, p) (t^2 + p^2) dt` by quadrature.
pub fn plancherel_quadrature(tf: &TestFunction, cfg: &QuadratureConfig) -> Estimate<f64> {
    let fine = plancherel_pass(tf, cfg, false);
    let coarse = plancherel_pass(tf, cfg, true);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlancherelValue {
    pub closed_form: f64,
    pub quadrature: Estimate<f64>,
}

impl PlancherelValue {
    pub fn relative_gap(&self) -> f64 {
        (self.closed_form - self.quadrature.value).abs() / self.closed_form.abs()
    }
}

/// The Plancherel integral, both ways.
pub fn plancherel_h(tf: &TestFunction, cfg: &QuadratureConfig) -> PlancherelValue {
    PlancherelValue {
        closed_form: plancherel_closed_form(tf, cfg),
        quadrature: plancherel_quadrature(tf, cfg),
    }
}

fn spectral_pass(
    z: Complex64,
    tf: &TestFunction,
    cfg: &QuadratureConfig,
    coarse: bool,
) -> Result<Complex64> {
    let (ts, h) = t_grid(tf, cfg, coarse);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in p_range(tf, cfg) {
        for &t in &ts {
            let w = tf.h(t, p);
            if w < 1e-300 {
                continue;
            }
            let j = bold_j(SpectralPoint::new(t, p), z)?;
            acc += j * (w * (t * t + (p * p) as f64) * h);
        }
    }
    Ok(acc)
}

/// `H(z) = sum_p int h(t, p) J_{it,p}(z) (t^2 + p^2) dt`, by midpoint
/// quadrature in `t`. Limited to the series range `|z| <= 12`.
pub fn h_spectral(
    z: Complex64,
    tf: &TestFunction,
    cfg: &QuadratureConfig,
) -> Result<Estimate<Complex64>> {
    if z.norm() > SERIES_MAX_ABS {
        return Err(Error::OutOfRange {
            op: "h_spectral",
            abs: z.norm(),
            max: SERIES_MAX_ABS,
        });
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Estimate {
            value: z,
            error: 0.0,
        });
    }
    let fine = spectral_pass(z, tf, cfg, false)?;
    let coarse = spectral_pass(z, tf, cfg, true)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).norm(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GeometricForm {
    /// `-cos(2 Re(z trh)) (k'' theta + k theta'')`.
    SecondDerivatives,
    /// `cos(2 Re(z trh)) (sinh^2 r + sin^2 omega) k theta`, without `|2z|^2`.
    Weighted,
}

/// Per-`M` tables on the periodic grid `omega_l = -pi/2 + l pi / M`.
struct AngularGrid {
    cos: Vec<f64>,
    sin: Vec<f64>,
    theta: Vec<f64>,
    theta2: Vec<f64>,
}

impl AngularGrid {
    fn new(m: usize, tf: &TestFunction, terms: u32) -> Self {
        let mut g = AngularGrid {
            cos: Vec::with_capacity(m),
            sin: Vec::with_capacity(m),
            theta: Vec::with_capacity(m),
            theta2: Vec::with_capacity(m),
        };
        for l in 0..m {
            let w = -PI / 2.0 + l as f64 * PI / m as f64;
            let (th, th2) = angular_kernel(tf, w, terms);
            g.cos.push(w.cos());
            g.sin.push(w.sin());
            g.theta.push(th);
            g.theta2.push(th2);
        }
        g
    }
}

/// Integral over `r in R` and `omega in [-pi/2, pi/2)`. The integrand is
/// invariant under `(r, omega) -> (-r, -omega)`, so only `r >= 0` is
/// sampled and the result doubled.
fn geometric_pass(
    z: Complex64,
    tf: &TestFunction,
    cfg: &QuadratureConfig,
    form: GeometricForm,
) -> f64 {
    let terms = tf.theta_terms(cfg.theta_q_cut);
    let r_max = cfg.r_cut / tf.t_width;
    let base = r_max / cfg.r_panels as f64;
    let (gx, gw) = gauss_legendre(cfg.gauss_order as usize);
    let two_z = 2.0 * z.norm();
    let mut grids: HashMap<usize, AngularGrid> = HashMap::new();
    let mut total = 0.0;
    let mut a = 0.0;
    while a < r_max {
        let rate = two_z * (a + base).min(r_max).cosh();
        let width = if rate > 0.0 {
            base.min(cfg.r_phase_per_panel / rate)
        } else {
            base
        };
        let b = (a + width).min(r_max);
        let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
        for (&x, &w) in gx.iter().zip(&gw) {
            let r = mid + half * x;
            let (k, k2) = radial_kernel(tf, r);
            let (ch, sh) = (r.cosh(), r.sinh());
            let bandwidth = 2.0 * z.norm() * ch + 12.0 * tf.p_width + cfg.omega_extra as f64;
            // Rounded up to a multiple of 16 so grids are shared across nodes.
            let m = (bandwidth.ceil() as usize).div_ceil(16) * 16;
            let grid = grids
                .entry(m)
                .or_insert_with(|| AngularGrid::new(m, tf, terms));
            // 2 Re(z trh) = 2 (re z cosh r cos w - im z sinh r sin w).
            let (ca, sb) = (2.0 * z.re * ch, 2.0 * z.im * sh);
            let mut inner = 0.0;
            match form {
                GeometricForm::SecondDerivatives => {
                    for l in 0..m {
                        let phase = ca * grid.cos[l] - sb * grid.sin[l];
                        inner += phase.cos() * (k2 * grid.theta[l] + k * grid.theta2[l]);
                    }
                    inner = -inner;
                }
                GeometricForm::Weighted => {
                    let sh2 = sh * sh;
                    for l in 0..m {
                        let phase = ca * grid.cos[l] - sb * grid.sin[l];
                        let s = grid.sin[l];
                        inner += phase.cos() * (sh2 + s * s) * k * grid.theta[l];
                    }
                }
            }
            total += w * half * inner * PI / m as f64;
        }
        a = b;
    }
    2.0 * total
}

fn geometric(
    z: Complex64,
    tf: &TestFunction,
    cfg: &QuadratureConfig,
    form: GeometricForm,
) -> Estimate<f64> {
    let coarse = geometric_pass(z, tf, cfg, form);
    let fine = geometric_pass(z, tf, &cfg.refined(), form);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

fn as_complex(e: Estimate<f64>, scale: f64) -> Estimate<Complex64> {
    Estimate {
        value: Complex64::new(e.value * scale, 0.0),
        error: e.error * scale.abs(),
    }
}

/// `H(z) = -int int cos(2 Re(z trh)) (k'' theta + k theta'') dr d omega`.
pub fn h_geometric0(z: Complex64, tf: &TestFunction, cfg: &QuadratureConfig) -> Estimate<Complex64> {
    as_complex(geometric(z, tf, cfg, GeometricForm::SecondDerivatives), 1.0)
}

/// `H(z) = |2z|^2 int int cos(2 Re(z trh)) (sinh^2 r + sin^2 omega) k theta`.
pub fn h_geometric2(z: Complex64, tf: &TestFunction, cfg: &QuadratureConfig) -> Estimate<Complex64> {
    let scale = 4.0 * z.norm_sqr();
    if scale == 0.0 {
        return Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        };
    }
    as_complex(geometric(z, tf, cfg, GeometricForm::Weighted), scale)
}

/// One pass of [`h_geometric2`] without the refined comparison.
pub(crate) fn h_geometric2_value(z: Complex64, tf: &TestFunction, cfg: &QuadratureConfig) -> f64 {
    let scale = 4.0 * z.norm_sqr();
    if scale == 0.0 {
        return 0.0;
    }
    scale * geometric_pass(z, tf, cfg, GeometricForm::Weighted)
}

/// The constant `K` in `|H(z)| <= K |z|^2`:
/// `4 int int (sinh^2 r + sin^2 omega) k theta dr d omega`.
pub fn small_z_constant(tf: &TestFunction, cfg: &QuadratureConfig) -> Estimate<f64> {
    let e = geometric(Complex64::new(0.0, 0.0), tf, cfg, GeometricForm::Weighted);
    Estimate {
        value: 4.0 * e.value,
        error: 4.0 * e.error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn plancherel_examples() {
        let cfg = QuadratureConfig::default();
        let v = plancherel_h(&TestFunction::new(1.0, 1.0), &cfg);
        assert!((v.closed_form - 3.1387).abs() < 1e-4);
        assert!(v.relative_gap() < 1e-8);
        let mut prev = 0.0;
        for a in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let next = plancherel_h(&TestFunction::new(a, 1.5), &cfg).closed_form;
            assert!(next > prev);
            prev = next;
        }
        assert!(plancherel_h(&TestFunction::new(1e-3, 1.0), &cfg).closed_form < 1e-2);
    }

    #[test]
    fn frozen_values_at_unit_widths() {
        // Frozen from a 30-digit spectral-side evaluation.
        let tf = TestFunction::new(1.0, 1.0);
        let cfg = QuadratureConfig::default();
        let cases = [
            (c(1.0, 0.0), -8.291_723_901_640_55),
            (c(0.5, 0.0), 2.194_358_094_775_74),
            (c(1.0, 1.0), -7.419_342_588_341_85),
        ];
        for (z, want) in cases {
            let want = c(want, 0.0);
            assert!(rel(h_geometric0(z, &tf, &cfg).value, want) < 1e-8, "{z}");
            assert!(rel(h_geometric2(z, &tf, &cfg).value, want) < 1e-8, "{z}");
            assert!(rel(h_spectral(z, &tf, &cfg).unwrap().value, want) < 1e-8, "{z}");
        }
    }

    #[test]
    fn geometric_zero_limit() {
        let tf = TestFunction::new(1.0, 2.0);
        let cfg = QuadratureConfig::default();
        assert!(h_geometric0(c(0.0, 0.0), &tf, &cfg).value.norm() < 1e-10);
        assert_eq!(h_geometric2(c(0.0, 0.0), &tf, &cfg).value, c(0.0, 0.0));
    }

    #[test]
    fn spectral_symmetries() {
        let tf = TestFunction::new(1.0, 1.0);
        let cfg = QuadratureConfig::default();
        let z = c(0.7, -1.3);
        let v = h_spectral(z, &tf, &cfg).unwrap().value;
        assert!((h_spectral(-z, &tf, &cfg).unwrap().value - v).norm() < 1e-10);
        assert!((h_spectral(z.conj(), &tf, &cfg).unwrap().value - v.conj()).norm() < 1e-10);
        assert!(h_spectral(c(13.0, 0.0), &tf, &cfg).is_err());
    }
}
