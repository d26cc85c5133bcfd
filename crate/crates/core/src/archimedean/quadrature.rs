use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation and resolution settings shared by every integral.
///
/// Cuts are in units of the natural width: `t` in `T`, `p` in `P`, `r` in
/// `1/T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub t_cut: f64,
    pub p_cut: f64,
    pub r_cut: f64,
    pub theta_q_cut: u32,
    /// Midpoint nodes in `t` per `min(T, 1)`.
    pub t_nodes_per_width: u32,
    /// Minimum number of Gauss-Legendre panels on `[0, r_cut / T]`.
    pub r_panels: u32,
    /// Largest phase advance (radians) of the oscillating factor allowed
    /// within one radial panel.
    pub r_phase_per_panel: f64,
    /// Nodes per radial panel.
    pub gauss_order: u32,
    /// Extra trapezoid nodes in `omega` beyond the oscillation bandwidth.
    pub omega_extra: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            t_cut: 6.0,
            p_cut: 6.0,
            r_cut: 6.0,
            theta_q_cut: 3,
            t_nodes_per_width: 10,
            r_panels: 24,
            r_phase_per_panel: 3.0,
            gauss_order: 16,
            omega_extra: 32,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("t_cut", self.t_cut),
            ("p_cut", self.p_cut),
            ("r_cut", self.r_cut),
            ("r_phase_per_panel", self.r_phase_per_panel),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("theta_q_cut", self.theta_q_cut),
            ("t_nodes_per_width", self.t_nodes_per_width),
            ("r_panels", self.r_panels),
            ("gauss_order", self.gauss_order),
            ("omega_extra", self.omega_extra),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Invalid(format!("{name} must be positive")));
            }
        }
        if self.gauss_order > 64 {
            return Err(Error::Invalid("gauss_order must be at most 64".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// Every panel halved and every node count doubled.
    pub fn refined(&self) -> Self {
        Self {
            t_nodes_per_width: self.t_nodes_per_width * 2,
            r_panels: self.r_panels * 2,
            r_phase_per_panel: self.r_phase_per_panel / 2.0,
            omega_extra: self.omega_extra * 2,
            ..self.clone()
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got}");
            }
        }
    }

    #[test]
    fn config_round_trip_and_rejection() {
        let cfg = QuadratureConfig::default();
        assert_eq!(QuadratureConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let partial = QuadratureConfig::from_toml("t_cut = 7.5\n").unwrap();
        assert_eq!(partial.t_cut, 7.5);
        assert_eq!(partial.r_cut, 6.0);
        assert!(QuadratureConfig::from_toml("t_cutt = 1.0\n").is_err());
        assert!(QuadratureConfig::from_toml("r_cut = -1.0\n").is_err());
        assert!(QuadratureConfig::from_toml("[section]\nx = 1\n").is_err());
    }
}
