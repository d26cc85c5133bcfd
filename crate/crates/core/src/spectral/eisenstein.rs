//! The Eisenstein weight `omega(t, p) = 1 / |zeta(1 + 2it, 2p)|^2` and the
//! Eisenstein large-sieve quantity.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sequence::CoefficientSequence;
use super::zeta::{ideal_angle, IdealTable, ZetaMode};
use crate::error::{Error, Result};
use crate::gauss::divisors;

/// Half-width of the band around `t = 0` excluded when `p = 0`.
pub const POLE_BAND: f64 = 0.05;
/// Norm cutoff of the smoothed zeta sums behind `omega`.
pub const ZETA_SMOOTH_CUTOFF: f64 = 1e5;
/// Cell width of the `t` quadrature.
pub const EISENSTEIN_STEP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EisensteinPoint {
    pub t: f64,
    pub p: i64,
    pub weight: f64,
}

fn check_band(t: f64, p: i64) -> Result<()> {
    if p == 0 && t.abs() < POLE_BAND {
        return Err(Error::ExcludedPoint { t, p });
    }
    Ok(())
}

fn weight_from(table: &IdealTable, t: f64, p: i64) -> Result<f64> {
    check_band(t, p)?;
    let z = table.zeta(Complex64::new(1.0, 2.0 * t), 2 * p, ZetaMode::Smoothed)?;
    Ok(1.0 / z.value.norm_sqr())
}

/// `omega(t, p)`, accurate to about `1e-3` relative for `|t| <= 5`,
/// `|p| <= 8`.
pub fn eisenstein_weight(t: f64, p: i64) -> Result<f64> {
    default_grid().weight(t, p)
}

pub fn eisenstein_weight_with(t: f64, p: i64, zeta_cutoff: f64) -> Result<f64> {
    check_band(t, p)?;
    weight_from(&IdealTable::new(zeta_cutoff)?, t, p)
}

/// Midpoint cells `[k h, (k + 1) h]` in `t` with memoized weights. Each
/// cell contributes its overlap with the integration range, so sums over
/// a growing range never decrease.
pub struct EisensteinGrid {
    step: f64,
    table: IdealTable,
    cache: Mutex<HashMap<(i64, i64), f64>>,
}

impl EisensteinGrid {
    pub fn new(step: f64, zeta_cutoff: f64) -> Result<Self> {
        if !(step > 0.0 && step <= POLE_BAND) {
            return Err(Error::Invalid(format!(
                "Eisenstein step {step} must lie in (0, {POLE_BAND}]"
            )));
        }
        Ok(Self {
            step,
            table: IdealTable::new(zeta_cutoff)?,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    fn midpoint(&self, k: i64) -> f64 {
        (k as f64 + 0.5) * self.step
    }

    fn excluded(&self, k: i64, p: i64) -> bool {
        p == 0 && self.midpoint(k).abs() < POLE_BAND
    }

    /// `omega(t, p)` directly, bypassing the cell cache.
    pub fn weight(&self, t: f64, p: i64) -> Result<f64> {
        weight_from(&self.table, t, p)
    }

    /// Weights for cells `k` at order `p`, reusing `omega(t, p) = omega(-t, -p)`.
    fn cell_weights(&self, cells: &[(i64, i64)]) -> Vec<f64> {
        let key = |(k, p): (i64, i64)| if k < 0 { (-k - 1, -p) } else { (k, p) };
        let missing: Vec<(i64, i64)> = {
            let cache = self.cache.lock().expect("weight cache");
            let mut m: Vec<_> = cells
                .iter()
                .map(|&c| key(c))
                .filter(|c| !cache.contains_key(c))
                .collect();
            m.sort_unstable();
            m.dedup();
            m
        };
        let fresh: Vec<((i64, i64), f64)> = missing
            .par_iter()
            .map(|&(k, p)| {
                let w = weight_from(&self.table, self.midpoint(k), p).expect("cell outside band");
                ((k, p), w)
            })
            .collect();
        let mut cache = self.cache.lock().expect("weight cache");
        cache.extend(fresh);
        cells.iter().map(|&c| cache[&key(c)]).collect()
    }

    /// Quadrature nodes for `|t| <= T/2`, `|p| <= P/4`, with cell overlaps
    /// as weights.
    pub fn points(&self, t_width: f64, p_width: f64) -> Vec<(EisensteinPoint, f64)> {
        let half = t_width / 2.0;
        let k_max = (half / self.step).ceil() as i64;
        let p_max = (p_width / 4.0).floor() as i64;
        let mut cells = Vec::new();
        let mut lens = Vec::new();
        for p in -p_max..=p_max {
            for k in -k_max..k_max {
                if self.excluded(k, p) {
                    continue;
                }
                let lo = (k as f64 * self.step).max(-half);
                let hi = ((k + 1) as f64 * self.step).min(half);
                if hi > lo {
                    cells.push((k, p));
                    lens.push(hi - lo);
                }
            }
        }
        let weights = self.cell_weights(&cells);
        cells
            .into_iter()
            .zip(weights)
            .zip(lens)
            .map(|(((k, p), weight), len)| {
                (
                    EisensteinPoint {
                        t: self.midpoint(k),
                        p,
                        weight,
                    },
                    len,
                )
            })
            .collect()
    }

    /// `int_{|t| <= T/2} sum_{|p| <= P/4} omega(t, p) |sum_n a_n tau_{it,p}(n^2)|^2`.
    pub fn sieve_sum(&self, a: &CoefficientSequence, t_width: f64, p_width: f64) -> Result<f64> {
        if !(t_width >= 0.5 && p_width >= 0.5) {
            return Err(Error::Invalid(format!(
                "Eisenstein sum needs T, P >= 1/2, got T = {t_width}, P = {p_width}"
            )));
        }
        if a.is_empty() {
            return Ok(0.0);
        }
        let terms = divisor_terms(a);
        let total = self
            .points(t_width, p_width)
            .into_iter()
            .map(|(pt, len)| {
                let q = 4.0 * pt.p as f64;
                let s: Complex64 = terms
                    .iter()
                    .map(|(coef, pairs)| {
                        let tau: Complex64 = pairs
                            .iter()
                            .map(|&(log_ratio, dtheta)| Complex64::from_polar(1.0, pt.t * log_ratio + q * dtheta))
                            .sum();
                        coef * tau
                    })
                    .sum();
                pt.weight * s.norm_sqr() * len
            })
            .sum();
        Ok(total)
    }
}

/// For each `a_n`, the `(log N(d/e), arg d - arg e)` over `de = n^2`.
fn divisor_terms(a: &CoefficientSequence) -> Vec<(Complex64, Vec<(f64, f64)>)> {
    a.iter()
        .map(|(n, coef)| {
            let square = n.mul(n);
            let pairs = divisors(square)
                .into_iter()
                .map(|d| {
                    let e = square.quotient(d).expect("divisor");
                    (
                        (d.norm() as f64).ln() - (e.norm() as f64).ln(),
                        ideal_angle(d) - ideal_angle(e),
                    )
                })
                .collect();
            (coef, pairs)
        })
        .collect()
}

/// The shared grid at [`EISENSTEIN_STEP`] and [`ZETA_SMOOTH_CUTOFF`].
pub fn default_grid() -> &'static EisensteinGrid {
    static GRID: OnceLock<EisensteinGrid> = OnceLock::new();
    GRID.get_or_init(|| {
        EisensteinGrid::new(EISENSTEIN_STEP, ZETA_SMOOTH_CUTOFF).expect("default grid")
    })
}

pub fn eisenstein_sieve_sum(a: &CoefficientSequence, t_width: f64, p_width: f64) -> Result<f64> {
    default_grid().sieve_sum(a, t_width, p_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{GIdeal, GaussianInt};
    use crate::spectral::sequence::NormWindow;
    use crate::spectral::zeta::tau_s_p;

    fn ideal(re: i64, im: i64) -> GIdeal {
        GIdeal::new(GaussianInt::new(re, im)).unwrap()
    }

    #[test]
    fn weight_oracle_values() {
        // p = 0 from zeta(s) L(s, chi_{-4}); p != 0 from Riesz means of
        // orders 3 and 4 at cutoff 4e6, which agree to 1e-5.
        for (t, p, want) in [
            (1.0, 0, 1.725_286_966_837_754),
            (1.0, 1, 0.641_57),
            (0.0, 1, 0.443_72),
            (2.5, -3, 2.018_37),
            (0.3, 8, 0.352_14),
            (5.0, 8, 0.331_77),
        ] {
            let got = eisenstein_weight(t, p).unwrap();
            assert!((got - want).abs() < 1e-3 * want, "({t}, {p}): {got}");
        }
    }

    #[test]
    fn weight_symmetry_and_pole() {
        for (t, p) in [(0.7, 2), (1.3, -1), (0.2, 0)] {
            let a = eisenstein_weight(t, p).unwrap();
            let b = eisenstein_weight(-t, -p).unwrap();
            assert!((a - b).abs() < 1e-12 * a);
        }
        assert!(matches!(
            eisenstein_weight(0.01, 0),
            Err(Error::ExcludedPoint { .. })
        ));
        // omega -> 0 at the pole.
        let near = eisenstein_weight(POLE_BAND, 0).unwrap();
        let far = eisenstein_weight(0.5, 0).unwrap();
        assert!(near < 0.1 * far, "{near} {far}");
    }

    #[test]
    fn zero_and_single_entry() {
        let empty = CoefficientSequence::new(NormWindow::Initial(10.0));
        assert_eq!(eisenstein_sieve_sum(&empty, 2.0, 2.0).unwrap(), 0.0);
        let one = CoefficientSequence::from_entries(
            NormWindow::Initial(10.0),
            [(GIdeal::unit(), Complex64::new(3.0, 4.0))],
        )
        .unwrap();
        let total = eisenstein_sieve_sum(&one, 2.0, 4.0).unwrap();
        let measure: f64 = default_grid()
            .points(2.0, 4.0)
            .iter()
            .map(|(pt, len)| pt.weight * len)
            .sum();
        assert!((total - 25.0 * measure).abs() < 1e-12 * total);
    }

    #[test]
    fn two_entries_match_a_direct_quadrature() {
        let a = CoefficientSequence::from_entries(
            NormWindow::Initial(10.0),
            [
                (ideal(2, 1), Complex64::new(1.0, 0.0)),
                (ideal(1, 1), Complex64::new(0.0, -1.0)),
            ],
        )
        .unwrap();
        let got = eisenstein_sieve_sum(&a, 2.0, 4.0).unwrap();
        // Midpoint rule straight from the definitions on a coarser grid.
        let mut want = 0.0;
        let h = 0.025;
        for p in -1..=1i64 {
            let lo = if p == 0 { POLE_BAND } else { 0.0 };
            let cells = ((1.0 - lo) / h).round() as usize;
            for side in [-1.0, 1.0] {
                for j in 0..cells {
                    let t = side * (lo + (j as f64 + 0.5) * h);
                    let s: Complex64 = a
                        .iter()
                        .map(|(m, c)| c * tau_s_p(m.mul(m), Complex64::new(0.0, t), p))
                        .sum();
                    want += eisenstein_weight(t, p).unwrap() * s.norm_sqr() * h;
                }
            }
        }
        assert!((got - want).abs() < 1e-2 * want, "{got} vs {want}");
    }

    #[test]
    fn monotone_in_both_widths() {
        let a = CoefficientSequence::from_entries(
            NormWindow::Initial(10.0),
            [
                (ideal(1, 0), Complex64::new(1.0, 0.0)),
                (ideal(2, 1), Complex64::new(-1.0, 0.0)),
                (ideal(3, 0), Complex64::new(0.5, 0.5)),
            ],
        )
        .unwrap();
        let mut last = 0.0;
        for t in [0.5, 0.8, 1.0, 1.37, 2.0] {
            let v = eisenstein_sieve_sum(&a, t, 4.0).unwrap();
            assert!(v >= last, "T = {t}");
            last = v;
        }
        let mut last = 0.0;
        for p in [0.5, 3.9, 4.0, 8.0] {
            let v = eisenstein_sieve_sum(&a, 1.0, p).unwrap();
            assert!(v >= last, "P = {p}");
            last = v;
        }
    }
}
