//! Hecke zeta functions of the characters `(z) -> (z/|z|)^{4p}` and the
//! twisted divisor sums built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{divisors, GIdeal};

/// Residue of the Dedekind zeta function of `Q(i)` at `s = 1`.
const DEDEKIND_RESIDUE: f64 = PI / 4.0;

/// Argument of the canonical generator, in `[0, pi/2)`.
pub fn ideal_angle(n: GIdeal) -> f64 {
    let g = n.gen();
    (g.im as f64).atan2(g.re as f64)
}

/// `lambda_{4p}(n) = (z/|z|)^{4p}` for any generator `z` of `n`.
pub fn hecke_character(n: GIdeal, p: i64) -> Complex64 {
    Complex64::from_polar(1.0, 4.0 * p as f64 * ideal_angle(n))
}

/// `tau_{s,p}(n) = sum_{ab = n} lambda_{4p}(a/b) N(a/b)^s`.
pub fn tau_s_p(n: GIdeal, s: Complex64, p: i64) -> Complex64 {
    divisors(n)
        .into_iter()
        .map(|a| {
            let b = n.quotient(a).expect("divisor");
            let log_ratio = (a.norm() as f64).ln() - (b.norm() as f64).ln();
            let angle = 4.0 * p as f64 * (ideal_angle(a) - ideal_angle(b));
            (s * log_ratio).exp() * Complex64::from_polar(1.0, angle)
        })
        .sum()
}

/// How the partial sums are taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZetaMode {
    /// Sharp cutoff plus the integral comparison for the tail.
    Sharp,
    /// Riesz weights `(1 - N/X)^2`, for the line `Re(s) = 1`.
    Smoothed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: Complex64,
    /// Difference against the same evaluation at half the cutoff.
    pub tail_estimate: f64,
}

/// `zeta(s, p) = sum_n lambda_{4p}(n) N(n)^{-s}` over nonzero ideals. Uses
/// the sharp mode for `Re(s) > 1` and the smoothed mode on `Re(s) = 1`.
pub fn hecke_zeta(s: Complex64, p: i64, cutoff: f64) -> Result<ZetaValue> {
    let mode = if s.re > 1.0 {
        ZetaMode::Sharp
    } else {
        ZetaMode::Smoothed
    };
    hecke_zeta_with(s, p, cutoff, mode)
}

pub fn hecke_zeta_with(s: Complex64, p: i64, cutoff: f64, mode: ZetaMode) -> Result<ZetaValue> {
    IdealTable::new(cutoff)?.zeta(s, p, mode)
}

/// `(N(n), log N(n), arg)` for every ideal up to a norm cutoff, for repeated
/// zeta evaluations at one cutoff.
#[derive(Clone, Debug)]
pub struct IdealTable {
    cutoff: f64,
    entries: Vec<(f64, f64, f64)>,
}

impl IdealTable {
    pub fn new(cutoff: f64) -> Result<Self> {
        if !(cutoff >= 4.0) || !cutoff.is_finite() {
            return Err(Error::Invalid(format!(
                "hecke_zeta: cutoff {cutoff} must be finite and at least 4"
            )));
        }
        let full = cutoff.floor();
        let root = full.sqrt() as i64 + 1;
        let mut entries = Vec::new();
        for a in 1..=root {
            for b in 0..=root {
                let n = (a * a + b * b) as f64;
                if n > full {
                    break;
                }
                entries.push((n, n.ln(), (b as f64).atan2(a as f64)));
            }
        }
        Ok(Self {
            cutoff: full,
            entries,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn zeta(&self, s: Complex64, p: i64, mode: ZetaMode) -> Result<ZetaValue> {
        if p == 0 && s == Complex64::new(1.0, 0.0) {
            return Err(Error::Pole {
                op: "hecke_zeta",
                at: "s = 1, p = 0".into(),
            });
        }
        if s.re < 1.0 {
            return Err(Error::Invalid(format!(
                "hecke_zeta: Re(s) = {} is left of the line Re(s) = 1",
                s.re
            )));
        }
        let full = self.cutoff;
        let half = (full / 2.0).floor();
        let q = 4.0 * p as f64;
        let mut acc_full = Complex64::new(0.0, 0.0);
        let mut acc_half = Complex64::new(0.0, 0.0);
        for &(n, log_n, angle) in &self.entries {
            let term = Complex64::from_polar((-s.re * log_n).exp(), q * angle - s.im * log_n);
            match mode {
                ZetaMode::Sharp => {
                    acc_full += term;
                    if n <= half {
                        acc_half += term;
                    }
                }
                ZetaMode::Smoothed => {
                    let w = 1.0 - n / full;
                    acc_full += term * (w * w);
                    if n < half {
                        let w = 1.0 - n / half;
                        acc_half += term * (w * w);
                    }
                }
            }
        }
        if p == 0 {
            acc_full += pole_correction(s, full, mode);
            acc_half += pole_correction(s, half, mode);
        }
        Ok(ZetaValue {
            value: acc_full,
            tail_estimate: (acc_full - acc_half).norm(),
        })
    }
}

/// The contribution of the pole at `s = 1` that the truncated sum misses.
fn pole_correction(s: Complex64, x: f64, mode: ZetaMode) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let power = ((one - s) * x.ln()).exp() * DEDEKIND_RESIDUE;
    match mode {
        ZetaMode::Sharp => power / (s - one),
        // Residue at w = 1 - s of zeta(s + w) X^w 2 / (w (w + 1) (w + 2)).
        ZetaMode::Smoothed => -power * 2.0 / ((one - s) * (2.0 - s) * (3.0 - s)),
    }
}
