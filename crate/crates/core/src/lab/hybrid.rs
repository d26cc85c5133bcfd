//! `sum_{N(c) <= C} sum*_chi int int_{|t|, |p| <= T} |sum_n a_n chi(n) lambda_{it,p}(n)|^2`
//! against `(C^2 T^2 + N) (CT)^eps sum |a_n|^2`.

use num_complex::Complex64;

use super::report::ExperimentReport;
use super::EPSILON;
use crate::characters::char_group;
use crate::error::{Error, Result};
use crate::gauss::ideals_up_to_norm;
use crate::spectral::CoefficientSequence;

/// `int_{-T}^{T} exp(i t x) dt`.
fn sinc_integral(t_width: f64, x: f64) -> f64 {
    if x == 0.0 {
        2.0 * t_width
    } else {
        2.0 * (t_width * x).sin() / x
    }
}

/// The `t`-integral is done in closed form: for coefficients `b_n`,
/// `int |sum b_n |n|^{it}|^2 dt = sum_{n,n'} b_n conj(b_n') 2 sin(T x) / x`
/// with `x = log|n| - log|n'|`. Characters run over primitive ones only,
/// and each `n` enters through its canonical generator.
pub fn hybrid_lhs(c_max: f64, t_width: f64, a: &CoefficientSequence) -> Result<f64> {
    if !(c_max >= 1.0 && t_width >= 1.0) {
        return Err(Error::Invalid(format!(
            "hybrid sieve needs C, T >= 1, got C = {c_max}, T = {t_width}"
        )));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let entries: Vec<_> = a
        .iter()
        .map(|(n, coef)| {
            let g = n.gen();
            let log_abs = 0.5 * (n.norm() as f64).ln();
            (g, coef, log_abs, (g.im as f64).atan2(g.re as f64))
        })
        .collect();
    let kernel: Vec<Vec<f64>> = entries
        .iter()
        .map(|e| {
            entries
                .iter()
                .map(|f| sinc_integral(t_width, e.2 - f.2))
                .collect()
        })
        .collect();
    let p_max = t_width.floor() as i64;
    let mut total = 0.0;
    for modulus in ideals_up_to_norm(c_max) {
        let group = char_group(modulus.gen())?;
        for chi in group.characters() {
            if chi.conductor() != modulus {
                continue;
            }
            let twisted: Vec<Complex64> = entries.iter().map(|e| e.1 * chi.value(e.0)).collect();
            for p in -p_max..=p_max {
                let b: Vec<Complex64> = twisted
                    .iter()
                    .zip(&entries)
                    .map(|(&v, e)| v * Complex64::from_polar(1.0, p as f64 * e.3))
                    .collect();
                let mut form = 0.0;
                for (i, bi) in b.iter().enumerate() {
                    for (j, bj) in b.iter().enumerate() {
                        form += (bi * bj.conj()).re * kernel[i][j];
                    }
                }
                // The form is positive semidefinite; clip rounding below zero.
                total += form.max(0.0);
            }
        }
    }
    Ok(total)
}

pub fn hybrid_rhs(c_max: f64, t_width: f64, a: &CoefficientSequence) -> f64 {
    let n = a.window().upper();
    (c_max * c_max * t_width * t_width + n) * (c_max * t_width).powf(EPSILON) * a.l2_norm_sqr()
}

pub fn hybrid_ratio(c_max: f64, t_width: f64, a: &CoefficientSequence) -> Result<ExperimentReport> {
    let lhs = hybrid_lhs(c_max, t_width, a)?;
    let mut r = ExperimentReport::new("hybrid").with_sides(lhs, hybrid_rhs(c_max, t_width, a));
    r.c = Some(c_max);
    r.t = Some(t_width);
    r.n = Some(a.window().upper());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{GIdeal, GaussianInt};
    use crate::spectral::NormWindow;

    fn ideal(re: i64, im: i64) -> GIdeal {
        GIdeal::new(GaussianInt::new(re, im)).unwrap()
    }

    fn primitive_count(c_max: f64) -> usize {
        ideals_up_to_norm(c_max)
            .into_iter()
            .map(|m| {
                char_group(m.gen())
                    .unwrap()
                    .characters()
                    .filter(|chi| chi.conductor() == m)
                    .count()
            })
            .sum()
    }

    #[test]
    fn single_entry_at_one() {
        let a = CoefficientSequence::from_entries(
            NormWindow::Initial(10.0),
            [(GIdeal::unit(), Complex64::new(1.0, -2.0))],
        )
        .unwrap();
        for (c, t) in [(1.0, 1.0), (4.0, 2.5), (10.0, 1.0)] {
            let got = hybrid_lhs(c, t, &a).unwrap();
            let vol = 2.0 * t * (2.0 * t.floor() + 1.0);
            let want = 5.0 * primitive_count(c) as f64 * vol;
            assert!((got - want).abs() < 1e-10 * want, "C={c} T={t}: {got} vs {want}");
        }
        let empty = CoefficientSequence::new(NormWindow::Initial(10.0));
        assert_eq!(hybrid_lhs(4.0, 2.0, &empty).unwrap(), 0.0);
    }

    #[test]
    fn two_entries_match_quadrature() {
        let a = CoefficientSequence::from_entries(
            NormWindow::Initial(10.0),
            [
                (ideal(2, 1), Complex64::new(1.0, 0.0)),
                (ideal(1, 1), Complex64::new(0.0, 1.0)),
            ],
        )
        .unwrap();
        let got = hybrid_lhs(2.0, 1.0, &a).unwrap();
        // Midpoint rule in t, characters evaluated directly.
        let mut want = 0.0;
        let steps = 4000;
        let h = 2.0 / steps as f64;
        for m in ideals_up_to_norm(2.0) {
            let group = char_group(m.gen()).unwrap();
            for chi in group.characters().filter(|chi| chi.conductor() == m) {
                for p in -1..=1i64 {
                    for k in 0..steps {
                        let t = -1.0 + (k as f64 + 0.5) * h;
                        let s: Complex64 = a
                            .iter()
                            .map(|(n, coef)| {
                                let z = n.gen().to_complex();
                                let lambda = Complex64::from_polar(1.0, t * z.norm().ln())
                                    * (z / z.norm()).powi(p as i32);
                                coef * chi.value(n.gen()) * lambda
                            })
                            .sum();
                        want += s.norm_sqr() * h;
                    }
                }
            }
        }
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
    }

    #[test]
    fn monotone_and_phase_invariant() {
        let a = CoefficientSequence::from_entries(
            NormWindow::Initial(20.0),
            [
                (ideal(1, 0), Complex64::new(1.0, 0.0)),
                (ideal(3, 2), Complex64::new(-1.0, 0.0)),
                (ideal(4, 1), Complex64::new(1.0, 0.0)),
                (ideal(3, 0), Complex64::new(-1.0, 0.0)),
            ],
        )
        .unwrap();
        let mut last = 0.0;
        for c in [1.0, 2.0, 4.0, 5.0, 9.0] {
            let v = hybrid_lhs(c, 2.0, &a).unwrap();
            assert!(v >= last * (1.0 - 1e-12));
            last = v;
        }
        let mut last = 0.0;
        for t in [1.0, 1.5, 2.0, 3.2] {
            let v = hybrid_lhs(4.0, t, &a).unwrap();
            assert!(v >= last * (1.0 - 1e-12));
            last = v;
        }
        let r1 = hybrid_ratio(4.0, 2.0, &a).unwrap();
        let r2 = hybrid_ratio(4.0, 2.0, &a.scaled(Complex64::from_polar(2.0, 1.1))).unwrap();
        assert!((r1.ratio - r2.ratio).abs() < 1e-12 * r1.ratio);
    }
}
