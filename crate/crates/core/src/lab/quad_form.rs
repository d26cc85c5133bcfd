//! The bilinear form `sum_m sum_n a_m conj(b_n) sum_c N(c)^gamma F(dmn; c) e[mn theta / c]`
//! and its comparison with `C^{1+gamma} (K + sqrt M + sqrt N + C sqrt(MN)/K) K^eps |a| |b|`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::ExperimentReport;
use super::EPSILON;
use crate::error::{Error, Result};
use crate::expsum::{e_additive, ModulusContext};
use crate::gauss::{elements_in_norm_range, gcd, GaussianInt};
use crate::spectral::{CoefficientSequence, NormWindow};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadFormParams {
    pub d: GaussianInt,
    pub theta: Complex64,
    pub gamma: f64,
    pub c: f64,
    pub m: f64,
    pub n: f64,
}

impl QuadFormParams {
    fn validate(&self, a: &CoefficientSequence, b: &CoefficientSequence) -> Result<()> {
        if self.d.is_zero() {
            return Err(Error::Zero { op: "quad_form" });
        }
        if self.theta == Complex64::new(0.0, 0.0) {
            return Err(Error::Invalid("quad_form: theta must be nonzero".into()));
        }
        for (seq, x, name) in [(a, self.m, "a"), (b, self.n, "b")] {
            let window = NormWindow::Dyadic(x);
            if let Some((k, _)) = seq.iter().find(|(k, _)| !window.contains(k.norm())) {
                return Err(Error::Invalid(format!(
                    "quad_form: {name} has an entry of norm {} outside ({x}, {}]",
                    k.norm(),
                    2.0 * x
                )));
            }
        }
        Ok(())
    }

    /// `K = C + sqrt(CMN) |theta|`.
    pub fn k(&self) -> f64 {
        self.c + (self.c * self.m * self.n).sqrt() * self.theta.norm()
    }
}

/// Products `mn` of canonical generators, with summed coefficients
/// `a_m conj(b_n)`.
fn product_coefficients(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
) -> BTreeMap<(i64, i64, i64), (GaussianInt, Complex64)> {
    let mut out = BTreeMap::new();
    for (m, am) in a.iter() {
        for (n, bn) in b.iter() {
            let w = m.gen() * n.gen();
            let entry = out
                .entry(w.sort_key())
                .or_insert((w, Complex64::new(0.0, 0.0)));
            entry.1 += am * bn.conj();
        }
    }
    out
}

/// Brute-force triple sum over `C < N(c) <= 2C` (all nonzero elements),
/// skipping `c` not coprime to `dmn`.
pub fn quad_form(
    params: &QuadFormParams,
    a: &CoefficientSequence,
    b: &CoefficientSequence,
) -> Result<Complex64> {
    params.validate(a, b)?;
    let products = product_coefficients(a, b);
    let mut total = Complex64::new(0.0, 0.0);
    for c in elements_in_norm_range(params.c, 2.0 * params.c) {
        let ctx = ModulusContext::new(c)?;
        let weight = (c.norm() as f64).powf(params.gamma);
        let cz = c.to_complex();
        for (w, coef) in products.values() {
            let dw = params
                .d
                .checked_mul(*w)
                .ok_or(Error::Overflow { op: "quad_form" })?;
            if gcd(dw, c)? != GaussianInt::ONE {
                continue;
            }
            let f = ctx.f_sum(dw)?;
            total += coef * weight * f * e_additive(w.to_complex() * params.theta / cz);
        }
    }
    Ok(total)
}

/// `|a| |b| sqrt(#a #b) sum_c N(c)^gamma phi(c)`, from `|F(w; c)| <= phi(c)`.
pub fn quad_form_trivial_bound(
    params: &QuadFormParams,
    a: &CoefficientSequence,
    b: &CoefficientSequence,
) -> Result<f64> {
    let mut sum = 0.0;
    for c in elements_in_norm_range(params.c, 2.0 * params.c) {
        let phi = crate::gauss::multiplicative_functions(crate::gauss::GIdeal::new(c)?).phi;
        sum += (c.norm() as f64).powf(params.gamma) * phi as f64;
    }
    Ok(a.l2_norm() * b.l2_norm() * ((a.len() * b.len()) as f64).sqrt() * sum)
}

pub fn quad_form_rhs(params: &QuadFormParams, a: &CoefficientSequence, b: &CoefficientSequence) -> f64 {
    let k = params.k();
    let (c, m, n) = (params.c, params.m, params.n);
    c.powf(1.0 + params.gamma)
        * (k + m.sqrt() + n.sqrt() + c * (m * n).sqrt() / k)
        * k.powf(EPSILON)
        * a.l2_norm()
        * b.l2_norm()
}

pub fn quad_form_bound_ratio(
    params: &QuadFormParams,
    a: &CoefficientSequence,
    b: &CoefficientSequence,
) -> Result<ExperimentReport> {
    let lhs = quad_form(params, a, b)?.norm();
    let mut r = ExperimentReport::new("quadform").with_sides(lhs, quad_form_rhs(params, a, b));
    r.c = Some(params.c);
    r.m = Some(params.m);
    r.n = Some(params.n);
    r.gamma = Some(params.gamma);
    r.d = Some(params.d.to_string());
    r.theta = Some(format!("{}", params.theta));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{unit_residues, GIdeal};

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    fn ideal(re: i64, im: i64) -> GIdeal {
        GIdeal::new(g(re, im)).unwrap()
    }

    fn unit_seq(x: f64) -> CoefficientSequence {
        let mut s = CoefficientSequence::new(NormWindow::Dyadic(x));
        for n in crate::gauss::ideals_up_to_norm(2.0 * x) {
            if n.norm() as f64 > x {
                s.insert(n, Complex64::new(1.0, 0.0)).unwrap();
            }
        }
        s
    }

    /// `F(w; c)` summed straight from the definition in floating point.
    fn f_oracle(w: GaussianInt, c: GaussianInt) -> Complex64 {
        let cz = c.to_complex();
        let units = unit_residues(c).unwrap();
        let mut s = Complex64::new(0.0, 0.0);
        for &x in &units {
            let inv = *units.iter().find(|&&y| c.divides(x * y - GaussianInt::ONE)).unwrap();
            s += e_additive(((w * w * x) + inv).to_complex() / cz);
        }
        s * e_additive((w + w).to_complex() / cz)
    }

    fn params(c: f64, m: f64, n: f64) -> QuadFormParams {
        QuadFormParams {
            d: g(1, 0),
            theta: Complex64::new(1.0, 0.0),
            gamma: 0.0,
            c,
            m,
            n,
        }
    }

    #[test]
    fn small_instance_matches_double_loop() {
        let mut p = params(2.0, 3.0, 3.0);
        p.theta = Complex64::new(0.3, -0.7);
        p.gamma = 0.5;
        p.d = g(1, 1);
        let a = unit_seq(3.0);
        let b = CoefficientSequence::from_entries(
            NormWindow::Dyadic(3.0),
            [(ideal(2, 1), Complex64::new(0.5, 1.0)), (ideal(2, 0), Complex64::new(-1.0, 0.0))],
        )
        .unwrap();
        let got = quad_form(&p, &a, &b).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        for (m, am) in a.iter() {
            for (n, bn) in b.iter() {
                for c in elements_in_norm_range(2.0, 4.0) {
                    let w = p.d * m.gen() * n.gen();
                    if gcd(w, c).unwrap() != GaussianInt::ONE {
                        continue;
                    }
                    let mn = (m.gen() * n.gen()).to_complex();
                    want += am * bn.conj() * (c.norm() as f64).powf(p.gamma) * f_oracle(w, c)
                        * e_additive(mn * p.theta / c.to_complex());
                }
            }
        }
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
        assert!(got.norm() <= quad_form_trivial_bound(&p, &a, &b).unwrap());
    }

    #[test]
    fn empty_and_single_term() {
        // Every c with 1 < N(c) <= 2 is an associate of 1+i, which shares a
        // factor with d = 1+i.
        let mut p = params(1.0, 3.0, 3.0);
        p.d = g(1, 1);
        let a = unit_seq(3.0);
        assert_eq!(quad_form(&p, &a, &a).unwrap(), Complex64::new(0.0, 0.0));

        // One m, one n, and c = +-(1+i), +-(1-i) collapse to one class of
        // terms; compare with the formula term by term.
        let p = params(1.0, 3.0, 3.0);
        let one = |n: GIdeal, v: f64| {
            CoefficientSequence::from_entries(NormWindow::Dyadic(3.0), [(n, Complex64::new(v, 0.0))]).unwrap()
        };
        let (m, n) = (ideal(2, 1), ideal(1, 2));
        let got = quad_form(&p, &one(m, 2.0), &one(n, 3.0)).unwrap();
        let mut want = Complex64::new(0.0, 0.0);
        for c in elements_in_norm_range(1.0, 2.0) {
            let w = m.gen() * n.gen();
            want += 6.0 * f_oracle(w, c) * e_additive(w.to_complex() / c.to_complex());
        }
        assert!((got - want).norm() < 1e-10);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let p = params(4.0, 4.0, 4.0);
        let a = unit_seq(4.0);
        let b = unit_seq(4.0);
        let r1 = quad_form_bound_ratio(&p, &a, &b).unwrap();
        let r2 = quad_form_bound_ratio(&p, &a.scaled(Complex64::new(3.0, 0.0)), &b).unwrap();
        assert!(r1.ratio.is_finite() && r1.ratio > 0.0);
        assert!((r1.ratio - r2.ratio).abs() < 1e-12 * r1.ratio);
        assert!((r2.lhs - 3.0 * r1.lhs).abs() < 1e-10 * r2.lhs);
    }

    #[test]
    fn unit_sequences_at_two() {
        // (M, 2M] = (2, 4] holds only (2), and every c of norm 4 shares it.
        let p = params(2.0, 2.0, 2.0);
        let r = quad_form_bound_ratio(&p, &unit_seq(2.0), &unit_seq(2.0)).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn gamma_shift_scales_within_the_range() {
        let p = params(4.0, 4.0, 4.0);
        let mut q = p;
        q.gamma = 1.0;
        let (a, b) = (unit_seq(4.0), unit_seq(4.0));
        let rhs = quad_form_rhs(&q, &a, &b) / quad_form_rhs(&p, &a, &b);
        assert!((rhs - 4.0).abs() < 1e-12);
        let trivial = quad_form_trivial_bound(&q, &a, &b).unwrap() / quad_form_trivial_bound(&p, &a, &b).unwrap();
        assert!(trivial > 4.0 && trivial <= 8.0);
    }

    #[test]
    fn rejects_bad_support() {
        let p = params(2.0, 3.0, 3.0);
        let a = unit_seq(4.0);
        assert!(quad_form(&p, &a, &unit_seq(3.0)).is_err());
        let mut q = p;
        q.theta = Complex64::new(0.0, 0.0);
        assert!(quad_form(&q, &unit_seq(3.0), &unit_seq(3.0)).is_err());
    }
}
