//! Kloosterman sums over `Z[i]` and the twisted sum `F(w; c)`.
//!
//! Every term is a root of unity `e[Re(z * conj(c)) / N(c)]`, so phases are
//! kept as exact integers mod `N(c)` and only turned into floats through a
//! per-modulus table. Summation always runs over [`unit_residues`] order.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauss::{
    gcd, mod_inverse, multiplicative_functions, unit_residues, GIdeal, GaussianInt,
    ResidueSystem,
};

/// Largest modulus norm handled by the exact phase arithmetic.
pub const MAX_MODULUS_NORM: i64 = 1 << 31;

/// `exp(2 pi i Re z)`.
pub fn e_additive(z: Complex64) -> Complex64 {
    let x = z.re - z.re.round();
    Complex64::from_polar(1.0, TAU * x)
}

/// `exp(2 pi i k / n)` for `k` in `0..n`.
#[derive(Clone, Debug)]
pub struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(n: usize) -> Self {
        let n = n.max(1);
        let roots = (0..n)
            .map(|k| {
                // Fold to |angle| <= pi before evaluating for symmetric rounding.
                let k = k as f64;
                let n = n as f64;
                let x = if 2.0 * k > n { k - n } else { k };
                Complex64::from_polar(1.0, TAU * x / n)
            })
            .collect();
        Self { roots }
    }

    pub fn order(&self) -> i64 {
        self.roots.len() as i64
    }

    pub fn get(&self, k: i64) -> Complex64 {
        self.roots[k.rem_euclid(self.order()) as usize]
    }
}

/// Cached residues, inverses and roots of unity for one modulus `c`.
#[derive(Clone, Debug)]
pub struct ModulusContext {
    c: GaussianInt,
    residues: ResidueSystem,
    norm: i64,
    units: Vec<GaussianInt>,
    inverses: Vec<GaussianInt>,
    roots: RootTable,
}

impl ModulusContext {
    pub fn new(c: GaussianInt) -> Result<Self> {
        let residues = ResidueSystem::new(c)?;
        let norm = c.norm();
        if norm > MAX_MODULUS_NORM {
            return Err(Error::Overflow {
                op: "exponential sum modulus",
            });
        }
        let units = unit_residues(c)?;
        let inverses = units
            .iter()
            .map(|&a| mod_inverse(a, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            c,
            residues,
            norm,
            units,
            inverses,
            roots: RootTable::new(norm as usize),
        })
    }

    pub fn modulus(&self) -> GaussianInt {
        self.c
    }

    pub fn residues(&self) -> &ResidueSystem {
        &self.residues
    }

    pub fn units(&self) -> &[GaussianInt] {
        &self.units
    }

    pub fn inverses(&self) -> &[GaussianInt] {
        &self.inverses
    }

    pub fn phi(&self) -> usize {
        self.units.len()
    }

    /// `Re(z * conj(c)) mod N(c)`, so that `e[z / c] = roots[phase]`.
    pub fn phase(&self, z: GaussianInt) -> i64 {
        let z = self.residues.reduce(z);
        let re = z.re as i128 * self.c.re as i128 + z.im as i128 * self.c.im as i128;
        re.rem_euclid(self.norm as i128) as i64
    }

    /// `e[z / c]`.
    pub fn additive(&self, z: GaussianInt) -> Complex64 {
        self.roots.get(self.phase(z))
    }

    /// `S(m, n; c)`.
    pub fn kloosterman(&self, m: GaussianInt, n: GaussianInt) -> Complex64 {
        if self.c.is_unit() {
            return Complex64::new(1.0, 0.0);
        }
        let rs = &self.residues;
        let (m, n) = (rs.reduce(m), rs.reduce(n));
        let mut acc = Complex64::new(0.0, 0.0);
        for (&a, &ainv) in self.units.iter().zip(&self.inverses) {
            let z = rs.mul(a, m) + rs.mul(ainv, n);
            acc += self.roots.get(self.phase(z));
        }
        acc
    }

    /// `F(w; c) = S(w^2, 1; c) e[2w / c]`.
    pub fn f_sum(&self, w: GaussianInt) -> Result<Complex64> {
        if gcd(w, self.c)? != GaussianInt::ONE {
            return Err(Error::NotCoprime {
                op: "f_sum",
                a: w,
                b: self.c,
            });
        }
        if self.c.is_unit() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let w = self.residues.reduce(w);
        let w2 = self.residues.mul(w, w);
        Ok(self.kloosterman(w2, GaussianInt::ONE) * self.additive(w + w))
    }

    /// `F(alpha; c)` for every unit residue, in [`Self::units`] order.
    ///
    /// `S(x, 1; c)` is evaluated once per distinct square `x`, with the
    /// per-term phases `Re(beta x conj c) + Re(beta^-1 conj c)` assembled
    /// from precomputed coordinates.
    pub fn f_table(&self) -> Vec<Complex64> {
        if self.c.is_unit() {
            return vec![Complex64::new(1.0, 0.0)];
        }
        let n = self.norm;
        let cbar = self.c.conj();
        let mut lin = Vec::with_capacity(self.phi());
        for (&b, &binv) in self.units.iter().zip(&self.inverses) {
            let u = b * cbar;
            let q = (binv.re * cbar.re - binv.im * cbar.im).rem_euclid(n);
            lin.push((u.re.rem_euclid(n), u.im.rem_euclid(n), q));
        }
        let mut memo: HashMap<GaussianInt, Complex64> = HashMap::new();
        self.units
            .iter()
            .map(|&a| {
                let x = self.residues.mul(a, a);
                let s = *memo.entry(x).or_insert_with(|| {
                    let (xr, xi) = (x.re % n, x.im % n);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &(ur, ui, q) in &lin {
                        acc += self.roots.get(xr * ur - xi * ui + q);
                    }
                    acc
                });
                s * self.additive(a + a)
            })
            .collect()
    }
}

/// Contexts keyed by modulus, for scans that revisit the same moduli.
#[derive(Debug, Default)]
pub struct ContextCache {
    contexts: HashMap<GaussianInt, ModulusContext>,
}

impl ContextCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, c: GaussianInt) -> Result<&ModulusContext> {
        if !self.contexts.contains_key(&c) {
            let ctx = ModulusContext::new(c)?;
            self.contexts.insert(c, ctx);
        }
        Ok(&self.contexts[&c])
    }

    pub fn kloosterman(&mut self, m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Result<Complex64> {
        Ok(self.get(c)?.kloosterman(m, n))
    }
}

/// `S(m, n; c) = sum over alpha in (O/c)^x of e[(alpha m + alpha^-1 n) / c]`,
/// with `S(m, n; unit) = 1`.
pub fn kloosterman(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Result<Complex64> {
    Ok(ModulusContext::new(c)?.kloosterman(m, n))
}

/// `F(w; c) = S(w^2, 1; c) e[2w / c]`; requires `(w, c) = 1`.
pub fn f_sum(w: GaussianInt, c: GaussianInt) -> Result<Complex64> {
    ModulusContext::new(c)?.f_sum(w)
}

/// `S(m^2, n^2; c) - sum_{d | (m^2, n^2, c)} N(d) S((mn/d)^2, 1; c/d)`.
pub fn selberg_residual(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Result<Complex64> {
    selberg_residual_cached(&mut ContextCache::new(), m, n, c)
}

pub fn selberg_residual_cached(
    cache: &mut ContextCache,
    m: GaussianInt,
    n: GaussianInt,
    c: GaussianInt,
) -> Result<Complex64> {
    let overflow = || Error::Overflow {
        op: "selberg_residual",
    };
    let m2 = m.checked_mul(m).ok_or_else(overflow)?;
    let n2 = n.checked_mul(n).ok_or_else(overflow)?;
    let mn = m.checked_mul(n).ok_or_else(overflow)?;
    let lhs = cache.kloosterman(m2, n2, c)?;
    let common = gcd(gcd(m2, n2).unwrap_or(GaussianInt::ZERO), c)?;
    let mut rhs = Complex64::new(0.0, 0.0);
    for d in crate::gauss::divisors(GIdeal::new(common)?) {
        let d = d.gen();
        let w = mn.exact_div(d).ok_or(Error::NotDivisible {
            op: "selberg_residual",
            divisor: d,
            value: mn,
        })?;
        let cd = c.exact_div(d).ok_or(Error::NotDivisible {
            op: "selberg_residual",
            divisor: d,
            value: c,
        })?;
        let w2 = w.checked_mul(w).ok_or_else(overflow)?;
        rhs += cache.kloosterman(w2, GaussianInt::ONE, cd)? * d.norm() as f64;
    }
    Ok(lhs - rhs)
}

/// `S(w^2, 1; cg) - [0 if (c, g) != 1 else mu(g) S((w/g)^2, 1; c)]`;
/// requires `g | w`.
pub fn shift_vanishing_residual(
    w: GaussianInt,
    c: GaussianInt,
    g: GaussianInt,
) -> Result<Complex64> {
    shift_vanishing_residual_cached(&mut ContextCache::new(), w, c, g)
}

pub fn shift_vanishing_residual_cached(
    cache: &mut ContextCache,
    w: GaussianInt,
    c: GaussianInt,
    g: GaussianInt,
) -> Result<Complex64> {
    let overflow = || Error::Overflow {
        op: "shift_vanishing_residual",
    };
    if g.is_zero() {
        return Err(Error::Zero {
            op: "shift_vanishing_residual",
        });
    }
    let quotient = w.exact_div(g).ok_or(Error::NotDivisible {
        op: "shift_vanishing_residual",
        divisor: g,
        value: w,
    })?;
    let cg = c.checked_mul(g).ok_or_else(overflow)?;
    let lhs = cache.kloosterman(w.checked_mul(w).ok_or_else(overflow)?, GaussianInt::ONE, cg)?;
    let rhs = if gcd(c, g)? != GaussianInt::ONE {
        Complex64::new(0.0, 0.0)
    } else {
        let mu = multiplicative_functions(GIdeal::new(g)?).mu;
        let q2 = quotient.checked_mul(quotient).ok_or_else(overflow)?;
        cache.kloosterman(q2, GaussianInt::ONE, c)? * mu as f64
    };
    Ok(lhs - rhs)
}

/// `|S(m, n; c)| / (tau(c) sqrt(N((m, n, c))) sqrt(N(c)))`.
pub fn weil_ratio(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Result<f64> {
    let s = kloosterman(m, n, c)?;
    Ok(s.norm() / weil_scale(m, n, c)?)
}

/// The normalizer `tau(c) sqrt(N((m, n, c))) sqrt(N(c))` of [`weil_ratio`].
pub fn weil_scale(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Result<f64> {
    let tau = multiplicative_functions(GIdeal::new(c)?).tau as f64;
    let common = match gcd(m, n) {
        Ok(g) => gcd(g, c)?,
        Err(_) => canonical_gen(c)?,
    };
    Ok(tau * (common.norm() as f64).sqrt() * (c.norm() as f64).sqrt())
}

fn canonical_gen(c: GaussianInt) -> Result<GaussianInt> {
    Ok(GIdeal::new(c)?.gen())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    /// Direct floating-point evaluation straight from the definition.
    fn kloosterman_oracle(m: GaussianInt, n: GaussianInt, c: GaussianInt) -> Complex64 {
        if c.is_unit() {
            return Complex64::new(1.0, 0.0);
        }
        let cc = c.to_complex();
        unit_residues(c)
            .unwrap()
            .into_iter()
            .map(|a| {
                let ai = mod_inverse(a, c).unwrap();
                e_additive((a * m + ai * n).to_complex() / cc)
            })
            .sum()
    }

    #[test]
    fn e_additive_examples() {
        assert!((e_additive(Complex64::new(0.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!((e_additive(Complex64::new(1.0, -1.0)) - 1.0).norm() < 1e-15);
        assert!((e_additive(Complex64::new(1.5, -1.5)) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn kloosterman_examples() {
        let s = kloosterman(g(1, 0), g(1, 0), g(1, 1)).unwrap();
        assert!((s - 1.0).norm() < 1e-12);
        let s = kloosterman(g(1, 0), g(2, 0), g(1, 1)).unwrap();
        assert!((s + 1.0).norm() < 1e-12);
        let s = kloosterman(g(1, 0), g(1, 0), g(2, 1)).unwrap();
        let expect = 2.0 + 2.0 * (TAU / 5.0).cos();
        assert!((s.re - expect).abs() < 1e-12 && s.im.abs() < 1e-12);
        assert!((expect - 2.618034).abs() < 1e-6);
        assert_eq!(kloosterman(g(3, 1), g(2, 0), g(0, 1)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn f_sum_examples() {
        assert!((f_sum(g(1, 0), g(1, 1)).unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(f_sum(g(7, 3), g(-1, 0)).unwrap(), Complex64::new(1.0, 0.0));
        let c = g(2, 1);
        let oracle = kloosterman_oracle(g(1, 0), g(1, 0), c)
            * e_additive(g(2, 0).to_complex() / c.to_complex());
        assert!((f_sum(g(1, 0), c).unwrap() - oracle).norm() < 1e-12);
        assert!(f_sum(g(2, 1), g(5, 0)).is_err());
    }

    #[test]
    fn f_table_matches_pointwise() {
        for c in [g(1, 1), g(2, 1), g(3, 0), g(4, 0), g(3, 2), g(-5, 5), g(7, 1)] {
            let ctx = ModulusContext::new(c).unwrap();
            let table = ctx.f_table();
            for (&a, &f) in ctx.units().iter().zip(&table) {
                assert!((ctx.f_sum(a).unwrap() - f).norm() < 1e-9, "{c} {a}");
            }
        }
    }

    #[test]
    fn exact_phases_match_float_oracle() {
        for c in [g(1, 1), g(2, 1), g(3, 0), g(2, 2), g(4, -3), g(0, 7)] {
            for m in [g(1, 0), g(2, -1), g(0, 3), g(5, 5)] {
                for n in [g(1, 0), g(1, 1), g(-4, 2)] {
                    let s = kloosterman(m, n, c).unwrap();
                    assert!((s - kloosterman_oracle(m, n, c)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn selberg_examples() {
        for c in [g(1, 1), g(2, 1), g(6, 0), g(3, 3)] {
            assert!(selberg_residual(g(1, 0), g(1, 0), c).unwrap().norm() < 1e-9);
        }
        assert!(selberg_residual(g(2, 0), g(2, 0), g(2, 0)).unwrap().norm() < 1e-9);
        assert!(selberg_residual(g(1, 1), g(3, 0), g(6, 0)).unwrap().norm() < 1e-9);
    }

    #[test]
    fn shift_examples() {
        assert!(shift_vanishing_residual(g(3, 2), g(5, 1), g(0, 1)).unwrap().norm() < 1e-9);
        assert!(shift_vanishing_residual(g(1, 1), g(3, 0), g(1, 1)).unwrap().norm() < 1e-9);
        assert!(shift_vanishing_residual(g(2, 2), g(1, 1), g(1, 1)).unwrap().norm() < 1e-9);
        assert!(shift_vanishing_residual(g(1, 0), g(3, 0), g(1, 1)).is_err());
    }

    #[test]
    fn weil_examples() {
        let r = weil_ratio(g(1, 0), g(1, 0), g(1, 1)).unwrap();
        assert!((r - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
        let r = weil_ratio(g(1, 0), g(1, 0), g(2, 1)).unwrap();
        assert!((r - 0.5854).abs() < 1e-4);
        // m = c: the gcd (m, n, c) enters through n.
        let c = g(3, 0);
        let r = weil_ratio(c, g(3, 3), c).unwrap();
        let s = kloosterman_oracle(c, g(3, 3), c).norm();
        assert!((r - s / (2.0 * 3.0 * 3.0)).abs() < 1e-12);
    }

    fn small_gauss(max: i64) -> impl Strategy<Value = GaussianInt> {
        (-max..=max, -max..=max).prop_map(|(a, b)| GaussianInt::new(a, b))
    }

    proptest! {
        #[test]
        fn kloosterman_is_symmetric_real_and_bounded(
            m in small_gauss(4), n in small_gauss(4), c in small_gauss(14)
        ) {
            prop_assume!(!c.is_zero() && c.norm() <= 200);
            let ctx = ModulusContext::new(c).unwrap();
            let s = ctx.kloosterman(m, n);
            prop_assert!((s - ctx.kloosterman(n, m)).norm() < 1e-9);
            prop_assert!(s.im.abs() < 1e-9);
            prop_assert!(s.norm() <= ctx.phi() as f64 + 1e-9);
            for e in crate::gauss::UNITS {
                prop_assert!((ctx.kloosterman(e * m, e.conj() * n) - s).norm() < 1e-9);
            }
        }
    }
}
