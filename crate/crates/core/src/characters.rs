//! Dirichlet characters of `(Z[i]/c)^x` and the finite Mellin transform of
//! `F(w; c)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expsum::{ModulusContext, RootTable};
use crate::gauss::{factor, gcd, ideals_up_to_norm, GIdeal, GaussianInt, ResidueSystem};

/// `(Z[i]/c)^x` as an explicit product of cyclic groups.
#[derive(Debug)]
pub struct CharGroup {
    modulus: GIdeal,
    residues: ResidueSystem,
    units: Vec<GaussianInt>,
    index: HashMap<GaussianInt, usize>,
    generators: Vec<(GaussianInt, u64)>,
    /// Discrete logarithms of each unit with respect to `generators`.
    logs: Vec<Vec<u64>>,
    exponent: u64,
    roots: RootTable,
}

fn lcm(a: u64, b: u64) -> u64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

fn rational_prime_powers(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut a = 0;
        while n % p == 0 {
            n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl CharGroup {
    pub fn new(c: GaussianInt) -> Result<Arc<Self>> {
        let modulus = GIdeal::new(c)?;
        let residues = ResidueSystem::new(modulus.gen())?;
        let units = crate::gauss::unit_residues(modulus.gen())?;
        let index: HashMap<_, _> = units.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        let phi = units.len() as u64;
        let pow = |mut x: GaussianInt, mut e: u64| {
            let mut acc = residues.reduce(GaussianInt::ONE);
            while e > 0 {
                if e & 1 == 1 {
                    acc = residues.mul(acc, x);
                }
                x = residues.mul(x, x);
                e >>= 1;
            }
            acc
        };
        let one = residues.reduce(GaussianInt::ONE);

        let mut generators: Vec<(GaussianInt, u64)> = Vec::new();
        let mut logs = vec![Vec::new(); units.len()];
        if phi > 1 {
            for (ell, a) in rational_prime_powers(phi) {
                let order = ell.pow(a);
                let cofactor = phi / order;
                let sylow: Vec<GaussianInt> = {
                    let mut s: Vec<_> = units.iter().map(|&u| pow(u, cofactor)).collect();
                    s.sort_by_key(|z| (z.im, z.re));
                    s.dedup();
                    s
                };
                // Subgroup generated so far, with logs in the local generators.
                let mut sub: HashMap<GaussianInt, Vec<u64>> = HashMap::from([(one, Vec::new())]);
                let mut local: Vec<(GaussianInt, u64)> = Vec::new();
                while (sub.len() as u64) < order {
                    // Element of largest order modulo the current subgroup.
                    let mut best = (one, 1u64);
                    for &x in &sylow {
                        let (mut y, mut k) = (x, 1u64);
                        while !sub.contains_key(&y) {
                            y = pow(y, ell);
                            k *= ell;
                        }
                        if k > best.1 {
                            best = (x, k);
                        }
                    }
                    let (x, k) = best;
                    let coords = sub[&pow(x, k)].clone();
                    // x^k = prod g_i^{b_i} with k | b_i; strip those powers.
                    let mut y = x;
                    for (&(gen, ord), &b) in local.iter().zip(&coords) {
                        debug_assert_eq!(b % k, 0);
                        y = residues.mul(y, pow(gen, ord - b / k % ord));
                    }
                    let mut grown = HashMap::with_capacity(sub.len() * k as usize);
                    for (h, lh) in &sub {
                        let mut z = *h;
                        for j in 0..k {
                            let mut l = lh.clone();
                            l.resize(local.len(), 0);
                            l.push(j);
                            grown.insert(z, l);
                            z = residues.mul(z, y);
                        }
                    }
                    for l in grown.values_mut() {
                        l.resize(local.len() + 1, 0);
                    }
                    sub = grown;
                    local.push((y, k));
                }
                for l in sub.values_mut() {
                    l.resize(local.len(), 0);
                }
                // CRT idempotent projecting onto this Sylow subgroup.
                let idem = (0..order)
                    .map(|t| t * cofactor)
                    .find(|e| e % order == 1)
                    .expect("cofactor is invertible mod the prime power");
                for (k, &u) in units.iter().enumerate() {
                    logs[k].extend_from_slice(&sub[&pow(u, idem)]);
                }
                generators.extend(local);
            }
        }
        let exponent = generators.iter().fold(1, |acc, &(_, o)| lcm(acc, o));
        Ok(Arc::new(Self {
            modulus,
            residues,
            units,
            index,
            generators,
            logs,
            exponent,
            roots: RootTable::new(exponent as usize),
        }))
    }

    pub fn modulus(&self) -> GIdeal {
        self.modulus
    }

    pub fn generators(&self) -> &[(GaussianInt, u64)] {
        &self.generators
    }

    pub fn units(&self) -> &[GaussianInt] {
        &self.units
    }

    pub fn order(&self) -> usize {
        self.units.len()
    }

    /// Exponent of the group: characters take values in the `exponent`-th
    /// roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn trivial(self: &Arc<Self>) -> DirichletChar {
        DirichletChar {
            group: Arc::clone(self),
            exps: vec![0; self.generators.len()],
        }
    }

    /// Character number `k` in mixed radix over the generator orders.
    pub fn character(self: &Arc<Self>, mut k: usize) -> DirichletChar {
        let exps = self
            .generators
            .iter()
            .map(|&(_, o)| {
                let e = k as u64 % o;
                k /= o as usize;
                e
            })
            .collect();
        DirichletChar {
            group: Arc::clone(self),
            exps,
        }
    }

    pub fn characters(self: &Arc<Self>) -> impl Iterator<Item = DirichletChar> + '_ {
        (0..self.order()).map(move |k| self.character(k))
    }

    /// Character with prescribed exponent vector; entries are reduced mod
    /// the generator orders.
    pub fn from_exponents(self: &Arc<Self>, exps: &[u64]) -> Result<DirichletChar> {
        if exps.len() != self.generators.len() {
            return Err(Error::Invalid(format!(
                "expected {} exponents for modulus {}, got {}",
                self.generators.len(),
                self.modulus,
                exps.len()
            )));
        }
        Ok(DirichletChar {
            group: Arc::clone(self),
            exps: exps
                .iter()
                .zip(&self.generators)
                .map(|(&e, &(_, o))| e % o)
                .collect(),
        })
    }

    fn unit_index(&self, alpha: GaussianInt) -> Option<usize> {
        if self.modulus.is_unit() {
            return Some(0);
        }
        self.index.get(&self.residues.reduce(alpha)).copied()
    }

    /// `F-hat(chi)` for every character, in [`Self::characters`] order,
    /// using the generator `c` of the modulus for `F(w; c)`.
    pub fn mellin_all(self: &Arc<Self>, c: GaussianInt) -> Result<Vec<Complex64>> {
        let table = f_table_for(self, c)?;
        Ok(self
            .characters()
            .map(|chi| mellin_from_table(self, &chi, &table))
            .collect())
    }
}

fn f_table_for(group: &CharGroup, c: GaussianInt) -> Result<Vec<Complex64>> {
    if GIdeal::new(c)? != group.modulus {
        return Err(Error::Invalid(format!(
            "{c} does not generate the modulus {}",
            group.modulus
        )));
    }
    let ctx = ModulusContext::new(c)?;
    debug_assert_eq!(ctx.units(), group.units.as_slice());
    Ok(ctx.f_table())
}

fn mellin_from_table(group: &CharGroup, chi: &DirichletChar, table: &[Complex64]) -> Complex64 {
    let sum: Complex64 = (0..group.order())
        .map(|k| chi.value_at(k).conj() * table[k])
        .sum();
    sum / group.order() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharClass {
    Trivial,
    Primitive,
    SemiPrimitive,
    Mixed,
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CharClass::Trivial => "trivial",
            CharClass::Primitive => "primitive",
            CharClass::SemiPrimitive => "semi-primitive",
            CharClass::Mixed => "mixed",
        })
    }
}

#[derive(Clone)]
pub struct DirichletChar {
    group: Arc<CharGroup>,
    exps: Vec<u64>,
}

impl fmt::Debug for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi{:?} mod {}", self.exps, self.group.modulus)
    }
}

impl PartialEq for DirichletChar {
    fn eq(&self, other: &Self) -> bool {
        self.group.modulus == other.group.modulus && self.exps == other.exps
    }
}

impl DirichletChar {
    pub fn group(&self) -> &Arc<CharGroup> {
        &self.group
    }

    pub fn modulus(&self) -> GIdeal {
        self.group.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    fn phase_at(&self, k: usize) -> u64 {
        let l = self.group.exponent;
        let mut acc = 0u64;
        for ((&a, &(_, o)), &x) in self
            .exps
            .iter()
            .zip(&self.group.generators)
            .zip(&self.group.logs[k])
        {
            acc = (acc + (a * x % o) * (l / o)) % l;
        }
        acc
    }

    fn value_at(&self, k: usize) -> Complex64 {
        self.group.roots.get(self.phase_at(k) as i64)
    }

    /// `chi(alpha)` as an exact phase `j`, meaning `exp(2 pi i j / exponent)`;
    /// `None` when `alpha` is not a unit mod the modulus.
    pub fn phase(&self, alpha: GaussianInt) -> Option<u64> {
        self.group.unit_index(alpha).map(|k| self.phase_at(k))
    }

    pub fn value(&self, alpha: GaussianInt) -> Complex64 {
        match self.group.unit_index(alpha) {
            Some(k) => self.value_at(k),
            None => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&a| a == 0)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.modulus() != other.modulus() {
            return Err(Error::Invalid(format!(
                "characters mod {} and {} cannot be multiplied",
                self.modulus(),
                other.modulus()
            )));
        }
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&self.group.generators)
            .map(|((&a, &b), &(_, o))| (a + b) % o)
            .collect();
        Ok(Self {
            group: Arc::clone(&self.group),
            exps,
        })
    }

    pub fn conj(&self) -> Self {
        let exps = self
            .exps
            .iter()
            .zip(&self.group.generators)
            .map(|(&a, &(_, o))| (o - a) % o)
            .collect();
        Self {
            group: Arc::clone(&self.group),
            exps,
        }
    }

    pub fn square(&self) -> Self {
        self.mul(self).expect("same modulus")
    }

    /// Is `chi` trivial on every unit congruent to 1 mod `d`?
    fn trivial_mod(&self, d: GaussianInt) -> bool {
        let g = &self.group;
        (0..g.order()).all(|k| !d.divides(g.units[k] - GaussianInt::ONE) || self.phase_at(k) == 0)
    }

    /// Exponent of each prime of the modulus in the conductor, as
    /// `(prime, v_p(modulus), v_p(conductor))`.
    pub fn local_conductors(&self) -> Vec<(GIdeal, u32, u32)> {
        let c = self.modulus().gen();
        let f = factor(c).expect("nonzero modulus");
        f.factors
            .iter()
            .map(|&(p, k)| {
                let rest = c.exact_div(p.gen().pow(k)).expect("prime power divides");
                let j = (0..=k)
                    .find(|&j| self.trivial_mod(rest * p.gen().pow(j)))
                    .unwrap_or(k);
                (p, k, j)
            })
            .collect()
    }

    pub fn conductor(&self) -> GIdeal {
        let gen = self
            .local_conductors()
            .iter()
            .fold(GaussianInt::ONE, |acc, &(p, _, j)| acc * p.gen().pow(j));
        GIdeal::new(gen).expect("nonzero")
    }

    /// For every prime of the modulus, `1 <= v_p(conductor) < v_p(modulus)`.
    /// Holds vacuously for the modulus `(1)`.
    pub fn is_semi_primitive(&self) -> bool {
        self.local_conductors()
            .iter()
            .all(|&(_, k, j)| 1 <= j && j < k)
    }

    pub fn class(&self) -> CharClass {
        let local = self.local_conductors();
        if local.iter().all(|&(_, _, j)| j == 0) {
            CharClass::Trivial
        } else if local.iter().all(|&(_, k, j)| j == k) {
            CharClass::Primitive
        } else if local.iter().all(|&(_, k, j)| 1 <= j && j < k) {
            CharClass::SemiPrimitive
        } else {
            CharClass::Mixed
        }
    }

    /// The factorization `chi = prod chi_p` into characters mod the prime
    /// power parts of the modulus, in prime order.
    pub fn local_components(&self) -> Result<Vec<DirichletChar>> {
        let c = self.modulus().gen();
        let f = factor(c)?;
        let l = self.group.exponent;
        let mut out = Vec::new();
        for &(p, k) in &f.factors {
            let q = p.gen().pow(k);
            let rest = c.exact_div(q).expect("prime power divides");
            let local = CharGroup::new(q)?;
            let exps = local
                .generators
                .iter()
                .map(|&(gen, o)| {
                    let lift = crt_lift(gen, q, GaussianInt::ONE, rest)?;
                    let phase = self.phase(lift).expect("lift is a unit");
                    Ok(phase * o / l)
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(local.from_exponents(&exps)?);
        }
        Ok(out)
    }
}

/// `x` with `x = a mod m` and `x = b mod n`, for coprime `m`, `n`.
fn crt_lift(a: GaussianInt, m: GaussianInt, b: GaussianInt, n: GaussianInt) -> Result<GaussianInt> {
    let (g, s, t) = crate::gauss::extended_gcd(m, n)?;
    if !g.is_unit() {
        return Err(Error::NotCoprime {
            op: "crt_lift",
            a: m,
            b: n,
        });
    }
    // s m + t n = g, so (s m) / g = 1 mod n and (t n) / g = 1 mod m.
    let ginv = g.conj();
    let x = a * t * n * ginv + b * s * m * ginv;
    let mn = m * n;
    Ok(ResidueSystem::new(mn)?.reduce(x))
}

/// Build the character group of `(Z[i]/c)^x`.
pub fn char_group(c: GaussianInt) -> Result<Arc<CharGroup>> {
    CharGroup::new(c)
}

/// `F-hat(chi) = (1/phi(c)) sum conj(chi(alpha)) F(alpha; c)` for a
/// generator `c` of the modulus of `chi`.
pub fn mellin_hat(c: GaussianInt, chi: &DirichletChar) -> Result<Complex64> {
    let table = f_table_for(&chi.group, c)?;
    Ok(mellin_from_table(&chi.group, chi, &table))
}

/// What the local evaluation predicts for `|F-hat(chi)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum LemmaPrediction {
    Exact(f64),
    /// Only an upper bound is known.
    Bound(f64),
}

impl LemmaPrediction {
    pub fn value(self) -> f64 {
        match self {
            LemmaPrediction::Exact(v) | LemmaPrediction::Bound(v) => v,
        }
    }

    /// Does `measured` agree with the prediction within `tol`?
    pub fn accepts(self, measured: f64, tol: f64) -> bool {
        match self {
            LemmaPrediction::Exact(v) => (measured - v).abs() <= tol,
            LemmaPrediction::Bound(v) => measured <= v + tol,
        }
    }
}

/// Predicted `|F-hat(chi)|` for a character of prime-power modulus `p^k`.
/// Mixed characters cannot occur for a prime power.
pub fn lemma_predicted_modulus(chi: &DirichletChar) -> Result<LemmaPrediction> {
    let local = chi.local_conductors();
    let &[(p, k, kstar)] = local.as_slice() else {
        return Err(Error::NotPrimePower(chi.modulus()));
    };
    let n = p.norm() as f64;
    let quadratic = chi.square().is_trivial();
    use LemmaPrediction::{Bound, Exact};
    Ok(if kstar == 0 {
        if k == 1 {
            Exact(1.0 / (n - 1.0))
        } else if k % 2 == 0 {
            Exact(n.powf(k as f64 / 2.0))
        } else {
            Exact(0.0)
        }
    } else if kstar == k {
        if p.norm() == 2 {
            Exact(0.0)
        } else if quadratic {
            Exact(n.sqrt() / (n - 1.0))
        } else {
            Exact(n / (n - 1.0))
        }
    } else if (k - kstar) % 2 == 1 {
        Exact(0.0)
    } else if quadratic {
        Bound(n.powf(k as f64 / 2.0))
    } else if p.norm() == 2 && k == kstar + 2 {
        Exact(2f64.powf(2.5))
    } else {
        Exact(0.0)
    })
}

/// Product of the local predictions over the prime-power components, with
/// a bound if any factor is only a bound.
pub fn predicted_modulus_via_components(chi: &DirichletChar) -> Result<LemmaPrediction> {
    let mut value = 1.0;
    let mut exact = true;
    for local in chi.local_components()? {
        match lemma_predicted_modulus(&local)? {
            LemmaPrediction::Exact(v) => value *= v,
            LemmaPrediction::Bound(v) => {
                value *= v;
                exact = false;
            }
        }
    }
    Ok(if exact {
        LemmaPrediction::Exact(value)
    } else {
        LemmaPrediction::Bound(value)
    })
}

/// `F-hat(chi1 chi2) - conj(chi1(c2)) conj(chi2(c1)) F-hat(chi1) F-hat(chi2)`
/// with canonical generators `c1`, `c2` and `c1 c2` for the product.
pub fn twisted_mult_residual(chi1: &DirichletChar, chi2: &DirichletChar) -> Result<Complex64> {
    let (c1, c2) = (chi1.modulus().gen(), chi2.modulus().gen());
    if gcd(c1, c2)? != GaussianInt::ONE {
        return Err(Error::NotCoprime {
            op: "twisted_mult_residual",
            a: c1,
            b: c2,
        });
    }
    let c = c1.checked_mul(c2).ok_or(Error::Overflow {
        op: "twisted_mult_residual",
    })?;
    let ctx = ModulusContext::new(c)?;
    let table = ctx.f_table();
    let lhs: Complex64 = ctx
        .units()
        .iter()
        .zip(&table)
        .map(|(&a, &f)| (chi1.value(a) * chi2.value(a)).conj() * f)
        .sum::<Complex64>()
        / ctx.phi() as f64;
    let rhs = chi1.value(c2).conj()
        * chi2.value(c1).conj()
        * mellin_hat(c1, chi1)?
        * mellin_hat(c2, chi2)?;
    Ok(lhs - rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AverageMode {
    Trivial,
    SemiPrimitive,
}

/// `sum_{N(c) <= bound} N(c)^gamma sum_chi |F-hat(chi)|`, over the trivial
/// character only or over semi-primitive characters.
pub fn corollary_average(bound: f64, gamma: f64, mode: AverageMode) -> Result<f64> {
    if !(bound >= 1.0) {
        return Err(Error::Invalid(format!("bound must be >= 1, got {bound}")));
    }
    let mut total = 0.0;
    for ideal in ideals_up_to_norm(bound) {
        let c = ideal.gen();
        let weight = (ideal.norm() as f64).powf(gamma);
        let group = CharGroup::new(c)?;
        let inner = match mode {
            AverageMode::Trivial => mellin_hat(c, &group.trivial())?.norm(),
            AverageMode::SemiPrimitive => {
                let semi: Vec<_> = group.characters().filter(|x| x.is_semi_primitive()).collect();
                if semi.is_empty() {
                    continue;
                }
                let table = f_table_for(&group, c)?;
                semi.iter()
                    .map(|chi| mellin_from_table(&group, chi, &table).norm())
                    .sum()
            }
        };
        total += weight * inner;
    }
    Ok(total)
}
