use serde::{Deserialize, Serialize};

use super::{gcd, GIdeal, GaussianInt};
use crate::error::{Error, Result};

/// `unit * prod(gen^e)` with primes in `(norm, re, im)` order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: GaussianInt,
    pub factors: Vec<(GIdeal, u32)>,
}

impl Factorization {
    pub fn recombine(&self) -> GaussianInt {
        self.factors
            .iter()
            .fold(self.unit, |acc, &(p, e)| acc * p.gen().pow(e))
    }

    pub fn ideal(&self) -> GIdeal {
        self.factors
            .iter()
            .fold(GIdeal::unit(), |acc, &(p, e)| {
                acc.mul(GIdeal::new(p.gen().pow(e)).expect("nonzero"))
            })
    }
}

fn rational_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q * q <= n {
        if n % q == 0 {
            let mut e = 0;
            while n % q == 0 {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u128;
    let m128 = m as u128;
    let mut base = b as u128 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// `x` with `x^2 = -1 (mod q)` for a prime `q = 1 (mod 4)`.
fn sqrt_minus_one(q: u64) -> u64 {
    for a in 2..q {
        let x = pow_mod(a, (q - 1) / 4, q);
        if (x as u128 * x as u128) % q as u128 == (q - 1) as u128 {
            return x;
        }
    }
    unreachable!("{q} is not a prime congruent to 1 mod 4")
}

/// The Gaussian primes above the rational prime `q`, canonical and sorted.
fn primes_above(q: u64) -> Vec<GIdeal> {
    let qi = q as i64;
    match q % 4 {
        2 => vec![GIdeal::new(GaussianInt::new(1, 1)).unwrap()],
        3 => vec![GIdeal::new(GaussianInt::new(qi, 0)).unwrap()],
        _ => {
            let x = sqrt_minus_one(q) as i64;
            let p = gcd(GaussianInt::new(qi, 0), GaussianInt::new(x, 1)).unwrap();
            let mut ps = vec![
                GIdeal::new(p).unwrap(),
                GIdeal::new(p.conj()).unwrap(),
            ];
            ps.sort();
            ps
        }
    }
}

/// Factorization into Gaussian primes, by trial division of the norm.
pub fn factor(z: GaussianInt) -> Result<Factorization> {
    if z.is_zero() {
        return Err(Error::Zero { op: "factor" });
    }
    let norm = z.checked_norm().ok_or(Error::Overflow { op: "factor" })?;
    let mut rest = z;
    let mut factors = Vec::new();
    for (q, _) in rational_factor(norm as u64) {
        for p in primes_above(q) {
            let mut e = 0;
            while let Some(next) = rest.exact_div(p.gen()) {
                rest = next;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        }
    }
    debug_assert!(rest.is_unit());
    factors.sort();
    Ok(Factorization {
        unit: rest,
        factors,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArithmeticFunctions {
    pub tau: i64,
    pub phi: i64,
    pub mu: i64,
}

pub fn multiplicative_functions(n: GIdeal) -> ArithmeticFunctions {
    let f = factor(n.gen()).expect("ideal generators are nonzero");
    let mut out = ArithmeticFunctions {
        tau: 1,
        phi: 1,
        mu: 1,
    };
    for &(p, e) in &f.factors {
        let q = p.norm();
        out.tau *= e as i64 + 1;
        out.phi *= q.pow(e - 1) * (q - 1);
        out.mu = if e >= 2 { 0 } else { -out.mu };
    }
    out
}

/// `d = d1 * d2^2` with `d1` square-free.
pub fn squarefree_split(d: GIdeal) -> (GIdeal, GIdeal) {
    let f = factor(d.gen()).expect("ideal generators are nonzero");
    let mut d1 = GaussianInt::ONE;
    let mut d2 = GaussianInt::ONE;
    for &(p, e) in &f.factors {
        d1 = d1 * p.gen().pow(e % 2);
        d2 = d2 * p.gen().pow(e / 2);
    }
    (GIdeal::new(d1).unwrap(), GIdeal::new(d2).unwrap())
}

/// All ideal divisors of `n`, sorted.
pub fn divisors(n: GIdeal) -> Vec<GIdeal> {
    let f = factor(n.gen()).expect("ideal generators are nonzero");
    let mut out = vec![GaussianInt::ONE];
    for &(p, e) in &f.factors {
        let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
        for &d in &out {
            let mut power = d;
            next.push(power);
            for _ in 0..e {
                power = power * p.gen();
                next.push(power);
            }
        }
        out = next;
    }
    let mut ideals: Vec<_> = out.into_iter().map(|g| GIdeal::new(g).unwrap()).collect();
    ideals.sort();
    ideals
}

/// All ideals of norm at most `bound`, sorted by `(norm, re, im)`.
pub fn ideals_up_to_norm(bound: f64) -> Vec<GIdeal> {
    if !(bound >= 1.0) {
        return Vec::new();
    }
    let n = bound.floor() as i64;
    let r = (n as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for re in 1..=r {
        for im in 0..=r {
            let z = GaussianInt::new(re, im);
            if z.norm() <= n {
                out.push(GIdeal::new(z).unwrap());
            }
        }
    }
    out.sort();
    out
}

/// Every nonzero element (not up to units) with `lo < N(z) <= hi`, sorted
/// by `(norm, re, im)`.
pub fn elements_in_norm_range(lo: f64, hi: f64) -> Vec<GaussianInt> {
    if !(hi >= 1.0) {
        return Vec::new();
    }
    let r = hi.sqrt() as i64 + 1;
    let mut out = Vec::new();
    for re in -r..=r {
        for im in -r..=r {
            let z = GaussianInt::new(re, im);
            let n = z.norm() as f64;
            if !z.is_zero() && n > lo && n <= hi {
                out.push(z);
            }
        }
    }
    out.sort_by_key(|z| z.sort_key());
    out
}
