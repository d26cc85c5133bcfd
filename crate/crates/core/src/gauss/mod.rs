//! Exact arithmetic in the Gaussian integers `Z[i]`.
//!
//! Elements are stored with `i64` coordinates. Every product goes through
//! `i128` and is narrowed with a check, so an overflow surfaces as a panic
//! (operators) or as `None` / [`Error::Overflow`] (the `checked_*` family),
//! never as a wrapped value.

mod factor;
mod residue;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use factor::{
    divisors, elements_in_norm_range, factor, ideals_up_to_norm, multiplicative_functions,
    squarefree_split, ArithmeticFunctions, Factorization,
};
pub use residue::{unit_residues, ResidueSystem};

/// An element `re + im*i` of `Z[i]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

/// The four units `1, i, -1, -i`, in that order.
pub const UNITS: [GaussianInt; 4] = [
    GaussianInt { re: 1, im: 0 },
    GaussianInt { re: 0, im: 1 },
    GaussianInt { re: -1, im: 0 },
    GaussianInt { re: 0, im: -1 },
];

fn narrow(x: i128) -> Option<i64> {
    i64::try_from(x).ok()
}

impl GaussianInt {
    pub const ZERO: Self = Self { re: 0, im: 0 };
    pub const ONE: Self = Self { re: 1, im: 0 };
    pub const I: Self = Self { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        UNITS.contains(&self)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    /// Multiplication by `i`.
    pub fn rotate(self) -> Self {
        Self::new(-self.im, self.re)
    }

    pub fn checked_norm(self) -> Option<i64> {
        let (a, b) = (self.re as i128, self.im as i128);
        narrow(a * a + b * b)
    }

    /// `re^2 + im^2`. Panics if the norm does not fit in `i64`.
    pub fn norm(self) -> i64 {
        self.checked_norm()
            .unwrap_or_else(|| panic!("integer overflow in norm of {self}"))
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        Some(Self::new(
            self.re.checked_add(rhs.re)?,
            self.im.checked_add(rhs.im)?,
        ))
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        Some(Self::new(
            self.re.checked_sub(rhs.re)?,
            self.im.checked_sub(rhs.im)?,
        ))
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (rhs.re as i128, rhs.im as i128);
        Some(Self::new(narrow(a * c - b * d)?, narrow(a * d + b * c)?))
    }

    pub fn checked_pow(self, mut exp: u32) -> Option<Self> {
        let mut base = self;
        let mut acc = Self::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.checked_mul(base)?;
            }
        }
        Some(acc)
    }

    pub fn pow(self, exp: u32) -> Self {
        self.checked_pow(exp)
            .unwrap_or_else(|| panic!("integer overflow in {self}^{exp}"))
    }

    /// Euclidean division: `self = q*rhs + r` with `N(r) <= N(rhs)/2`.
    ///
    /// The quotient is `self/rhs` rounded coordinatewise to the nearest
    /// integer (ties toward +inf).
    pub fn div_rem(self, rhs: Self) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(Error::Zero { op: "div_rem" });
        }
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (rhs.re as i128, rhs.im as i128);
        let n = c * c + d * d;
        let x = a * c + b * d;
        let y = b * c - a * d;
        let round = |v: i128| (2 * v + n).div_euclid(2 * n);
        let q = Self::new(
            narrow(round(x)).ok_or(Error::Overflow { op: "div_rem" })?,
            narrow(round(y)).ok_or(Error::Overflow { op: "div_rem" })?,
        );
        let r = q
            .checked_mul(rhs)
            .and_then(|qb| self.checked_sub(qb))
            .ok_or(Error::Overflow { op: "div_rem" })?;
        Ok((q, r))
    }

    /// Exact quotient, or `None` when `rhs` does not divide `self`.
    pub fn exact_div(self, rhs: Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let (a, b) = (self.re as i128, self.im as i128);
        let (c, d) = (rhs.re as i128, rhs.im as i128);
        let n = c * c + d * d;
        let x = a * c + b * d;
        let y = b * c - a * d;
        if x % n != 0 || y % n != 0 {
            return None;
        }
        Some(Self::new(narrow(x / n)?, narrow(y / n)?))
    }

    pub fn divides(self, value: Self) -> bool {
        if self.is_zero() {
            return value.is_zero();
        }
        value.exact_div(self).is_some()
    }

    /// `z/|z|` as a complex number.
    pub fn direction(self) -> num_complex::Complex64 {
        let z = num_complex::Complex64::new(self.re as f64, self.im as f64);
        z / z.norm()
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re as f64, self.im as f64)
    }

    /// Sort key used for deterministic orderings: `(norm, re, im)`.
    pub fn sort_key(self) -> (i64, i64, i64) {
        (self.norm(), self.re, self.im)
    }
}

/// The unique associate of `z` with `re > 0` and `im >= 0`.
pub fn canonical_associate(z: GaussianInt) -> Result<GaussianInt> {
    if z.is_zero() {
        return Err(Error::Zero {
            op: "canonical_associate",
        });
    }
    let mut w = z;
    while !(w.re > 0 && w.im >= 0) {
        w = w.rotate();
    }
    Ok(w)
}

/// Canonical greatest common divisor. `gcd(z, 0)` is the canonical
/// associate of `z`.
pub fn gcd(a: GaussianInt, b: GaussianInt) -> Result<GaussianInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Zero { op: "gcd" });
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let (_, r) = x.div_rem(y)?;
        x = y;
        y = r;
    }
    canonical_associate(x)
}

/// Extended Euclid: returns `(g, s, t)` with `s*a + t*b = g`, where `g` is
/// *some* associate of the gcd (not necessarily canonical).
pub fn extended_gcd(
    a: GaussianInt,
    b: GaussianInt,
) -> Result<(GaussianInt, GaussianInt, GaussianInt)> {
    let overflow = Error::Overflow { op: "extended_gcd" };
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (GaussianInt::ONE, GaussianInt::ZERO);
    let (mut t0, mut t1) = (GaussianInt::ZERO, GaussianInt::ONE);
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(r1)?;
        let s = q
            .checked_mul(s1)
            .and_then(|v| s0.checked_sub(v))
            .ok_or_else(|| overflow.clone())?;
        let t = q
            .checked_mul(t1)
            .and_then(|v| t0.checked_sub(v))
            .ok_or_else(|| overflow.clone())?;
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    Ok((r0, s0, t0))
}

/// Inverse of `a` modulo `c`, reduced to the fundamental domain of
/// [`ResidueSystem`].
pub fn mod_inverse(a: GaussianInt, c: GaussianInt) -> Result<GaussianInt> {
    if c.is_zero() {
        return Err(Error::Zero { op: "mod_inverse" });
    }
    let residues = ResidueSystem::new(c)?;
    if c.is_unit() {
        return Ok(GaussianInt::ZERO);
    }
    let a = residues.reduce(a);
    if a.is_zero() {
        return Err(Error::NotInvertible { a, c });
    }
    let (g, s, _) = extended_gcd(a, c)?;
    let Some(k) = UNITS.iter().position(|&u| u == g) else {
        return Err(Error::NotInvertible { a, c });
    };
    // s*a = g (mod c) and g^{-1} = conj(g) for units.
    let inv = s
        .checked_mul(UNITS[k].conj())
        .ok_or(Error::Overflow { op: "mod_inverse" })?;
    Ok(residues.reduce(inv))
}

impl Add for GaussianInt {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs)
            .unwrap_or_else(|| panic!("integer overflow in {self} + {rhs}"))
    }
}

impl Sub for GaussianInt {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("integer overflow in {self} - {rhs}"))
    }
}

impl Mul for GaussianInt {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs)
            .unwrap_or_else(|| panic!("integer overflow in ({self})*({rhs})"))
    }
}

impl Neg for GaussianInt {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl From<i64> for GaussianInt {
    fn from(re: i64) -> Self {
        Self::new(re, 0)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, b) => write!(f, "{b}i"),
            (a, 1) => write!(f, "{a}+i"),
            (a, -1) => write!(f, "{a}-i"),
            (a, b) if b > 0 => write!(f, "{a}+{b}i"),
            (a, b) => write!(f, "{a}{b}i"),
        }
    }
}

impl fmt::Debug for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GaussianInt {
    type Err = Error;

    /// Accepts `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, `a+i`, `a-i`
    /// (no spaces).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("not a Gaussian integer literal: {s:?}"));
        let s = s.trim();
        if s.is_empty() || s.contains(char::is_whitespace) {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return s.parse::<i64>().map(GaussianInt::from).map_err(|_| bad());
        };
        // Split at the last sign that is not the leading character.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, ch)| ch == '+' || ch == '-')
            .map(|(k, _)| k)
            .last();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let re = re_part.parse::<i64>().map_err(|_| bad())?;
        let im = match im_part {
            "" | "+" => 1,
            "-" => -1,
            digits => digits.parse::<i64>().map_err(|_| bad())?,
        };
        Ok(GaussianInt::new(re, im))
    }
}

/// A nonzero ideal of `Z[i]`, stored by its canonical generator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GIdeal {
    gen: GaussianInt,
}

impl GIdeal {
    pub fn new(z: GaussianInt) -> Result<Self> {
        Ok(Self {
            gen: canonical_associate(z)?,
        })
    }

    pub fn unit() -> Self {
        Self {
            gen: GaussianInt::ONE,
        }
    }

    pub fn gen(self) -> GaussianInt {
        self.gen
    }

    pub fn norm(self) -> i64 {
        self.gen.norm()
    }

    pub fn is_unit(self) -> bool {
        self.gen == GaussianInt::ONE
    }

    pub fn mul(self, other: Self) -> Self {
        Self::new(self.gen * other.gen).expect("product of nonzero ideals")
    }

    pub fn divides(self, other: Self) -> bool {
        self.gen.divides(other.gen)
    }

    /// `self / other`, when `other` divides `self`.
    pub fn quotient(self, other: Self) -> Option<Self> {
        self.gen
            .exact_div(other.gen)
            .map(|q| Self::new(q).expect("nonzero quotient"))
    }

    pub fn is_coprime_to(self, other: Self) -> bool {
        gcd(self.gen, other.gen).map(|g| g == GaussianInt::ONE) == Ok(true)
    }
}

impl Ord for GIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gen.sort_key().cmp(&other.gen.sort_key())
    }
}

impl PartialOrd for GIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gen)
    }
}

impl fmt::Debug for GIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gen)
    }
}

impl FromStr for GIdeal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s);
        GIdeal::new(inner.parse()?)
    }
}
