use super::{gcd, GaussianInt};
use crate::error::{Error, Result};

/// A fixed fundamental domain for `Z[i]/(c)`.
///
/// The ideal `(c)` has the Hermite basis `{span, shift + g*i}` where
/// `g = gcd(re c, im c)` and `span = N(c)/g`. Every class has exactly one
/// representative `x + y*i` with `0 <= x < span` and `0 <= y < g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueSystem {
    modulus: GaussianInt,
    span: i64,
    g: i64,
    shift: i64,
}

impl ResidueSystem {
    pub fn new(c: GaussianInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Zero {
                op: "residue system",
            });
        }
        let norm = c.checked_norm().ok_or(Error::Overflow {
            op: "residue system",
        })?;
        let (a, b) = (c.re, c.im);
        let g = gcd_i64(a, b);
        let span = norm / g;
        // u*b + v*a = g picks out u*c + v*(i c), whose imaginary part is g.
        let (u, v) = bezout_i64(b, a);
        let shift = ((u as i128 * a as i128 - v as i128 * b as i128).rem_euclid(span as i128)) as i64;
        Ok(Self {
            modulus: c,
            span,
            g,
            shift,
        })
    }

    pub fn modulus(&self) -> GaussianInt {
        self.modulus
    }

    /// Number of residue classes, `N(c)`.
    pub fn len(&self) -> i64 {
        self.span * self.g
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn reduce(&self, z: GaussianInt) -> GaussianInt {
        self.reduce_wide(z.re as i128, z.im as i128)
    }

    pub(crate) fn reduce_wide(&self, x: i128, y: i128) -> GaussianInt {
        let g = self.g as i128;
        let q = y.div_euclid(g);
        let y = y - q * g;
        let x = (x - q * self.shift as i128).rem_euclid(self.span as i128);
        GaussianInt::new(x as i64, y as i64)
    }

    /// Reduced product, computed without intermediate overflow for reduced
    /// operands.
    pub fn mul(&self, a: GaussianInt, b: GaussianInt) -> GaussianInt {
        let (ar, ai) = (a.re as i128, a.im as i128);
        let (br, bi) = (b.re as i128, b.im as i128);
        self.reduce_wide(ar * br - ai * bi, ar * bi + ai * br)
    }

    pub fn is_zero_mod(&self, z: GaussianInt) -> bool {
        self.reduce(z).is_zero()
    }

    /// All representatives in the fixed order `y` outer, `x` inner.
    pub fn iter(&self) -> impl Iterator<Item = GaussianInt> + '_ {
        (0..self.g).flat_map(move |y| (0..self.span).map(move |x| GaussianInt::new(x, y)))
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// `(u, v)` with `u*a + v*b = gcd(|a|, |b|)`.
fn bezout_i64(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-s0 as i64, -t0 as i64)
    } else {
        (s0 as i64, t0 as i64)
    }
}

/// Representatives of `(Z[i]/(c))^x` in the fixed fundamental domain, in
/// the order of [`ResidueSystem::iter`]. For a unit `c` the ring is zero and
/// the group is taken to be trivial: the result is `[0]`.
pub fn unit_residues(c: GaussianInt) -> Result<Vec<GaussianInt>> {
    let rs = ResidueSystem::new(c)?;
    if c.is_unit() {
        return Ok(vec![GaussianInt::ZERO]);
    }
    let mut units = Vec::new();
    for alpha in rs.iter() {
        if !alpha.is_zero() && gcd(alpha, c)? == GaussianInt::ONE {
            units.push(alpha);
        }
    }
    Ok(units)
}
