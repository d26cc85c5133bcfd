//! The geometric side of the Kuznetsov formula over `Z[i]`:
//! `H_0 / 8 pi^3 [m = +-n] + 1/32 pi^3 sum_c S(m, n; c) / N(c) H(2 pi sqrt(mn) / c)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::archimedean::{
    h_geometric2_value, plancherel_closed_form, small_z_constant, QuadratureConfig, TestFunction,
};
use crate::error::{Error, Result};
use crate::expsum::ContextCache;
use crate::gauss::{elements_in_norm_range, gcd, GaussianInt};

/// Assumed constant in `|S(m, n; c)| <= W tau(c) N((m, n, c))^{1/2} N(c)^{1/2}`.
pub const WEIL_CONSTANT: f64 = 2.0;

/// `B` in `sum_{N(c) <= x} tau(c) <= (pi^2 / 4) x (log x + B)` for `x >= 1`,
/// where `c` runs over nonzero elements. Measured `B` peaks at 1.74 (x = 2)
/// and tends to 0.65.
const DIVISOR_SUM_SLACK: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KuznetsovGeometric {
    pub diagonal: f64,
    pub kloosterman_term: Complex64,
    /// Bound on the `c`-terms beyond the cutoff.
    pub tail_bound: f64,
}

/// Geometric side with the `c`-sum over all nonzero elements of norm at most
/// `c_norm_max`.
pub fn kuznetsov_geometric(
    m: GaussianInt,
    n: GaussianInt,
    tf: &TestFunction,
    c_norm_max: i64,
    cfg: &QuadratureConfig,
) -> Result<KuznetsovGeometric> {
    if m.is_zero() || n.is_zero() {
        return Err(Error::Zero {
            op: "kuznetsov_geometric",
        });
    }
    let diagonal = if m == n || m == -n {
        plancherel_closed_form(tf, cfg) / (8.0 * PI.powi(3))
    } else {
        0.0
    };
    let mn = m
        .checked_mul(n)
        .ok_or(Error::Overflow { op: "kuznetsov_geometric" })?;
    let root = mn.to_complex().sqrt();
    let mut cache = ContextCache::new();
    let mut sum = Complex64::new(0.0, 0.0);
    // S(m, n; -c) = S(m, n; c) and H is even, so pair c with -c.
    for c in elements_in_norm_range(0.0, c_norm_max as f64) {
        if c.re < 0 || (c.re == 0 && c.im < 0) {
            continue;
        }
        let s = cache.kloosterman(m, n, c)?;
        let z = 2.0 * PI * root / c.to_complex();
        let h = h_geometric2_value(z, tf, cfg);
        sum += 2.0 * s * h / c.norm() as f64;
    }
    let kloosterman_term = sum / (32.0 * PI.powi(3));
    Ok(KuznetsovGeometric {
        diagonal,
        kloosterman_term,
        tail_bound: tail_bound(m, n, tf, c_norm_max, cfg)?,
    })
}

/// `|H(z)| <= K |z|^2` and the Weil bound turn the tail into
/// `W K |mn| N((m, n))^{1/2} / 8 pi * sum_{N(c) > X} tau(c) N(c)^{-3/2}`,
/// and partial summation gives `3 (pi^2/4) X^{-1/2} (log X + B + 2)` for
/// the last sum.
fn tail_bound(
    m: GaussianInt,
    n: GaussianInt,
    tf: &TestFunction,
    c_norm_max: i64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let k = small_z_constant(tf, cfg).value;
    let common = gcd(m, n)?.norm() as f64;
    let x = (c_norm_max as f64).max(1.0);
    let divisor_tail = 3.0 * (PI * PI / 4.0) * x.powf(-0.5) * (x.ln() + DIVISOR_SUM_SLACK + 2.0);
    let mn = (m.norm() as f64 * n.norm() as f64).sqrt();
    Ok(WEIL_CONSTANT * k * mn * common.sqrt() / (8.0 * PI) * divisor_tail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::multiplicative_functions;
    use crate::gauss::GIdeal;

    fn g(re: i64, im: i64) -> GaussianInt {
        GaussianInt::new(re, im)
    }

    #[test]
    fn diagonal_only() {
        let tf = TestFunction::new(1.0, 1.0);
        let cfg = QuadratureConfig::default();
        let k = kuznetsov_geometric(g(1, 0), g(-1, 0), &tf, 0, &cfg).unwrap();
        let want = plancherel_closed_form(&tf, &cfg) / (8.0 * PI.powi(3));
        assert_eq!(k.diagonal, want);
        assert_eq!(k.kloosterman_term, Complex64::new(0.0, 0.0));
        let k = kuznetsov_geometric(g(1, 0), g(0, 1), &tf, 0, &cfg).unwrap();
        assert_eq!(k.diagonal, 0.0);
        assert!(kuznetsov_geometric(g(0, 0), g(1, 0), &tf, 5, &cfg).is_err());
    }

    #[test]
    fn symmetric_in_m_and_n() {
        let tf = TestFunction::new(1.0, 1.0);
        let cfg = QuadratureConfig::default();
        let a = kuznetsov_geometric(g(1, 1), g(2, -1), &tf, 30, &cfg).unwrap();
        let b = kuznetsov_geometric(g(2, -1), g(1, 1), &tf, 30, &cfg).unwrap();
        assert!((a.kloosterman_term - b.kloosterman_term).norm() < 1e-9);
        assert_eq!(a.tail_bound, b.tail_bound);
    }

    #[test]
    fn divisor_sum_bound_holds() {
        let mut total = 0.0;
        let elements = elements_in_norm_range(0.0, 3000.0);
        let mut idx = 0;
        for x in 1..=3000i64 {
            while idx < elements.len() && elements[idx].norm() <= x {
                total += multiplicative_functions(GIdeal::new(elements[idx]).unwrap()).tau as f64;
                idx += 1;
            }
            let bound = PI * PI / 4.0 * x as f64 * ((x as f64).ln() + DIVISOR_SUM_SLACK);
            assert!(total <= bound, "x = {x}: {total} > {bound}");
        }
    }
}
