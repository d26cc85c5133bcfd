use num_complex::Complex64;

use crate::archimedean::complex_gamma;
use crate::error::Result;

/// `Gamma(s) Gamma(s + it + |p|) Gamma(s - it + |p|)`.
pub fn gamma_factor(s: Complex64, t: f64, p: i64) -> Result<Complex64> {
    let shift = Complex64::new(p.unsigned_abs() as f64, t);
    Ok(complex_gamma(s)? * complex_gamma(s + shift)? * complex_gamma(s + shift.conj())?)
}

/// `|s| |s + it + |p|| |s - it + |p||`.
pub fn analytic_conductor(s: Complex64, t: f64, p: i64) -> f64 {
    let shift = Complex64::new(p.unsigned_abs() as f64, t);
    s.norm() * (s + shift).norm() * (s + shift.conj()).norm()
}
