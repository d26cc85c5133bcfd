use crate::gauss::{GIdeal, GaussianInt};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{op}: zero Gaussian integer where a nonzero one is required")]
    Zero { op: &'static str },

    #[error("{a} is not invertible modulo {c}")]
    NotInvertible { a: GaussianInt, c: GaussianInt },

    #[error("{op}: {a} and {b} are not coprime")]
    NotCoprime {
        op: &'static str,
        a: GaussianInt,
        b: GaussianInt,
    },

    #[error("{op}: {divisor} does not divide {value}")]
    NotDivisible {
        op: &'static str,
        divisor: GaussianInt,
        value: GaussianInt,
    },

    #[error("integer overflow in {op}")]
    Overflow { op: &'static str },

    #[error("{op} has a pole at {at}")]
    Pole { op: &'static str, at: String },

    #[error("{op}: |z| = {abs} is outside the power-series range |z| <= {max}")]
    OutOfRange {
        op: &'static str,
        abs: f64,
        max: f64,
    },

    #[error("modulus {0} is not a prime power")]
    NotPrimePower(GIdeal),

    #[error("(t, p) = ({t}, {p}) lies in the excluded band around the zeta pole")]
    ExcludedPoint { t: f64, p: i64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
