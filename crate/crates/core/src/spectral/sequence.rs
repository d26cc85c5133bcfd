use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::GIdeal;

/// The norm range a sequence is declared on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormWindow {
    /// `N < N(n) <= 2N`.
    Dyadic(f64),
    /// `1 <= N(n) <= N`.
    Initial(f64),
}

impl NormWindow {
    pub fn contains(&self, norm: i64) -> bool {
        let n = norm as f64;
        match *self {
            NormWindow::Dyadic(x) => x < n && n <= 2.0 * x,
            NormWindow::Initial(x) => n <= x,
        }
    }

    /// Largest norm the window admits.
    pub fn upper(&self) -> f64 {
        match *self {
            NormWindow::Dyadic(x) => 2.0 * x,
            NormWindow::Initial(x) => x,
        }
    }
}

/// Finitely supported coefficients on ideals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    window: NormWindow,
    entries: BTreeMap<GIdeal, Complex64>,
}

impl CoefficientSequence {
    pub fn new(window: NormWindow) -> Self {
        Self {
            window,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_entries(
        window: NormWindow,
        entries: impl IntoIterator<Item = (GIdeal, Complex64)>,
    ) -> Result<Self> {
        let mut seq = Self::new(window);
        for (n, a) in entries {
            seq.insert(n, a)?;
        }
        Ok(seq)
    }

    /// Sets `a_n`, replacing any previous value.
    pub fn insert(&mut self, n: GIdeal, value: Complex64) -> Result<()> {
        if !self.window.contains(n.norm()) {
            return Err(Error::Invalid(format!(
                "ideal of norm {} lies outside the window {:?}",
                n.norm(),
                self.window
            )));
        }
        self.entries.insert(n, value);
        Ok(())
    }

    pub fn window(&self) -> NormWindow {
        self.window
    }

    pub fn get(&self, n: GIdeal) -> Complex64 {
        self.entries.get(&n).copied().unwrap_or_default()
    }

    /// Entries in ideal order.
    pub fn iter(&self) -> impl Iterator<Item = (GIdeal, Complex64)> + '_ {
        self.entries.iter().map(|(&n, &a)| (n, a))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sqr().sqrt()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            window: self.window,
            entries: self.entries.iter().map(|(&n, &a)| (n, a * factor)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianInt;

    fn ideal(re: i64, im: i64) -> GIdeal {
        GIdeal::new(GaussianInt::new(re, im)).unwrap()
    }

    #[test]
    fn window_is_enforced() {
        let mut a = CoefficientSequence::new(NormWindow::Dyadic(4.0));
        assert!(a.insert(ideal(2, 1), Complex64::new(1.0, 0.0)).is_ok());
        assert!(a.insert(ideal(2, 0), Complex64::new(1.0, 0.0)).is_err());
        assert!(a.insert(ideal(2, 2), Complex64::new(1.0, 0.0)).is_ok());
        assert!(a.insert(ideal(3, 0), Complex64::new(1.0, 0.0)).is_err());
        let b = CoefficientSequence::new(NormWindow::Initial(1.0));
        assert!(b.clone().insert(GIdeal::unit(), Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn norms() {
        let a = CoefficientSequence::from_entries(
            NormWindow::Initial(10.0),
            [
                (ideal(1, 0), Complex64::new(3.0, 0.0)),
                (ideal(1, 2), Complex64::new(0.0, 4.0)),
            ],
        )
        .unwrap();
        assert_eq!(a.l2_norm(), 5.0);
        assert_eq!(a.scaled(Complex64::new(0.0, 2.0)).l2_norm(), 10.0);
        // Associates land on the same key.
        assert_eq!(a.get(ideal(-2, 1)), Complex64::new(0.0, 4.0));
    }
}
