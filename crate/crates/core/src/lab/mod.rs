//! Desk-scale experiments comparing brute-forced sieve quantities with the
//! shape of their upper bounds.

mod hybrid;
mod quad_form;
mod report;
mod trials;

use serde::{Deserialize, Serialize};

pub use hybrid::{hybrid_lhs, hybrid_ratio, hybrid_rhs};
pub use quad_form::{
    quad_form, quad_form_bound_ratio, quad_form_rhs, quad_form_trivial_bound, QuadFormParams,
};
pub use report::{read_csv, to_json, write_csv, ExperimentReport, REPORT_SCHEMA};
pub use trials::{random_signs, run_trials, summarize, trial_rng};

use crate::error::{Error, Result};
use crate::gauss::GaussianInt;
use crate::spectral::{eisenstein_sieve_sum, CoefficientSequence, NormWindow};
use num_complex::Complex64;

/// Exponent standing in for every `(.)^eps` factor; implied constants are 1.
pub const EPSILON: f64 = 0.1;

pub const DEFAULT_TRIALS: u32 = 100;
pub const DEFAULT_SEED: u64 = 2024;

/// `TP(T^2 + P^2) + TPN + ((T^2 + P^2)/TP)(1/T^2 + 1/P^2) N^2`, times
/// `(TPN)^eps sum |a_n|^2`.
pub fn eisenstein_rhs(t: f64, p: f64, a: &CoefficientSequence) -> f64 {
    let n = a.window().upper();
    let s = t * t + p * p;
    let shape = t * p * s + t * p * n + s / (t * p) * (1.0 / (t * t) + 1.0 / (p * p)) * n * n;
    shape * (t * p * n).powf(EPSILON) * a.l2_norm_sqr()
}

pub fn eisenstein_ratio(t: f64, p: f64, a: &CoefficientSequence) -> Result<ExperimentReport> {
    if !matches!(a.window(), NormWindow::Initial(_)) {
        return Err(Error::Invalid(
            "eisenstein_ratio expects a sequence on norms <= N".into(),
        ));
    }
    let lhs = eisenstein_sieve_sum(a, t, p)?;
    let mut r = ExperimentReport::new("eisenstein").with_sides(lhs, eisenstein_rhs(t, p, a));
    r.t = Some(t);
    r.p = Some(p);
    r.n = Some(a.window().upper());
    Ok(r)
}

/// A randomized experiment: parameters plus a trial count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "lowercase", deny_unknown_fields)]
pub enum Experiment {
    /// `+-1` sequences on `(M, 2M]` and `(N, 2N]`.
    Quadform {
        d: GaussianInt,
        theta: Complex64,
        gamma: f64,
        c: f64,
        m: f64,
        n: f64,
    },
    /// `+-1` sequences on `[1, N]`.
    Hybrid { c: f64, t: f64, n: f64 },
    /// `+-1` sequences on `[1, N]`.
    Eisenstein { t: f64, p: f64, n: f64 },
}

impl Experiment {
    /// The preset trial sets.
    pub fn presets() -> Vec<Experiment> {
        vec![
            Experiment::Quadform {
                d: GaussianInt::ONE,
                theta: Complex64::new(1.0, 0.0),
                gamma: 0.0,
                c: 4.0,
                m: 4.0,
                n: 4.0,
            },
            Experiment::Quadform {
                d: GaussianInt::new(1, 1),
                theta: Complex64::new(0.5, 0.25),
                gamma: 0.5,
                c: 8.0,
                m: 5.0,
                n: 5.0,
            },
            Experiment::Hybrid {
                c: 4.0,
                t: 2.0,
                n: 20.0,
            },
            Experiment::Eisenstein {
                t: 2.0,
                p: 1.0,
                n: 30.0,
            },
            Experiment::Eisenstein {
                t: 4.0,
                p: 2.0,
                n: 30.0,
            },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Quadform { .. } => "quadform",
            Experiment::Hybrid { .. } => "hybrid",
            Experiment::Eisenstein { .. } => "eisenstein",
        }
    }

    /// One trial with sequences drawn from `rng`, scaled by `scale`.
    pub fn trial(&self, rng: &mut rand_chacha::ChaCha8Rng, scale: f64) -> Result<ExperimentReport> {
        let s = Complex64::new(scale, 0.0);
        match *self {
            Experiment::Quadform {
                d,
                theta,
                gamma,
                c,
                m,
                n,
            } => {
                let a = random_signs(NormWindow::Dyadic(m), rng).scaled(s);
                let b = random_signs(NormWindow::Dyadic(n), rng);
                let params = QuadFormParams {
                    d,
                    theta,
                    gamma,
                    c,
                    m,
                    n,
                };
                quad_form_bound_ratio(&params, &a, &b)
            }
            Experiment::Hybrid { c, t, n } => {
                hybrid_ratio(c, t, &random_signs(NormWindow::Initial(n), rng).scaled(s))
            }
            Experiment::Eisenstein { t, p, n } => {
                eisenstein_ratio(t, p, &random_signs(NormWindow::Initial(n), rng).scaled(s))
            }
        }
    }

    /// Every trial of the set, in order.
    pub fn run(&self, trials: u32, seed: u64) -> Result<Vec<ExperimentReport>> {
        self.run_scaled(trials, seed, 1.0)
    }

    pub fn run_scaled(&self, trials: u32, seed: u64, scale: f64) -> Result<Vec<ExperimentReport>> {
        run_trials(trials, seed, |rng| self.trial(rng, scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GIdeal;

    #[test]
    fn eisenstein_ratio_examples() {
        let zero = CoefficientSequence::new(NormWindow::Initial(30.0));
        assert_eq!(eisenstein_ratio(2.0, 2.0, &zero).unwrap().ratio, 0.0);
        let one = CoefficientSequence::from_entries(
            NormWindow::Initial(30.0),
            [(GIdeal::unit(), Complex64::new(1.0, 0.0))],
        )
        .unwrap();
        let r = eisenstein_ratio(2.0, 2.0, &one).unwrap();
        assert!(r.ratio.is_finite() && r.ratio > 0.0);
    }

    #[test]
    fn trials_are_reproducible_and_ordered() {
        let e = Experiment::Hybrid {
            c: 2.0,
            t: 1.0,
            n: 10.0,
        };
        let a = e.run(6, 42).unwrap();
        let b = e.run(6, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|r| r.trial.unwrap()).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
        // A longer run extends the shorter one.
        assert_eq!(&e.run(10, 42).unwrap()[..6], &a[..]);
        let s = summarize(&a).unwrap();
        assert_eq!(s.trials, 6);
        assert!(a.iter().all(|r| r.ratio <= s.ratio));
    }

    #[test]
    fn experiment_config_round_trip() {
        for e in Experiment::presets() {
            let text = serde_json::to_string(&e).unwrap();
            assert_eq!(serde_json::from_str::<Experiment>(&text).unwrap(), e);
        }
        assert!(serde_json::from_str::<Experiment>(r#"{"experiment":"hybrid","c":1,"t":1,"n":1,"x":2}"#).is_err());
    }
}
