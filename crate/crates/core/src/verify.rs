//! Identity suites shared by the command line and the acceptance run.
//! Each suite reports its worst residual and echoes failing inputs.

use std::f64::consts::FRAC_PI_4;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::archimedean::{
    h_geometric0, h_geometric2, h_spectral, plancherel_h, QuadratureConfig, TestFunction,
};
use crate::characters::{char_group, lemma_predicted_modulus, twisted_mult_residual, LemmaPrediction};
use crate::error::{Error, Result};
use crate::expsum::{
    f_sum, selberg_residual_cached, shift_vanishing_residual_cached, weil_scale, ContextCache,
};
use crate::gauss::{elements_in_norm_range, factor, ideals_up_to_norm, GaussianInt};

/// How many failing cases a report keeps.
const ECHO_LIMIT: usize = 10;

/// Upper limit for `|S(m, n; c)| / (tau(c) N((m,n,c))^{1/2} N(c)^{1/2})`.
pub const WEIL_RATIO_LIMIT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Mellin inversion and Parseval for `F(.; c)`.
    Charsum,
    /// Closed forms for `|F-hat(chi)|` on prime-power moduli.
    Lemma,
    /// `F-hat(chi1 chi2)` against the product formula on coprime moduli.
    Twisted,
    Selberg,
    Shift,
    Weil,
    /// Spectral form of `H(z)` against both geometric forms.
    Bessel,
    Plancherel,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Charsum,
        Suite::Lemma,
        Suite::Twisted,
        Suite::Selberg,
        Suite::Shift,
        Suite::Weil,
        Suite::Bessel,
        Suite::Plancherel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Charsum => "charsum",
            Suite::Lemma => "lemma",
            Suite::Twisted => "twisted",
            Suite::Selberg => "selberg",
            Suite::Shift => "shift",
            Suite::Weil => "weil",
            Suite::Bessel => "bessel",
            Suite::Plancherel => "plancherel",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::Bessel => 1e-6,
            Suite::Plancherel => 1e-8,
            Suite::Weil => WEIL_RATIO_LIMIT,
            _ => 1e-9,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite '{s}'")))
    }
}

/// Points for the `H(z)` comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BesselGrid {
    /// `|z| in {1/2, 1}`, `arg z in {0, pi/4}`, `T = P = 1`.
    #[default]
    Quick,
    /// `|z| in {1/2, 1, 2, 4}`, `arg z in {0, pi/4, pi/2}`, `T, P in {1, 2, 4}`.
    Full,
}

impl BesselGrid {
    pub fn points(self) -> Vec<(Complex64, TestFunction)> {
        let (radii, args, widths): (&[f64], &[f64], &[f64]) = match self {
            BesselGrid::Quick => (&[0.5, 1.0], &[0.0, FRAC_PI_4], &[1.0]),
            BesselGrid::Full => (
                &[0.5, 1.0, 2.0, 4.0],
                &[0.0, FRAC_PI_4, 2.0 * FRAC_PI_4],
                &[1.0, 2.0, 4.0],
            ),
        };
        let mut out = Vec::new();
        for &t in widths {
            for &p in widths {
                for &r in radii {
                    for &a in args {
                        out.push((Complex64::from_polar(r, a), TestFunction::new(t, p)));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Largest modulus norm in the exhaustive suites.
    pub max_norm: i64,
    /// Replaces every suite's default tolerance except the Weil limit.
    pub tolerance: Option<f64>,
    pub seed: u64,
    pub twisted_pairs: usize,
    pub bessel_grid: BesselGrid,
    pub quadrature: QuadratureConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_norm: 50,
            tolerance: None,
            seed: 0x5eed,
            twisted_pairs: 200,
            bessel_grid: BesselGrid::Quick,
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl VerifyOptions {
    fn tolerance(&self, suite: Suite) -> f64 {
        match (suite, self.tolerance) {
            (Suite::Weil, _) | (_, None) => suite.default_tolerance(),
            (_, Some(t)) => t,
        }
    }

    /// Product-norm cap for the twisted pairs: `10^4` at `max_norm = 200`.
    pub fn twisted_norm_cap(&self) -> i64 {
        50 * self.max_norm
    }

    /// `N(wcg)` cap for the shift-vanishing scan: 500 at `max_norm = 200`.
    pub fn shift_norm_cap(&self) -> i64 {
        self.max_norm * 5 / 2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
    /// The first few failing cases, with their inputs.
    pub failing: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Accumulates residuals against one tolerance.
struct Tally {
    suite: Suite,
    tolerance: f64,
    cases: usize,
    failures: usize,
    worst: f64,
    failing: Vec<String>,
}

impl Tally {
    fn new(suite: Suite, tolerance: f64) -> Self {
        Self {
            suite,
            tolerance,
            cases: 0,
            failures: 0,
            worst: 0.0,
            failing: Vec::new(),
        }
    }

    fn record(&mut self, residual: f64, describe: impl FnOnce() -> String) {
        self.cases += 1;
        self.worst = self.worst.max(residual);
        if !(residual <= self.tolerance) {
            self.failures += 1;
            if self.failing.len() < ECHO_LIMIT {
                self.failing.push(format!("{} (residual {residual:.3e})", describe()));
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures += other.failures;
        self.worst = self.worst.max(other.worst);
        for f in other.failing {
            if self.failing.len() < ECHO_LIMIT {
                self.failing.push(f);
            }
        }
        self
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
            tolerance: self.tolerance,
            failing: self.failing,
        }
    }
}

/// Per-item tallies merged in item order, so echoed failures are
/// deterministic.
fn tally_over<T, F>(items: &[T], suite: Suite, tol: f64, f: F) -> Result<Tally>
where
    T: Sync,
    F: Fn(&T, &mut Tally) -> Result<()> + Sync,
{
    let parts: Vec<Result<Tally>> = items
        .par_iter()
        .map(|item| {
            let mut t = Tally::new(suite, tol);
            f(item, &mut t)?;
            Ok(t)
        })
        .collect();
    let mut total = Tally::new(suite, tol);
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total)
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    if opts.max_norm < 2 {
        return Err(Error::Invalid(format!(
            "max_norm must be at least 2, got {}",
            opts.max_norm
        )));
    }
    let tol = opts.tolerance(suite);
    let tally = match suite {
        Suite::Charsum => charsum(opts, tol)?,
        Suite::Lemma => lemma(opts, tol)?,
        Suite::Twisted => twisted(opts, tol)?,
        Suite::Selberg => selberg(opts, tol)?,
        Suite::Shift => shift(opts, tol)?,
        Suite::Weil => weil(opts, tol)?,
        Suite::Bessel => bessel(opts, tol)?,
        Suite::Plancherel => plancherel(opts, tol),
    };
    Ok(tally.finish())
}

pub fn verify_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    Suite::ALL.iter().map(|&s| run_suite(s, opts)).collect()
}

fn charsum(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let moduli = elements_in_norm_range(0.0, opts.max_norm as f64);
    tally_over(&moduli, Suite::Charsum, tol, |&c, t| {
        let group = char_group(c)?;
        let hats = group.mellin_all(c)?;
        let chars: Vec<_> = group.characters().collect();
        let mut energy = 0.0;
        for &a in group.units() {
            let f = f_sum(a, c)?;
            energy += f.norm_sqr();
            let rebuilt: Complex64 = chars.iter().zip(&hats).map(|(x, h)| h * x.value(a)).sum();
            t.record((rebuilt - f).norm(), || format!("inversion c={c} alpha={a}"));
        }
        let parseval: f64 = hats.iter().map(|h| h.norm_sqr()).sum();
        let r = (parseval - energy / group.order() as f64).abs();
        t.record(r, || format!("parseval c={c}"));
        Ok(())
    })
}

fn lemma(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let moduli: Vec<_> = ideals_up_to_norm(opts.max_norm as f64)
        .into_iter()
        .filter(|c| factor(c.gen()).map(|f| f.factors.len() == 1).unwrap_or(false))
        .collect();
    tally_over(&moduli, Suite::Lemma, tol, |c, t| {
        let group = char_group(c.gen())?;
        let hats = group.mellin_all(c.gen())?;
        for (chi, hat) in group.characters().zip(hats) {
            let measured = hat.norm();
            let predicted = lemma_predicted_modulus(&chi)?;
            let residual = match predicted {
                LemmaPrediction::Exact(v) => (measured - v).abs(),
                LemmaPrediction::Bound(v) => (measured - v).max(0.0),
            };
            t.record(residual, || {
                format!(
                    "c={} chi={:?} class={:?} measured={measured:.6} predicted={predicted:?}",
                    c.gen(),
                    chi.exponents(),
                    chi.class()
                )
            });
        }
        Ok(())
    })
}

fn twisted(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let cap = opts.twisted_norm_cap();
    let ideals = ideals_up_to_norm(cap as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pairs = Vec::new();
    while pairs.len() < opts.twisted_pairs {
        let c1 = ideals[rng.gen_range(0..ideals.len())];
        let c2 = ideals[rng.gen_range(0..ideals.len())];
        if c1.norm() * c2.norm() > cap || !c1.is_coprime_to(c2) {
            continue;
        }
        let (g1, g2) = (char_group(c1.gen())?, char_group(c2.gen())?);
        let k1 = rng.gen_range(0..g1.order());
        let k2 = rng.gen_range(0..g2.order());
        pairs.push((g1.character(k1), g2.character(k2)));
    }
    tally_over(&pairs, Suite::Twisted, tol, |(x, y), t| {
        let r = twisted_mult_residual(x, y)?;
        t.record(r.norm(), || {
            format!(
                "chi1 mod {} {:?}, chi2 mod {} {:?}",
                x.modulus().gen(),
                x.exponents(),
                y.modulus().gen(),
                y.exponents()
            )
        });
        Ok(())
    })
}

fn selberg(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let small = elements_in_norm_range(0.0, 10.0);
    let moduli = elements_in_norm_range(0.0, opts.max_norm as f64);
    tally_over(&moduli, Suite::Selberg, tol, |&c, t| {
        let mut cache = ContextCache::new();
        for &m in &small {
            for &n in &small {
                let r = selberg_residual_cached(&mut cache, m, n, c)?;
                t.record(r.norm(), || format!("m={m} n={n} c={c}"));
            }
        }
        Ok(())
    })
}

/// All `(w, c, g)` with `g | w` and `N(w) N(c) N(g) <= cap`.
pub fn shift_triples(cap: i64) -> Vec<(GaussianInt, GaussianInt, GaussianInt)> {
    let all = elements_in_norm_range(0.0, cap as f64);
    let mut triples = Vec::new();
    // `all` is sorted by norm, so each inner range is a prefix.
    for &g in &all {
        for &q in &all {
            let w = q * g;
            let budget = cap / (w.norm() * g.norm());
            if budget == 0 {
                break;
            }
            for &c in all.iter().take_while(|c| c.norm() <= budget) {
                triples.push((w, c, g));
            }
        }
    }
    triples
}

fn shift(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let triples = shift_triples(opts.shift_norm_cap());
    // One cache for the scan: the moduli c g repeat heavily.
    let mut cache = ContextCache::new();
    let mut t = Tally::new(Suite::Shift, tol);
    for &(w, c, g) in &triples {
        let r = shift_vanishing_residual_cached(&mut cache, w, c, g)?;
        t.record(r.norm(), || format!("w={w} c={c} g={g}"));
    }
    Ok(t)
}

fn weil(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let small = elements_in_norm_range(0.0, 10.0);
    let moduli = elements_in_norm_range(0.0, opts.max_norm as f64);
    tally_over(&moduli, Suite::Weil, tol, |&c, t| {
        let mut cache = ContextCache::new();
        for &m in &small {
            for &n in &small {
                let s = cache.kloosterman(m, n, c)?;
                let ratio = s.norm() / weil_scale(m, n, c)?;
                t.record(ratio, || format!("m={m} n={n} c={c}"));
            }
        }
        Ok(())
    })
}

/// Largest pairwise relative deviation among the three forms of `H(z)`.
pub fn bessel_deviation(z: Complex64, tf: &TestFunction, cfg: &QuadratureConfig) -> Result<(f64, [Complex64; 3])> {
    let a = h_spectral(z, tf, cfg)?.value;
    let b = h_geometric0(z, tf, cfg).value;
    let c = h_geometric2(z, tf, cfg).value;
    let scale = a.norm().max(b.norm()).max(c.norm());
    let gap = [(a - b).norm(), (a - c).norm(), (b - c).norm()]
        .into_iter()
        .fold(0.0, f64::max);
    Ok((if scale == 0.0 { 0.0 } else { gap / scale }, [a, b, c]))
}

fn bessel(opts: &VerifyOptions, tol: f64) -> Result<Tally> {
    let points = opts.bessel_grid.points();
    tally_over(&points, Suite::Bessel, tol, |(z, tf), t| {
        let (dev, _) = bessel_deviation(*z, tf, &opts.quadrature)?;
        t.record(dev, || format!("z={z} T={} P={}", tf.t_width, tf.p_width));
        Ok(())
    })
}

fn plancherel(opts: &VerifyOptions, tol: f64) -> Tally {
    let mut t = Tally::new(Suite::Plancherel, tol);
    for tw in [1.0, 2.0, 4.0] {
        for pw in [1.0, 2.0, 4.0] {
            let v = plancherel_h(&TestFunction::new(tw, pw), &opts.quadrature);
            t.record(v.relative_gap(), || format!("T={tw} P={pw}"));
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_passes_and_zero_tolerance_fails() {
        let opts = VerifyOptions {
            max_norm: 2,
            ..VerifyOptions::default()
        };
        for r in verify_all(&opts).unwrap() {
            assert!(r.passed(), "{r:?}");
            assert!(r.cases > 0, "{r:?}");
        }
        let strict = VerifyOptions {
            max_norm: 10,
            tolerance: Some(0.0),
            ..VerifyOptions::default()
        };
        let reports = verify_all(&strict).unwrap();
        assert!(reports.iter().any(|r| !r.passed()));
        assert!(reports
            .iter()
            .filter(|r| !r.passed())
            .all(|r| !r.failing.is_empty()));
    }

    #[test]
    fn lemma_suite_reports_the_dyadic_mismatches() {
        let opts = VerifyOptions {
            max_norm: 64,
            ..VerifyOptions::default()
        };
        let r = run_suite(Suite::Lemma, &opts).unwrap();
        assert_eq!(r.failures, 2);
        assert!(r.failing.iter().all(|f| f.starts_with("c=8 ")), "{:?}", r.failing);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
