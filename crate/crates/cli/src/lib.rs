//! `sieve-lab`: compute individual sums, run the identity suites and emit
//! experiment reports.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on a usage or input
//! error.

mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gauss_sieve::archimedean::{h_spectral, plancherel_h, QuadratureConfig, TestFunction};
use gauss_sieve::characters::{char_group, lemma_predicted_modulus, LemmaPrediction};
use gauss_sieve::expsum::{f_sum, kloosterman};
use gauss_sieve::lab::{summarize, Experiment, DEFAULT_SEED, DEFAULT_TRIALS};
use gauss_sieve::spectral::{
    eisenstein_weight, hecke_zeta, hecke_zeta_with, kuznetsov_geometric, ZetaMode,
};
use gauss_sieve::verify::{self, BesselGrid, Suite, VerifyOptions};
use gauss_sieve::{GIdeal, GaussianInt};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

pub use output::Format;
use output::{Body, Report, Table};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "SIEVE_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sieve-lab", version, about = "Exponential sums, Bessel integrals and sieve experiments over Z[i]")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized trials and sampled suites.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML file overriding the quadrature settings.
    #[arg(long, global = true)]
    quadrature: Option<PathBuf>,

    /// Acceptance tolerance for the checking commands.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kloosterman sum S(m, n; c).
    Kloosterman {
        #[arg(long)]
        m: GaussianInt,
        #[arg(long)]
        n: GaussianInt,
        #[arg(long)]
        c: GaussianInt,
    },
    /// F(w; c) = S(w^2, 1; c) e[2w / c].
    Fsum {
        #[arg(long)]
        w: GaussianInt,
        #[arg(long)]
        c: GaussianInt,
    },
    /// Mellin transform of F(.; c) at every character mod c.
    Charsum {
        #[arg(long)]
        c: GaussianInt,
    },
    /// Compare |F-hat(chi)| with the prime-power closed forms.
    LemmaCheck {
        #[arg(long)]
        c: GaussianInt,
    },
    /// H(z) for the test function of widths T and P.
    Bessel {
        #[arg(long, allow_hyphen_values = true)]
        z: Complex64,
        #[command(flatten)]
        widths: Widths,
        /// Also evaluate both geometric forms and report the largest
        /// pairwise relative deviation.
        #[arg(long)]
        compare: bool,
    },
    /// Closed form and quadrature of the Plancherel integral.
    Plancherel {
        #[command(flatten)]
        widths: Widths,
    },
    /// Hecke zeta function of the ideal character of frequency 4p.
    Zeta {
        #[arg(long, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        p: i64,
        /// Largest ideal norm in the truncated sum.
        #[arg(long, default_value_t = 1e5)]
        cutoff: f64,
        /// Sharp truncation or Riesz smoothing; chosen from Re s if absent.
        #[arg(long, value_parser = ["sharp", "smoothed"])]
        mode: Option<String>,
    },
    /// Eisenstein weight 1/|zeta(1+2it, 2p)|^2 at (t, p), or the
    /// Eisenstein-side ratio experiment when no point is given.
    Eisenstein {
        #[arg(long, allow_hyphen_values = true, requires = "p")]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true, requires = "t")]
        p: Option<i64>,
        #[arg(long = "T", default_value_t = 2.0)]
        t_width: f64,
        #[arg(long = "P", default_value_t = 1.0)]
        p_width: f64,
        #[arg(long = "N", default_value_t = 30.0)]
        n: f64,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// Geometric side of the Kuznetsov formula with a truncated c-sum.
    KuznetsovGeom {
        #[arg(long)]
        m: GaussianInt,
        #[arg(long)]
        n: GaussianInt,
        #[command(flatten)]
        widths: Widths,
        /// Largest N(c) in the Kloosterman sum.
        #[arg(long, default_value_t = 100)]
        cutoff: i64,
    },
    /// Quadratic-form ratio experiment with random +-1 sequences.
    Quadform {
        #[arg(long, default_value = "1")]
        d: GaussianInt,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        theta: Complex64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long = "C", default_value_t = 4.0)]
        c: f64,
        #[arg(long = "M", default_value_t = 4.0)]
        m: f64,
        #[arg(long = "N", default_value_t = 4.0)]
        n: f64,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// Hybrid large-sieve ratio experiment with random +-1 sequences.
    Hybrid {
        #[arg(long = "C", default_value_t = 4.0)]
        c: f64,
        #[arg(long = "T", default_value_t = 2.0)]
        t: f64,
        #[arg(long = "N", default_value_t = 20.0)]
        n: f64,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// Run one identity suite, or all of them.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 50)]
        max_norm: i64,
        /// Use the full Bessel grid instead of the quick one.
        #[arg(long)]
        full_bessel: bool,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct Widths {
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long = "P", default_value_t = 1.0)]
    p: f64,
}

impl Widths {
    fn test_function(self) -> Result<TestFunction, String> {
        if !(self.t > 0.0 && self.p > 0.0) {
            return Err(format!("T and P must be positive, got {} and {}", self.t, self.p));
        }
        Ok(TestFunction::new(self.t, self.p))
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct TrialArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u32,
    /// Multiply the first sequence by this factor.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Emit only the maximum-ratio summary row.
    #[arg(long)]
    summary: bool,
}

enum Failure {
    Usage(String),
}

impl From<gauss_sieve::Error> for Failure {
    fn from(e: gauss_sieve::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Usage(e)
    }
}

/// Parse `argv` (program name first), execute one subcommand and write its
/// report to `out` or the `--out` file. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok((report, passed)) => {
            let written = match &cli.out {
                Some(path) => File::create(path).and_then(|f| {
                    let mut w = BufWriter::new(f);
                    report.write(cli.format, &mut w)?;
                    w.flush()
                }),
                None => report.write(cli.format, out),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: writing report: {e}");
                return 2;
            }
            if passed {
                0
            } else {
                let _ = writeln!(err, "check failed; see the report notes");
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| e.to_string())
}

fn load_quadrature(path: &Option<PathBuf>) -> Result<QuadratureConfig, Failure> {
    let Some(path) = path else {
        return Ok(QuadratureConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
    Ok(QuadratureConfig::from_toml(&text)?)
}

fn config(command: &str, seed: Option<u64>, params: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    if let Some(s) = seed {
        m.insert("seed".into(), json!(s));
    }
    if let Value::Object(p) = params {
        m.extend(p);
    }
    m
}

fn execute(cli: &Cli) -> Result<(Report, bool), Failure> {
    let quad = load_quadrature(&cli.quadrature)?;
    let quad_json = serde_json::to_value(&quad).map_err(|e| Failure::Usage(e.to_string()))?;
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let mut notes = Vec::new();
    let mut passed = true;
    let (cfg, body) = match &cli.command {
        Command::Kloosterman { m, n, c } => {
            let s = kloosterman(*m, *n, *c)?;
            let mut t = Table::new(&["m", "n", "c", "S"]);
            t.push(vec![
                m.to_string().into(),
                n.to_string().into(),
                c.to_string().into(),
                s.into(),
            ]);
            let p = json!({ "m": m.to_string(), "n": n.to_string(), "c": c.to_string() });
            (config("kloosterman", None, p), Body::Table(t))
        }
        Command::Fsum { w, c } => {
            let f = f_sum(*w, *c)?;
            let mut t = Table::new(&["w", "c", "F"]);
            t.push(vec![w.to_string().into(), c.to_string().into(), f.into()]);
            let p = json!({ "w": w.to_string(), "c": c.to_string() });
            (config("fsum", None, p), Body::Table(t))
        }
        Command::Charsum { c } => {
            let modulus = GIdeal::new(*c)?;
            let group = char_group(*c)?;
            let hats = group.mellin_all(*c)?;
            let mut t = Table::new(&["index", "exponents", "class", "conductor", "F_hat", "abs"]);
            for (k, (chi, hat)) in group.characters().zip(&hats).enumerate() {
                t.push(vec![
                    k.into(),
                    format!("{:?}", chi.exponents()).into(),
                    chi.class().to_string().into(),
                    chi.conductor().to_string().into(),
                    (*hat).into(),
                    hat.norm().into(),
                ]);
            }
            let energy: f64 = hats.iter().map(|h| h.norm_sqr()).sum();
            notes.push(format!("characters = {}, sum |F_hat|^2 = {energy}", group.order()));
            let p = json!({ "c": c.to_string(), "modulus": modulus.to_string() });
            (config("charsum", None, p), Body::Table(t))
        }
        Command::LemmaCheck { c } => {
            let tol = cli.tolerance.unwrap_or(1e-9);
            let group = char_group(*c)?;
            let hats = group.mellin_all(*c)?;
            let mut t = Table::new(&[
                "exponents", "class", "measured", "kind", "predicted", "residual", "ok",
            ]);
            let mut failures = 0;
            for (chi, hat) in group.characters().zip(hats) {
                let pred = lemma_predicted_modulus(&chi)?;
                let measured = hat.norm();
                let (kind, residual) = match pred {
                    LemmaPrediction::Exact(v) => ("exact", (measured - v).abs()),
                    LemmaPrediction::Bound(v) => ("bound", (measured - v).max(0.0)),
                };
                let ok = pred.accepts(measured, tol);
                if !ok {
                    failures += 1;
                }
                t.push(vec![
                    format!("{:?}", chi.exponents()).into(),
                    chi.class().to_string().into(),
                    measured.into(),
                    kind.into(),
                    pred.value().into(),
                    residual.into(),
                    if ok { "yes" } else { "NO" }.into(),
                ]);
            }
            notes.push(format!("{failures} of {} characters outside tolerance", group.order()));
            passed = failures == 0;
            let p = json!({ "c": c.to_string(), "tolerance": tol });
            (config("lemma-check", None, p), Body::Table(t))
        }
        Command::Bessel { z, widths, compare } => {
            let tf = widths.test_function()?;
            let p = json!({ "z": z.to_string(), "T": widths.t, "P": widths.p, "compare": compare });
            if *compare {
                let tol = cli.tolerance.unwrap_or(Suite::Bessel.default_tolerance());
                let (dev, [a, b, c]) = verify::bessel_deviation(*z, &tf, &quad)?;
                let mut t = Table::new(&["form", "H"]);
                t.push(vec!["spectral".into(), a.into()]);
                t.push(vec!["geometric0".into(), b.into()]);
                t.push(vec!["geometric2".into(), c.into()]);
                notes.push(format!("max pairwise relative deviation = {dev:.3e} (tolerance {tol:e})"));
                passed = dev <= tol;
                (config("bessel", None, p), Body::Table(t))
            } else {
                let h = h_spectral(*z, &tf, &quad)?;
                let mut t = Table::new(&["z", "H", "error"]);
                t.push(vec![z.to_string().into(), h.value.into(), h.error.into()]);
                (config("bessel", None, p), Body::Table(t))
            }
        }
        Command::Plancherel { widths } => {
            let tf = widths.test_function()?;
            let v = plancherel_h(&tf, &quad);
            let mut t = Table::new(&["T", "P", "closed_form", "quadrature", "relative_gap"]);
            t.push(vec![
                widths.t.into(),
                widths.p.into(),
                v.closed_form.into(),
                v.quadrature.value.into(),
                v.relative_gap().into(),
            ]);
            let p = json!({ "T": widths.t, "P": widths.p });
            (config("plancherel", None, p), Body::Table(t))
        }
        Command::Zeta { s, p, cutoff, mode } => {
            let v = match mode.as_deref() {
                Some("sharp") => hecke_zeta_with(*s, *p, *cutoff, ZetaMode::Sharp)?,
                Some(_) => hecke_zeta_with(*s, *p, *cutoff, ZetaMode::Smoothed)?,
                None => hecke_zeta(*s, *p, *cutoff)?,
            };
            let mut t = Table::new(&["s", "p", "zeta", "tail_estimate"]);
            t.push(vec![s.to_string().into(), (*p).into(), v.value.into(), v.tail_estimate.into()]);
            let resolved = mode.clone().unwrap_or_else(|| {
                if s.re > 1.0 { "sharp" } else { "smoothed" }.to_string()
            });
            let cfg = json!({ "s": s.to_string(), "p": p, "cutoff": cutoff, "mode": resolved });
            (config("zeta", None, cfg), Body::Table(t))
        }
        Command::Eisenstein {
            t: Some(t),
            p: Some(p),
            ..
        } => {
            let w = eisenstein_weight(*t, *p)?;
            let mut tab = Table::new(&["t", "p", "weight"]);
            tab.push(vec![(*t).into(), (*p).into(), w.into()]);
            (config("eisenstein", None, json!({ "t": t, "p": p })), Body::Table(tab))
        }
        Command::Eisenstein {
            t_width,
            p_width,
            n,
            trials,
            ..
        } => {
            let e = Experiment::Eisenstein {
                t: *t_width,
                p: *p_width,
                n: *n,
            };
            experiment(e, trials, seed)?
        }
        Command::KuznetsovGeom {
            m,
            n,
            widths,
            cutoff,
        } => {
            let tf = widths.test_function()?;
            if *cutoff < 1 {
                return Err(Failure::Usage(format!("cutoff must be at least 1, got {cutoff}")));
            }
            let k = kuznetsov_geometric(*m, *n, &tf, *cutoff, &quad)?;
            let mut t = Table::new(&["diagonal", "kloosterman_term", "tail_bound"]);
            t.push(vec![k.diagonal.into(), k.kloosterman_term.into(), k.tail_bound.into()]);
            let p = json!({
                "m": m.to_string(), "n": n.to_string(), "T": widths.t, "P": widths.p, "cutoff": cutoff,
            });
            (config("kuznetsov-geom", None, p), Body::Table(t))
        }
        Command::Quadform {
            d,
            theta,
            gamma,
            c,
            m,
            n,
            trials,
        } => {
            let e = Experiment::Quadform {
                d: *d,
                theta: *theta,
                gamma: *gamma,
                c: *c,
                m: *m,
                n: *n,
            };
            experiment(e, trials, seed)?
        }
        Command::Hybrid { c, t, n, trials } => {
            experiment(Experiment::Hybrid { c: *c, t: *t, n: *n }, trials, seed)?
        }
        Command::Verify {
            suite,
            max_norm,
            full_bessel,
            pairs,
        } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse::<Suite>()?]
            };
            let opts = VerifyOptions {
                max_norm: *max_norm,
                tolerance: cli.tolerance,
                seed,
                twisted_pairs: *pairs,
                bessel_grid: if *full_bessel {
                    BesselGrid::Full
                } else {
                    BesselGrid::Quick
                },
                quadrature: quad.clone(),
            };
            let mut t = Table::new(&["suite", "cases", "failures", "worst", "tolerance", "status"]);
            for s in suites {
                let r = verify::run_suite(s, &opts)?;
                passed &= r.passed();
                for f in &r.failing {
                    notes.push(format!("FAIL {}: {f}", s.name()));
                }
                t.push(vec![
                    s.name().into(),
                    r.cases.into(),
                    r.failures.into(),
                    r.worst.into(),
                    r.tolerance.into(),
                    if r.passed() { "pass" } else { "FAIL" }.into(),
                ]);
            }
            let p = json!({
                "suite": suite, "max_norm": max_norm, "tolerance": cli.tolerance,
                "bessel_grid": opts.bessel_grid, "pairs": pairs,
            });
            (config("verify", Some(seed), p), Body::Table(t))
        }
    };
    let report = Report {
        config: cfg,
        quadrature: quad_json,
        body,
        notes,
    };
    Ok((report, passed))
}

fn experiment(
    e: Experiment,
    trials: &TrialArgs,
    seed: u64,
) -> Result<(Map<String, Value>, Body), Failure> {
    if trials.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    if !(trials.scale > 0.0 && trials.scale.is_finite()) {
        return Err(Failure::Usage(format!("--scale must be positive, got {}", trials.scale)));
    }
    let mut reports = e.run_scaled(trials.trials, seed, trials.scale)?;
    let summary = summarize(&reports).expect("at least one trial");
    if trials.summary {
        reports.clear();
    }
    reports.push(summary);
    let mut params = serde_json::to_value(&e).map_err(|err| Failure::Usage(err.to_string()))?;
    if let Value::Object(m) = &mut params {
        m.remove("experiment");
        m.insert("trials".into(), json!(trials.trials));
        m.insert("scale".into(), json!(trials.scale));
    }
    Ok((config(e.name(), Some(seed), params), Body::Reports(reports)))
}
