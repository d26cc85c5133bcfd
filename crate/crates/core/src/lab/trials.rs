use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::ExperimentReport;
use crate::error::Result;
use crate::gauss::ideals_up_to_norm;
use crate::spectral::{CoefficientSequence, NormWindow};
use num_complex::Complex64;

/// Generator for trial `index` of a set seeded with `seed`. Each trial has
/// its own stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Independent `+-1` on every ideal in the window.
pub fn random_signs(window: NormWindow, rng: &mut impl Rng) -> CoefficientSequence {
    let mut seq = CoefficientSequence::new(window);
    for n in ideals_up_to_norm(window.upper()) {
        if window.contains(n.norm()) {
            let s = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            seq.insert(n, Complex64::new(s, 0.0)).expect("inside window");
        }
    }
    seq
}

/// Runs `trials` independent jobs and returns their reports in trial order,
/// each tagged with its index and the set seed.
pub fn run_trials<F>(trials: u32, seed: u64, job: F) -> Result<Vec<ExperimentReport>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<ExperimentReport> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut r = job(&mut rng)?;
            r.trial = Some(i);
            r.seed = seed;
            Ok(r)
        })
        .collect()
}

/// The trial with the largest ratio, relabelled as a summary of the set.
pub fn summarize(reports: &[ExperimentReport]) -> Option<ExperimentReport> {
    let worst = reports
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))?;
    let mut s = worst.clone();
    s.trial = None;
    s.trials = reports.len() as u32;
    Some(s)
}
