use gauss_sieve::expsum::{
    selberg_residual_cached, shift_vanishing_residual_cached, weil_scale, ContextCache,
};
use gauss_sieve::gauss::elements_in_norm_range;
use gauss_sieve::GaussianInt;
use rayon::prelude::*;

fn elements(max_norm: f64) -> Vec<GaussianInt> {
    elements_in_norm_range(0.0, max_norm)
}

#[test]
fn selberg_identity_exhaustive() {
    let small = elements(10.0);
    let moduli = elements(200.0);
    let worst = moduli
        .par_iter()
        .map(|&c| {
            let mut cache = ContextCache::new();
            let mut worst: f64 = 0.0;
            for &m in &small {
                for &n in &small {
                    let r = selberg_residual_cached(&mut cache, m, n, c).unwrap();
                    worst = worst.max(r.norm());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst < 1e-9, "max residual {worst}");
}

#[test]
fn shift_vanishing_exhaustive() {
    let all = elements(500.0);
    // `all` is sorted by norm, so each inner range is a prefix.
    let mut triples = Vec::new();
    for &g in &all {
        for &q in &all {
            let w = q * g;
            let budget = 500 / (w.norm() * g.norm());
            if budget == 0 {
                break;
            }
            for &c in all.iter().take_while(|c| c.norm() <= budget) {
                triples.push((w, c, g));
            }
        }
    }
    assert!(triples.len() > 1000);
    // One cache for the whole scan: the moduli c*g repeat heavily.
    let mut cache = ContextCache::new();
    let worst = triples
        .iter()
        .map(|&(w, c, g)| {
            shift_vanishing_residual_cached(&mut cache, w, c, g)
                .unwrap()
                .norm()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-9, "max residual {worst}");
}

#[test]
fn weil_ratio_bounded_on_grid() {
    let small = elements(10.0);
    let moduli = elements(200.0);
    let worst = moduli
        .par_iter()
        .map(|&c| {
            let mut cache = ContextCache::new();
            let mut worst: f64 = 0.0;
            for &m in &small {
                for &n in &small {
                    let s = cache.kloosterman(m, n, c).unwrap();
                    worst = worst.max(s.norm() / weil_scale(m, n, c).unwrap());
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    println!("max Weil ratio {worst:.6}");
    assert!(worst <= 2.0);
}
