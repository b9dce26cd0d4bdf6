mod common;

use common::{chi_square_p, median};
use ndarray::s;
use qus_core::models::*;
use qus_core::phantom::*;
use qus_core::{detect_envelope, EnvelopeImage};

fn envelope(density: f64, ratio: f64, seed: u64) -> EnvelopeImage {
    let spec = PhantomSpec {
        density,
        coherent_ratio: ratio,
        seed,
        ..PhantomSpec::default()
    };
    detect_envelope(&synthesize(&spec).unwrap().0).unwrap()
}

/// Pixels at least two resolution cells apart, away from the line ends.
fn sparse_interior(env: &EnvelopeImage) -> Vec<f64> {
    let (r, _) = env.shape();
    env.values
        .slice(s![r / 10..r - r / 10;16, ..;4])
        .iter()
        .copied()
        .collect()
}

fn median_fit(kind: ModelKind, density: f64, ratio: f64, seeds: u64) -> Vec<f64> {
    let fits: Vec<Vec<f64>> = (0..seeds)
        .map(|seed| {
            let env = envelope(density, ratio, seed);
            let (r, _) = env.shape();
            let xs: Vec<f64> = env.values.slice(s![r / 10..r - r / 10, ..]).iter().copied().collect();
            fit_mle(kind, &xs, &FitOptions::default()).unwrap().values()
        })
        .collect();
    (0..fits[0].len())
        .map(|j| median(&mut fits.iter().map(|f| f[j]).collect::<Vec<_>>()))
        .collect()
}

#[test]
fn k_shape_grows_with_density() {
    let sparse = median_fit(ModelKind::KDist, 0.5, 0.0, 5)[0];
    let dense = median_fit(ModelKind::KDist, 20.0, 0.0, 5)[0];
    assert!(sparse < dense, "alpha sparse {sparse}, dense {dense}");
    assert!(sparse < 5.0);
}

#[test]
fn rician_coherence_grows_with_ratio() {
    let mut last = -1.0;
    for ratio in [0.5, 1.0, 2.0, 4.0] {
        let v = median_fit(ModelKind::Rician, 20.0, ratio, 3);
        let k = v[0] / v[1].sqrt();
        assert!(k > last, "ratio {ratio}: eps/sigma {k}");
        last = k;
    }
}

#[test]
fn dense_speckle_is_rayleigh() {
    let mut xs = Vec::new();
    for seed in 0..20 {
        let env = envelope(20.0, 0.0, 100 + seed);
        let v = sparse_interior(&env);
        let rms = (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
        xs.extend(v.iter().map(|x| x / rms));
    }
    let s2 = 0.5;
    let p = chi_square_p(&xs, |x| x / s2 * (-x * x / (2.0 * s2)).exp(), 20, 10.0);
    assert!(p > 1e-3, "p = {p} over {} samples", xs.len());
}

#[test]
fn coherent_amplitude_matches_ratio() {
    let spec = PhantomSpec {
        coherent_ratio: 2.0,
        seed: 4,
        ..PhantomSpec::default()
    };
    let (frame, truth) = synthesize(&spec).unwrap();
    let diffuse = synthesize(&PhantomSpec {
        coherent_ratio: 0.0,
        ..spec.clone()
    })
    .unwrap()
    .0;
    let rms = (diffuse.samples.iter().map(|v| v * v).sum::<f64>() / diffuse.samples.len() as f64).sqrt();
    assert!((truth.coherent_amplitude / (2.0 * 2f64.sqrt() * rms) - 1.0).abs() < 1e-12);
    let mean_diff: f64 = frame
        .samples
        .iter()
        .zip(&diffuse.samples)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / frame.samples.len() as f64;
    assert!((mean_diff / (0.5 * truth.coherent_amplitude.powi(2)) - 1.0).abs() < 0.02);
}

#[test]
fn scatterer_count_is_poisson_in_density() {
    let spec = PhantomSpec {
        density: 3.0,
        seed: 8,
        ..PhantomSpec::default()
    };
    let (_, truth) = synthesize(&spec).unwrap();
    let inside = truth
        .scatterers
        .iter()
        .filter(|s| s.axial >= 0.0 && s.axial < spec.rows as f64 && s.lateral >= 0.0 && s.lateral < spec.cols as f64)
        .count() as f64;
    let expected = spec.density * (spec.rows * spec.cols) as f64 / spec.psf.cell_area();
    assert!(
        (inside - expected).abs() < 4.0 * expected.sqrt(),
        "{inside} vs {expected}"
    );
    assert!(truth.scatterers.iter().all(|s| s.amplitude == 1.0));
}
