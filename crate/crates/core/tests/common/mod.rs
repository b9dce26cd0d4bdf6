#![allow(dead_code)]

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Lattice synthesis on a grid this many times finer than the output, so
/// the spectral cutoff sits well below the shortest estimator lag.
pub const FBM_OVERSAMPLE: usize = 4;

/// Fractional Brownian surface by spectral synthesis: amplitudes
/// |k|^-(H+1), uniform phases, real part of the inverse 2-D transform,
/// sampled every [`FBM_OVERSAMPLE`] points.
pub fn fbm_surface(n: usize, hurst: f64, seed: u64) -> Array2<f64> {
    let big = n * FBM_OVERSAMPLE;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = vec![Complex::new(0.0, 0.0); big * big];
    let freq = |i: usize| if i <= big / 2 { i as f64 } else { i as f64 - big as f64 };
    for r in 0..big {
        for c in 0..big {
            let k = freq(r).hypot(freq(c));
            if k == 0.0 {
                continue;
            }
            let phase = rng.random::<f64>() * std::f64::consts::TAU;
            spec[r * big + c] = Complex::from_polar(k.powf(-(hurst + 1.0)), phase);
        }
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_inverse(big);
    for row in spec.chunks_mut(big) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); big];
    for c in (0..big).step_by(FBM_OVERSAMPLE) {
        for r in 0..big {
            col[r] = spec[r * big + c];
        }
        fft.process(&mut col);
        for r in 0..big {
            spec[r * big + c] = col[r];
        }
    }
    Array2::from_shape_fn((n, n), |(r, c)| spec[r * FBM_OVERSAMPLE * big + c * FBM_OVERSAMPLE].re)
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Composite Simpson rule on [a, b] with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Chi-square goodness-of-fit p-value of `samples` against a density on
/// [0, hi], using `bins` equiprobable bins from a tabulated cdf.
pub fn chi_square_p(samples: &[f64], pdf: impl Fn(f64) -> f64, bins: usize, hi: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let steps = 200_000;
    let h = hi / steps as f64;
    let mut cum = vec![0.0; steps + 1];
    let mut prev = pdf(0.0);
    for i in 1..=steps {
        let mid = pdf((i as f64 - 0.5) * h);
        let cur = pdf(i as f64 * h);
        cum[i] = cum[i - 1] + h * (prev + 4.0 * mid + cur) / 6.0;
        prev = cur;
    }
    let total = cum[steps];
    let mut edges = Vec::with_capacity(bins - 1);
    for b in 1..bins {
        let target = total * b as f64 / bins as f64;
        let i = cum.partition_point(|&c| c < target);
        let t = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
        edges.push((i as f64 - 1.0 + t) * h);
    }
    let mut counts = vec![0usize; bins];
    for &x in samples {
        counts[edges.partition_point(|&e| e <= x)] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}
