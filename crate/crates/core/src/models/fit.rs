use std::collections::BTreeMap;

use super::simplex::Simplex;
use super::{gig_mean, sum_ln_pdf, ModelKind, ModelParams, NakagamiParams, RayleighParams};
use crate::error::{Error, Result};
use crate::special::{digamma, ln_bessel_k, trigamma};

/// Box constraints on the natural parameters of one model, in
/// `ModelKind::param_names` order.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

const TINY: f64 = 1e-300;
const HUGE: f64 = 1e300;

impl ParamBounds {
    pub fn default_for(kind: ModelKind) -> Self {
        let (lower, upper) = match kind {
            ModelKind::Rayleigh => (vec![TINY], vec![HUGE]),
            ModelKind::Rician => (vec![0.0, TINY], vec![HUGE, HUGE]),
            ModelKind::KDist => (vec![1e-2, TINY], vec![1e3, HUGE]),
            ModelKind::Nakagami => (vec![1e-3, TINY], vec![1e3, HUGE]),
            ModelKind::Nig => (vec![1e-3, TINY, 1e-3, 1e-6], vec![1e3, HUGE, 1e3, 1e6]),
        };
        ParamBounds { lower, upper }
    }

    fn clamp(&self, v: &mut [f64]) {
        for ((x, lo), hi) in v.iter_mut().zip(&self.lower).zip(&self.upper) {
            *x = x.clamp(*lo, *hi);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Relative log-likelihood change at which the search stops.
    pub tolerance: f64,
    bounds: BTreeMap<ModelKind, ParamBounds>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            tolerance: 1e-8,
            bounds: ModelKind::ALL
                .iter()
                .map(|&k| (k, ParamBounds::default_for(k)))
                .collect(),
        }
    }
}

impl FitOptions {
    pub fn bounds(&self, kind: ModelKind) -> &ParamBounds {
        &self.bounds[&kind]
    }

    pub fn with_bounds(mut self, kind: ModelKind, bounds: ParamBounds) -> Result<Self> {
        self.bounds.insert(kind, bounds);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::argument("max_iterations must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::argument("tolerance must be positive"));
        }
        for (kind, b) in &self.bounds {
            let n = kind.param_count();
            if b.lower.len() != n || b.upper.len() != n {
                return Err(Error::argument(format!("{kind} bounds need {n} entries")));
            }
            for (i, (lo, hi)) in b.lower.iter().zip(&b.upper).enumerate() {
                let name = kind.param_names()[i];
                let may_be_zero = matches!(
                    (kind, name),
                    (ModelKind::Rician, "epsilon") | (ModelKind::Nig, "lambda")
                );
                if !lo.is_finite() || !hi.is_finite() || lo > hi || *lo < 0.0 || (!may_be_zero && *lo <= 0.0) {
                    return Err(Error::argument(format!(
                        "invalid bounds [{lo}, {hi}] for {kind}.{name}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Validates raw amplitudes and replaces exact zeros by 1e-12 × max.
pub fn sanitize_samples(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::argument("empty sample"));
    }
    if let Some(i) = samples.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::argument(format!(
            "sample {i} is {} (must be finite and ≥ 0)",
            samples[i]
        )));
    }
    let max = samples.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::degenerate("all samples are zero"));
    }
    let floor = 1e-12 * max;
    Ok(samples.iter().map(|&x| if x == 0.0 { floor } else { x }).collect())
}

struct Moments {
    /// E[x²]
    power: f64,
    /// Var(x²)
    power_var: f64,
}

fn moments(samples: &[f64]) -> Result<Moments> {
    let n = samples.len() as f64;
    let power = samples.iter().map(|x| x * x).sum::<f64>() / n;
    let power_var = samples.iter().map(|x| (x * x - power).powi(2)).sum::<f64>() / n;
    if !(power_var > 0.0) || samples.iter().all(|&x| x == samples[0]) {
        return Err(Error::degenerate("samples have zero variance"));
    }
    Ok(Moments { power, power_var })
}

/// Moment-matching starting point for [`fit_mle`], clamped into the
/// default bounds.
pub fn moment_init(kind: ModelKind, samples: &[f64]) -> Result<ModelParams> {
    moment_init_with(kind, samples, &FitOptions::default())
}

/// [`moment_init`] clamped into the bounds of `options`.
pub fn moment_init_with(kind: ModelKind, samples: &[f64], options: &FitOptions) -> Result<ModelParams> {
    let samples = sanitize_samples(samples)?;
    let Moments { power, power_var } = moments(&samples)?;
    // Nakagami shape from the intensity moments; also the coherence indicator.
    let m_nak = power * power / power_var;
    let mut v = match kind {
        ModelKind::Rayleigh => vec![power / 2.0],
        ModelKind::Nakagami => vec![m_nak, power],
        ModelKind::Rician => {
            // Rician has m = (K+1)²/(2K+1) with K = ε²/2σ².
            let k = if m_nak > 1.0 {
                (m_nak - 1.0) + (m_nak * (m_nak - 1.0)).sqrt()
            } else {
                0.0
            };
            vec![(power * k / (k + 1.0)).sqrt(), power / (2.0 * (k + 1.0))]
        }
        ModelKind::KDist => {
            // E[I²]/E[I]² = 2(1 + 1/α); diverges to α = ∞ at the Rayleigh point.
            let ratio = (power_var + power * power) / (power * power);
            let excess = ratio / 2.0 - 1.0;
            let upper = options.bounds(kind).upper[0];
            let alpha = if excess > 1.0 / upper { 1.0 / excess } else { upper };
            vec![alpha, power / (2.0 * alpha)]
        }
        ModelKind::Nig => {
            let (theta, lambda) = (1.0, 100.0);
            let (mean_tau, cv2) = gig_mean_cv2(theta, lambda);
            // Var(x²)/E[x²]² = (1 + 1/m)(1 + c²) − 1
            let inv_m = (power_var / (power * power) + 1.0) / (1.0 + cv2) - 1.0;
            let m = if inv_m > 0.0 { 1.0 / inv_m } else { f64::INFINITY };
            vec![m, power / mean_tau, theta, lambda]
        }
    };
    options.bounds(kind).clamp(&mut v);
    ModelParams::from_values(kind, &v)
}

fn gig_mean_cv2(p: f64, b: f64) -> (f64, f64) {
    let w = b.sqrt();
    let mean = gig_mean(p, b);
    let second = b * (ln_bessel_k(p + 2.0, w) - ln_bessel_k(p, w)).exp();
    (mean, second / (mean * mean) - 1.0)
}

/// Maximum-likelihood fit of `kind` to envelope amplitudes.
///
/// Rayleigh and the Nakagami spread are closed form; the Nakagami shape is
/// a one-dimensional Newton solve; Rician, K and NIG use a bounded simplex
/// search started from [`moment_init`]. The result never has a lower
/// likelihood than the initializer.
pub fn fit_mle(kind: ModelKind, samples: &[f64], options: &FitOptions) -> Result<ModelParams> {
    options.validate()?;
    let positives = samples.iter().filter(|&&x| x > 0.0).count();
    if positives < kind.param_count() + 1 && samples.iter().all(|x| x.is_finite() && *x >= 0.0) {
        return Err(Error::argument(format!(
            "{kind} needs at least {} positive samples, got {positives}",
            kind.param_count() + 1
        )));
    }
    let clean = sanitize_samples(samples)?;
    let init = moment_init_with(kind, &clean, options)?;
    let bounds = options.bounds(kind);
    let n = clean.len() as f64;
    let power = clean.iter().map(|x| x * x).sum::<f64>() / n;

    let fitted = match kind {
        ModelKind::Rayleigh => {
            let mut v = vec![power / 2.0];
            bounds.clamp(&mut v);
            ModelParams::Rayleigh(RayleighParams::new(v[0])?)
        }
        ModelKind::Nakagami => {
            let mean_ln_power = clean.iter().map(|x| (x * x).ln()).sum::<f64>() / n;
            let s = power.ln() - mean_ln_power;
            if !(s > 0.0) {
                return Err(Error::degenerate("samples have zero spread"));
            }
            let mut v = vec![nakagami_shape(s), power];
            bounds.clamp(&mut v);
            ModelParams::Nakagami(NakagamiParams::new(v[0], v[1])?)
        }
        ModelKind::Rician | ModelKind::KDist | ModelKind::Nig => simplex_fit(kind, &clean, &init, power, options)?,
    };

    let ll_fit = sum_ln_pdf(&fitted.density(), &clean);
    let ll_init = sum_ln_pdf(&init.density(), &clean);
    Ok(if ll_fit >= ll_init { fitted } else { init })
}

/// Solves ln m − ψ(m) = s for the Nakagami (gamma) shape.
fn nakagami_shape(s: f64) -> f64 {
    // Greenwood–Durand style starting value, then Newton in log m.
    let mut m = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
    for _ in 0..100 {
        let g = m.ln() - digamma(m) - s;
        let dg = 1.0 / m - trigamma(m);
        let step = g / (dg * m);
        let next = m * (-step).exp();
        let done = (next - m).abs() <= 1e-14 * m;
        m = next;
        if done {
            break;
        }
    }
    m
}

/// Coordinates the simplex moves in, chosen so each axis is roughly
/// scale-free: log for positive parameters, ε relative to the RMS amplitude.
struct Coords {
    kind: ModelKind,
    rms: f64,
}

impl Coords {
    fn to_coords(&self, p: &ModelParams) -> Vec<f64> {
        match *p {
            ModelParams::Rician(r) => vec![r.epsilon / self.rms, r.sigma2.ln()],
            ModelParams::KDist(k) => vec![k.alpha.ln(), (2.0 * k.alpha * k.sigma2).ln()],
            ModelParams::Nig(g) => vec![g.m.ln(), g.omega.ln(), g.theta.ln(), g.lambda.ln()],
            _ => unreachable!("closed-form kinds are not searched"),
        }
    }

    fn to_values(&self, c: &[f64]) -> Vec<f64> {
        match self.kind {
            ModelKind::Rician => vec![c[0] * self.rms, c[1].exp()],
            ModelKind::KDist => {
                let alpha = c[0].exp();
                vec![alpha, c[1].exp() / (2.0 * alpha)]
            }
            ModelKind::Nig => c.iter().map(|v| v.exp()).collect(),
            _ => unreachable!(),
        }
    }

    fn bounds(&self, b: &ParamBounds) -> (Vec<f64>, Vec<f64>) {
        let ln = |v: f64| v.max(TINY).ln();
        match self.kind {
            ModelKind::Rician => (
                vec![b.lower[0] / self.rms, ln(b.lower[1])],
                vec![(b.upper[0] / self.rms).min(HUGE), ln(b.upper[1])],
            ),
            ModelKind::KDist => (vec![ln(b.lower[0]), -700.0], vec![ln(b.upper[0]), 700.0]),
            ModelKind::Nig => (
                b.lower.iter().map(|&v| ln(v)).collect(),
                b.upper.iter().map(|&v| ln(v)).collect(),
            ),
            _ => unreachable!(),
        }
    }

    fn steps(&self) -> Vec<f64> {
        match self.kind {
            ModelKind::Rician => vec![0.1, 0.2],
            ModelKind::KDist => vec![0.5, 0.1],
            ModelKind::Nig => vec![0.3, 0.3, 0.5, 1.0],
            _ => unreachable!(),
        }
    }
}

fn simplex_fit(
    kind: ModelKind,
    samples: &[f64],
    init: &ModelParams,
    power: f64,
    options: &FitOptions,
) -> Result<ModelParams> {
    let coords = Coords {
        kind,
        rms: power.sqrt(),
    };
    let bounds = options.bounds(kind);
    let (lower, upper) = coords.bounds(bounds);
    let step = coords.steps();
    let search = Simplex {
        lower: &lower,
        upper: &upper,
        step: &step,
        max_iterations: options.max_iterations,
        tolerance: options.tolerance,
    };
    let n = samples.len() as f64;
    let to_params = |c: &[f64]| -> Option<ModelParams> {
        let mut v = coords.to_values(c);
        bounds.clamp(&mut v);
        ModelParams::from_values(kind, &v).ok()
    };
    let result = search.minimize(&coords.to_coords(init), |c| match to_params(c) {
        Some(p) => -sum_ln_pdf(&p.density(), samples) / n,
        None => f64::INFINITY,
    });
    let best = to_params(&result.x).unwrap_or(*init);
    if result.converged {
        Ok(best)
    } else {
        Err(Error::Convergence {
            iterations: result.iterations,
            best: Box::new(best),
        })
    }
}

/// Envelope signal-to-noise ratio, mean / standard deviation.
pub fn envelope_snr(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::argument("SNR of an empty sample"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::degenerate("samples have zero variance"));
    }
    Ok(mean / var.sqrt())
}
