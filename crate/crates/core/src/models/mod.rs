//! The five backscatter envelope distributions: densities, sampling and
//! maximum-likelihood fitting.
//!
//! All densities use the two-dimensional (n = 2) envelope convention, so
//! Rayleigh, Rician and K are the familiar single-look amplitude laws.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special::{ln_bessel_i0, ln_bessel_k, ln_gamma, LnBesselKTable};

mod fit;
mod sample;
mod simplex;

pub use fit::{envelope_snr, fit_mle, moment_init, moment_init_with, sanitize_samples, FitOptions, ParamBounds};
pub use sample::sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Rayleigh,
    Rician,
    KDist,
    Nakagami,
    Nig,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Nakagami,
        ModelKind::Rician,
        ModelKind::Rayleigh,
        ModelKind::Nig,
        ModelKind::KDist,
    ];

    /// Number of free parameters r.
    pub fn param_count(self) -> usize {
        self.param_names().len()
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Rayleigh => &["sigma2"],
            ModelKind::Rician => &["epsilon", "sigma2"],
            ModelKind::KDist => &["alpha", "sigma2"],
            ModelKind::Nakagami => &["m", "omega"],
            ModelKind::Nig => &["m", "omega", "theta", "lambda"],
        }
    }

    /// Machine name used in file headers and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rayleigh => "rayleigh",
            ModelKind::Rician => "rician",
            ModelKind::KDist => "k",
            ModelKind::Nakagami => "nakagami",
            ModelKind::Nig => "nig",
        }
    }

    /// Short column label used in report tables.
    pub fn short_label(self) -> &'static str {
        match self {
            ModelKind::Rayleigh => "Ray",
            ModelKind::Rician => "Ric",
            ModelKind::KDist => "Kd",
            ModelKind::Nakagami => "Nkg",
            ModelKind::Nig => "NIG",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rayleigh" | "ray" => Ok(ModelKind::Rayleigh),
            "rician" | "rice" | "ric" => Ok(ModelKind::Rician),
            "k" | "kdist" | "k-distribution" | "kd" => Ok(ModelKind::KDist),
            "nakagami" | "nkg" => Ok(ModelKind::Nakagami),
            "nig" => Ok(ModelKind::Nig),
            other => Err(Error::argument(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighParams {
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianParams {
    pub epsilon: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDistParams {
    pub alpha: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NakagamiParams {
    pub m: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigParams {
    pub m: f64,
    pub omega: f64,
    pub theta: f64,
    pub lambda: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be nonnegative and finite, got {v}")))
    }
}

impl RayleighParams {
    pub fn new(sigma2: f64) -> Result<Self> {
        positive("sigma2", sigma2)?;
        Ok(Self { sigma2 })
    }
}

impl RicianParams {
    pub fn new(epsilon: f64, sigma2: f64) -> Result<Self> {
        nonnegative("epsilon", epsilon)?;
        positive("sigma2", sigma2)?;
        Ok(Self { epsilon, sigma2 })
    }
}

impl KDistParams {
    pub fn new(alpha: f64, sigma2: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        positive("sigma2", sigma2)?;
        Ok(Self { alpha, sigma2 })
    }
}

impl NakagamiParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        positive("m", m)?;
        positive("omega", omega)?;
        Ok(Self { m, omega })
    }
}

impl NigParams {
    pub fn new(m: f64, omega: f64, theta: f64, lambda: f64) -> Result<Self> {
        positive("m", m)?;
        positive("omega", omega)?;
        positive("theta", theta)?;
        nonnegative("lambda", lambda)?;
        Ok(Self {
            m,
            omega,
            theta,
            lambda,
        })
    }

    /// E[x²] = Ω·E[τ] where τ is the GIG mixing variable.
    pub fn mean_power(&self) -> f64 {
        self.omega * gig_mean(self.theta, self.lambda)
    }
}

/// Mean of GIG(p, a = 1, b): the mixing law of the NIG density.
pub(crate) fn gig_mean(p: f64, b: f64) -> f64 {
    if b == 0.0 {
        // Gamma(p, scale 2)
        2.0 * p
    } else {
        let w = b.sqrt();
        w * (ln_bessel_k(p + 1.0, w) - ln_bessel_k(p, w)).exp()
    }
}

/// One fitted or specified parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Rayleigh(RayleighParams),
    Rician(RicianParams),
    KDist(KDistParams),
    Nakagami(NakagamiParams),
    Nig(NigParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Rayleigh(_) => ModelKind::Rayleigh,
            ModelParams::Rician(_) => ModelKind::Rician,
            ModelParams::KDist(_) => ModelKind::KDist,
            ModelParams::Nakagami(_) => ModelKind::Nakagami,
            ModelParams::Nig(_) => ModelKind::Nig,
        }
    }

    /// Parameter values in `kind().param_names()` order.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            ModelParams::Rayleigh(p) => vec![p.sigma2],
            ModelParams::Rician(p) => vec![p.epsilon, p.sigma2],
            ModelParams::KDist(p) => vec![p.alpha, p.sigma2],
            ModelParams::Nakagami(p) => vec![p.m, p.omega],
            ModelParams::Nig(p) => vec![p.m, p.omega, p.theta, p.lambda],
        }
    }

    pub fn from_values(kind: ModelKind, v: &[f64]) -> Result<Self> {
        if v.len() != kind.param_count() {
            return Err(Error::argument(format!(
                "{kind} takes {} parameters, got {}",
                kind.param_count(),
                v.len()
            )));
        }
        Ok(match kind {
            ModelKind::Rayleigh => ModelParams::Rayleigh(RayleighParams::new(v[0])?),
            ModelKind::Rician => ModelParams::Rician(RicianParams::new(v[0], v[1])?),
            ModelKind::KDist => ModelParams::KDist(KDistParams::new(v[0], v[1])?),
            ModelKind::Nakagami => ModelParams::Nakagami(NakagamiParams::new(v[0], v[1])?),
            ModelKind::Nig => ModelParams::Nig(NigParams::new(v[0], v[1], v[2], v[3])?),
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::from_values(self.kind(), &self.values()).map(|_| ())
    }

    /// E[x²] of the distribution.
    pub fn mean_power(&self) -> f64 {
        match *self {
            ModelParams::Rayleigh(p) => 2.0 * p.sigma2,
            ModelParams::Rician(p) => p.epsilon * p.epsilon + 2.0 * p.sigma2,
            ModelParams::KDist(p) => 2.0 * p.alpha * p.sigma2,
            ModelParams::Nakagami(p) => p.omega,
            ModelParams::Nig(p) => p.mean_power(),
        }
    }

    pub(crate) fn density(&self) -> Density {
        Density::new(self)
    }
}

/// Log-density with the sample-independent terms precomputed.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Density {
    Rayleigh {
        ln_sigma2: f64,
        inv_2sigma2: f64,
    },
    Rician {
        ln_sigma2: f64,
        inv_2sigma2: f64,
        eps2: f64,
        eps_over_sigma2: f64,
    },
    KDist {
        alpha: f64,
        norm: f64,
        b: f64,
    },
    Nakagami {
        m: f64,
        norm: f64,
        m_over_omega: f64,
    },
    Nig {
        m: f64,
        theta: f64,
        lambda: f64,
        norm: f64,
        two_m_over_omega: f64,
    },
}

impl Density {
    fn new(params: &ModelParams) -> Self {
        match *params {
            ModelParams::Rayleigh(p) => Density::Rayleigh {
                ln_sigma2: p.sigma2.ln(),
                inv_2sigma2: 0.5 / p.sigma2,
            },
            ModelParams::Rician(p) => Density::Rician {
                ln_sigma2: p.sigma2.ln(),
                inv_2sigma2: 0.5 / p.sigma2,
                eps2: p.epsilon * p.epsilon,
                eps_over_sigma2: p.epsilon / p.sigma2,
            },
            ModelParams::KDist(p) => Density::KDist {
                alpha: p.alpha,
                norm: 2.0 * LN_2 - 0.5 * (p.alpha + 1.0) * (2.0 * p.sigma2).ln() - ln_gamma(p.alpha),
                b: (2.0 / p.sigma2).sqrt(),
            },
            ModelParams::Nakagami(p) => Density::Nakagami {
                m: p.m,
                norm: LN_2 + p.m * (p.m / p.omega).ln() - ln_gamma(p.m),
                m_over_omega: p.m / p.omega,
            },
            ModelParams::Nig(p) => {
                // ln(λ^{θ/2} K_θ(√λ)); at λ = 0 the limit Γ(θ) 2^{θ-1}.
                let ln_mix_norm = if p.lambda == 0.0 {
                    ln_gamma(p.theta) + (p.theta - 1.0) * LN_2
                } else {
                    0.5 * p.theta * p.lambda.ln() + ln_bessel_k(p.theta, p.lambda.sqrt())
                };
                Density::Nig {
                    m: p.m,
                    theta: p.theta,
                    lambda: p.lambda,
                    norm: LN_2 + p.m * (p.m / p.omega).ln() - ln_mix_norm - ln_gamma(p.m),
                    two_m_over_omega: 2.0 * p.m / p.omega,
                }
            }
        }
    }

    /// ln p(x); −∞ for x ≤ 0.
    pub(crate) fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_pdf_with(x, ln_bessel_k)
    }

    /// Order and argument of the K_ν factor at amplitude x, for the models
    /// that have one.
    fn bessel_k_arg(&self, x: f64) -> Option<(f64, f64)> {
        match *self {
            Density::KDist { alpha, b, .. } => Some((alpha - 1.0, b * x)),
            Density::Nig {
                m,
                theta,
                lambda,
                two_m_over_omega,
                ..
            } => Some((theta - m, (lambda + two_m_over_omega * x * x).sqrt())),
            _ => None,
        }
    }

    fn ln_pdf_with(&self, x: f64, ln_k: impl Fn(f64, f64) -> f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_x = x.ln();
        let x2 = x * x;
        match *self {
            Density::Rayleigh { ln_sigma2, inv_2sigma2 } => ln_x - ln_sigma2 - x2 * inv_2sigma2,
            Density::Rician {
                ln_sigma2,
                inv_2sigma2,
                eps2,
                eps_over_sigma2,
            } => ln_x - ln_sigma2 - (eps2 + x2) * inv_2sigma2 + ln_bessel_i0(eps_over_sigma2 * x),
            Density::KDist { alpha, norm, b } => norm + alpha * ln_x + ln_k(alpha - 1.0, b * x),
            Density::Nakagami { m, norm, m_over_omega } => norm + (2.0 * m - 1.0) * ln_x - m_over_omega * x2,
            Density::Nig {
                m,
                theta,
                lambda,
                norm,
                two_m_over_omega,
            } => {
                let w = lambda + two_m_over_omega * x2;
                norm + (2.0 * m - 1.0) * ln_x + 0.5 * (theta - m) * w.ln() + ln_k(theta - m, w.sqrt())
            }
        }
    }
}

/// Density of the envelope model at amplitude `x`.
///
/// The support is taken as (0, ∞), so `pdf(·, 0) = 0` for every model.
pub fn pdf(params: &ModelParams, x: f64) -> Result<f64> {
    params.validate()?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::argument(format!("amplitude must be finite and ≥ 0, got {x}")));
    }
    Ok(params.density().ln_pdf(x).exp())
}

/// Natural log of the density; `-inf` where the density vanishes.
pub fn ln_pdf(params: &ModelParams, x: f64) -> Result<f64> {
    params.validate()?;
    Ok(params.density().ln_pdf(x))
}

/// Σ ln p(xᵢ). Returns `-inf` if any sample has zero density.
pub fn log_likelihood(params: &ModelParams, samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::argument("log-likelihood of an empty sample"));
    }
    if let Some(i) = samples.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
        return Err(Error::argument(format!(
            "sample {i} is {} (must be finite and ≥ 0)",
            samples[i]
        )));
    }
    params.validate()?;
    Ok(sum_ln_pdf(&params.density(), samples))
}

/// Sample count above which the K_ν factor is interpolated from a table
/// built once per evaluation instead of computed per sample.
const TABLE_MIN_SAMPLES: usize = 2048;

pub(crate) fn sum_ln_pdf(density: &Density, samples: &[f64]) -> f64 {
    if samples.len() >= TABLE_MIN_SAMPLES {
        let mut order = None;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for &x in samples.iter().filter(|&&x| x > 0.0) {
            if let Some((nu, z)) = density.bessel_k_arg(x) {
                order = Some(nu);
                lo = lo.min(z);
                hi = hi.max(z);
            }
        }
        if let Some(nu) = order {
            if lo > 0.0 && hi.is_finite() {
                let table = LnBesselKTable::new(nu, lo, hi);
                return samples
                    .iter()
                    .map(|&x| density.ln_pdf_with(x, |_, z| table.eval(z)))
                    .sum();
            }
        }
    }
    samples.iter().map(|&x| density.ln_pdf(x)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray(s: f64) -> ModelParams {
        ModelParams::Rayleigh(RayleighParams::new(s).unwrap())
    }

    fn nak(m: f64, o: f64) -> ModelParams {
        ModelParams::Nakagami(NakagamiParams::new(m, o).unwrap())
    }

    #[test]
    fn rayleigh_closed_form_at_one() {
        let v = pdf(&ray(1.0), 1.0).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn every_model_vanishes_at_zero() {
        let all = [
            ray(1.0),
            ModelParams::Rician(RicianParams::new(2.0, 0.5).unwrap()),
            ModelParams::KDist(KDistParams::new(3.0, 0.2).unwrap()),
            nak(0.7, 1.0),
            ModelParams::Nig(NigParams::new(1.2, 1.0, 2.0, 3.0).unwrap()),
        ];
        for p in all {
            assert_eq!(pdf(&p, 0.0).unwrap(), 0.0, "{:?}", p.kind());
        }
    }

    #[test]
    fn nakagami_m1_is_rayleigh() {
        assert!((pdf(&nak(1.0, 2.0), 1.0).unwrap() - pdf(&ray(1.0), 1.0).unwrap()).abs() < 1e-15);
        let xs = [0.1, 0.5, 1.0, 2.2, 4.0];
        let a = log_likelihood(&nak(1.0, 2.0), &xs).unwrap();
        let b = log_likelihood(&ray(1.0), &xs).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn log_likelihood_examples() {
        assert!((log_likelihood(&ray(1.0), &[1.0]).unwrap() + 0.5).abs() < 1e-15);
        let one = log_likelihood(&ray(2.0), &[1.3]).unwrap();
        let two = log_likelihood(&ray(2.0), &[1.3, 1.3]).unwrap();
        assert_eq!(two, 2.0 * one);
        assert_eq!(log_likelihood(&ray(1.0), &[0.0, 1.0]).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(log_likelihood(&ray(1.0), &[]), Err(Error::Argument(_))));
    }

    #[test]
    fn invalid_params_are_domain_errors() {
        assert!(matches!(RayleighParams::new(0.0), Err(Error::ParameterDomain(_))));
        assert!(matches!(RicianParams::new(-1.0, 1.0), Err(Error::ParameterDomain(_))));
        assert!(matches!(
            NigParams::new(1.0, 1.0, 1.0, -1e-3),
            Err(Error::ParameterDomain(_))
        ));
        let bad = ModelParams::Nakagami(NakagamiParams { m: -1.0, omega: 1.0 });
        assert!(matches!(pdf(&bad, 1.0), Err(Error::ParameterDomain(_))));
    }

    #[test]
    fn nig_zero_lambda_uses_limit_form() {
        let at_zero = ModelParams::Nig(NigParams::new(1.3, 1.0, 2.0, 0.0).unwrap());
        let near = ModelParams::Nig(NigParams::new(1.3, 1.0, 2.0, 1e-10).unwrap());
        for x in [0.2, 1.0, 3.0] {
            let a = pdf(&at_zero, x).unwrap();
            let b = pdf(&near, x).unwrap();
            assert!((a - b).abs() / a < 1e-6, "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert_eq!(ModelKind::Nig.param_count(), 4);
        assert_eq!(ModelKind::Rayleigh.param_count(), 1);
    }
}
