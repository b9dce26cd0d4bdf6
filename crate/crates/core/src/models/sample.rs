use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::ModelParams;
use crate::error::{Error, Result};

/// Draws `count` envelope amplitudes. Deterministic for a fixed `seed`.
pub fn sample(params: &ModelParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    if count == 0 {
        return Err(Error::argument("sample count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = match *params {
        ModelParams::Rayleigh(p) => {
            let sigma = p.sigma2.sqrt();
            (0..count)
                .map(|_| {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    sigma * (-2.0 * u.ln()).sqrt()
                })
                .collect()
        }
        ModelParams::Rician(p) => {
            let sigma = p.sigma2.sqrt();
            (0..count)
                .map(|_| {
                    let a: f64 = rng.sample(StandardNormal);
                    let b: f64 = rng.sample(StandardNormal);
                    (p.epsilon + sigma * a).hypot(sigma * b)
                })
                .collect()
        }
        ModelParams::KDist(p) => {
            // intensity = Gamma(α, 2σ²) × Exp(1)
            let texture = gamma(p.alpha, 2.0 * p.sigma2)?;
            (0..count)
                .map(|_| {
                    let g = texture.sample(&mut rng);
                    let e: f64 = rng.sample(Exp1);
                    (g * e).sqrt()
                })
                .collect()
        }
        ModelParams::Nakagami(p) => {
            let power = gamma(p.m, p.omega / p.m)?;
            (0..count).map(|_| power.sample(&mut rng).sqrt()).collect()
        }
        ModelParams::Nig(p) => {
            // Nakagami whose spread Ω·τ is mixed by τ ~ GIG(θ, 1, λ).
            let mixing = GigSampler::new(p.theta, p.lambda);
            (0..count)
                .map(|_| {
                    let tau = mixing.sample(&mut rng);
                    let power = gamma(p.m, p.omega * tau / p.m)?;
                    Ok(power.sample(&mut rng).sqrt())
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(out)
}

fn gamma(shape: f64, scale: f64) -> Result<Gamma<f64>> {
    Gamma::new(shape, scale).map_err(|e| Error::domain(format!("gamma({shape}, {scale}): {e}")))
}

/// Generalised inverse Gaussian GIG(p, a = 1, b) with density
/// ∝ τ^{p-1} exp(-(τ + b/τ)/2).
///
/// Sampled through s = ln τ, whose density exp(p·s − (eˢ + b·e⁻ˢ)/2) is
/// log-concave for every p, using ratio-of-uniforms with a mode shift.
/// b = 0 degenerates to Gamma(p, scale 2).
pub(crate) struct GigSampler {
    p: f64,
    b: f64,
    mode: f64,
    v_lo: f64,
    v_hi: f64,
}

impl GigSampler {
    pub(crate) fn new(p: f64, b: f64) -> Self {
        let mode = if b == 0.0 {
            // not used for the gamma case
            0.0
        } else {
            (p + (p * p + b).sqrt()).ln()
        };
        let mut g = GigSampler {
            p,
            b,
            mode,
            v_lo: 0.0,
            v_hi: 0.0,
        };
        if b > 0.0 {
            g.v_hi = g.v_extreme(1.0);
            g.v_lo = -g.v_extreme(-1.0);
        }
        g
    }

    /// Log-density of s relative to its value at the mode.
    fn h(&self, s: f64) -> f64 {
        let f = |s: f64| self.p * s - 0.5 * (s.exp() + self.b * (-s).exp());
        f(s) - f(self.mode)
    }

    /// max over y > 0 of y·exp(h(mode ± y)/2).
    fn v_extreme(&self, dir: f64) -> f64 {
        let obj = |y: f64| y.ln() + 0.5 * self.h(self.mode + dir * y);
        let mut hi = 1e-3;
        while obj(2.0 * hi) > obj(hi) {
            hi *= 2.0;
        }
        let (mut a, mut c) = (0.0_f64, 4.0 * hi);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let x1 = c - phi * (c - a);
            let x2 = a + phi * (c - a);
            if obj(x1) < obj(x2) {
                a = x1;
            } else {
                c = x2;
            }
        }
        let y = 0.5 * (a + c);
        // slight inflation covers the residual of the line search
        obj(y).exp() * (1.0 + 1e-9)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.b == 0.0 {
            return Gamma::new(self.p, 2.0).expect("p > 0").sample(rng);
        }
        loop {
            let u: f64 = rng.random::<f64>();
            if u == 0.0 {
                continue;
            }
            let v = self.v_lo + (self.v_hi - self.v_lo) * rng.random::<f64>();
            let s = v / u + self.mode;
            if 2.0 * u.ln() <= self.h(s) {
                return s.exp();
            }
        }
    }
}
