//! Point-scatterer RF phantoms spanning the pre-Rayleigh, Rayleigh and
//! post-Rayleigh envelope regimes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use rayon::prelude::*;

use crate::classifier::ClassLabel;
use crate::envelope::RfFrame;
use crate::error::{Error, Result};
use crate::seed::{derive_seed, stream_rng};

/// Sampling rate written into synthesized frames.
pub const SAMPLING_RATE_HZ: f64 = 11e6;

/// Resolution cells required along each axis.
pub const MIN_CELLS: f64 = 20.0;

const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;
const KERNEL_SIGMAS: f64 = 4.0;

/// Separable Gaussian-modulated sinusoidal point-spread function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Psf {
    /// Full width at half maximum of the axial envelope, in samples.
    pub pulse_length: f64,
    /// Full width at half maximum of the beam profile, in scan lines.
    pub lateral_width: f64,
    /// Carrier frequency in cycles per sample.
    pub center_frequency: f64,
}

impl Default for Psf {
    fn default() -> Self {
        Psf {
            pulse_length: 8.0,
            lateral_width: 2.0,
            center_frequency: 4.0 / 11.0,
        }
    }
}

impl Psf {
    pub fn cell_area(&self) -> f64 {
        self.pulse_length * self.lateral_width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSpec {
    pub rows: usize,
    pub cols: usize,
    /// Mean scatterers per resolution cell.
    pub density: f64,
    /// Coherent amplitude over the RMS diffuse envelope amplitude.
    pub coherent_ratio: f64,
    /// Axial distance between aligned scatterer planes, in samples.
    pub periodic_spacing: Option<f64>,
    /// Variance of the (unit-mean, lognormal) scatterer amplitudes.
    pub amplitude_variance: f64,
    pub psf: Psf,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        PhantomSpec {
            rows: 256,
            cols: 128,
            density: 20.0,
            coherent_ratio: 0.0,
            periodic_spacing: None,
            amplitude_variance: 0.0,
            psf: Psf::default(),
            seed: 0,
        }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        let p = &self.psf;
        let bad = |msg: String| Err(Error::argument(msg));
        if !(self.density > 0.0) || !self.density.is_finite() {
            return bad(format!("density must be positive, got {}", self.density));
        }
        if !(self.coherent_ratio >= 0.0) || !self.coherent_ratio.is_finite() {
            return bad(format!("coherent_ratio must be ≥ 0, got {}", self.coherent_ratio));
        }
        if !(self.amplitude_variance >= 0.0) || !self.amplitude_variance.is_finite() {
            return bad(format!(
                "amplitude_variance must be ≥ 0, got {}",
                self.amplitude_variance
            ));
        }
        if let Some(s) = self.periodic_spacing {
            if !(s > 0.0) || !s.is_finite() {
                return bad(format!("periodic_spacing must be positive, got {s}"));
            }
        }
        if !(p.pulse_length > 0.0) || !(p.lateral_width > 0.0) {
            return bad("pulse length and lateral width must be positive".into());
        }
        if !(p.center_frequency > 0.0 && p.center_frequency < 0.5) {
            return bad(format!(
                "center frequency {} must lie in (0, 0.5) cycles/sample",
                p.center_frequency
            ));
        }
        if (self.rows as f64) < MIN_CELLS * p.pulse_length || (self.cols as f64) < MIN_CELLS * p.lateral_width {
            return bad(format!(
                "grid {}x{} holds fewer than {MIN_CELLS}x{MIN_CELLS} resolution cells of {}x{}",
                self.rows, self.cols, p.pulse_length, p.lateral_width
            ));
        }
        Ok(())
    }

    /// Regime label by convention: a coherent ratio of at least 1 or
    /// periodic planes is post-Rayleigh; otherwise fewer than 10 scatterers
    /// per cell is pre-Rayleigh.
    pub fn regime(&self) -> Regime {
        if self.coherent_ratio >= 1.0 || self.periodic_spacing.is_some() {
            Regime::PostRayleigh
        } else if self.density < 10.0 {
            Regime::PreRayleigh
        } else {
            Regime::Rayleigh
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    PreRayleigh,
    Rayleigh,
    PostRayleigh,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::PreRayleigh => "pre-rayleigh",
            Regime::Rayleigh => "rayleigh",
            Regime::PostRayleigh => "post-rayleigh",
        }
    }
}

/// Point scatterer position (samples, lines) and amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    pub axial: f64,
    pub lateral: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomTruth {
    pub spec: PhantomSpec,
    pub regime: Regime,
    pub scatterers: Vec<Scatterer>,
    /// Amplitude of the added coherent carrier.
    pub coherent_amplitude: f64,
}

/// Renders the frame for `spec`. Frame metadata ids are left empty.
pub fn synthesize(spec: &PhantomSpec) -> Result<(RfFrame, PhantomTruth)> {
    spec.validate()?;
    let psf = spec.psf;
    let sigma_t = psf.pulse_length / FWHM_PER_SIGMA;
    let sigma_x = psf.lateral_width / FWHM_PER_SIGMA;
    let (mt, mx) = (KERNEL_SIGMAS * sigma_t, KERNEL_SIGMAS * sigma_x);
    let (z0, z1) = (-mt, spec.rows as f64 + mt);
    let (x0, x1) = (-mx, spec.cols as f64 + mx);

    let mut rng = stream_rng(spec.seed, 0);
    let expected = spec.density * (z1 - z0) * (x1 - x0) / psf.cell_area();
    let count = Poisson::new(expected)
        .map_err(|e| Error::argument(format!("scatterer count: {e}")))?
        .sample(&mut rng) as usize;
    let amp = amplitude_sampler(spec.amplitude_variance)?;
    let mut scatterers: Vec<Scatterer> = (0..count)
        .map(|_| Scatterer {
            axial: rng.random_range(z0..z1),
            lateral: rng.random_range(x0..x1),
            amplitude: amp.sample(&mut rng),
        })
        .collect();
    if let Some(spacing) = spec.periodic_spacing {
        let offset = rng.random_range(0.0..spacing);
        let lateral_step = 0.5;
        let mut z = z0 + offset;
        while z < z1 {
            let mut x = x0;
            while x < x1 {
                scatterers.push(Scatterer {
                    axial: z,
                    lateral: x,
                    amplitude: amp.sample(&mut rng),
                });
                x += lateral_step;
            }
            z += spacing;
        }
    }

    let mut rf = render(spec, &scatterers, sigma_t, sigma_x);
    let coherent_amplitude = if spec.coherent_ratio > 0.0 {
        let rms = (rf.iter().map(|v| v * v).sum::<f64>() / rf.len() as f64).sqrt();
        let a = spec.coherent_ratio * std::f64::consts::SQRT_2 * rms;
        let w = 2.0 * std::f64::consts::PI * psf.center_frequency;
        for ((t, _), v) in rf.indexed_iter_mut() {
            *v += a * (w * t as f64).cos();
        }
        a
    } else {
        0.0
    };
    let frame = RfFrame::new(
        rf,
        SAMPLING_RATE_HZ,
        psf.center_frequency * SAMPLING_RATE_HZ,
        "",
        "",
        None,
    )?;
    Ok((
        frame,
        PhantomTruth {
            spec: spec.clone(),
            regime: spec.regime(),
            scatterers,
            coherent_amplitude,
        },
    ))
}

fn amplitude_sampler(variance: f64) -> Result<LogNormal<f64>> {
    // unit mean: mu = -s²/2 with s² = ln(1 + variance)
    let s2 = variance.ln_1p();
    LogNormal::new(-s2 / 2.0, s2.sqrt()).map_err(|e| Error::argument(format!("amplitude distribution: {e}")))
}

fn render(spec: &PhantomSpec, scatterers: &[Scatterer], sigma_t: f64, sigma_x: f64) -> Array2<f64> {
    let (rows, cols) = (spec.rows, spec.cols);
    let w = 2.0 * std::f64::consts::PI * spec.psf.center_frequency;
    let (mt, mx) = (KERNEL_SIGMAS * sigma_t, KERNEL_SIGMAS * sigma_x);
    let mut rf = Array2::<f64>::zeros((rows, cols));
    let mut axial = Vec::new();
    for s in scatterers {
        let t_lo = (s.axial - mt).ceil().max(0.0) as usize;
        let t_hi = ((s.axial + mt).floor() as isize).min(rows as isize - 1);
        let x_lo = (s.lateral - mx).ceil().max(0.0) as usize;
        let x_hi = ((s.lateral + mx).floor() as isize).min(cols as isize - 1);
        if t_hi < t_lo as isize || x_hi < x_lo as isize {
            continue;
        }
        axial.clear();
        axial.extend((t_lo..=t_hi as usize).map(|t| {
            let d = t as f64 - s.axial;
            s.amplitude * (-d * d / (2.0 * sigma_t * sigma_t)).exp() * (w * d).cos()
        }));
        for x in x_lo..=x_hi as usize {
            let d = x as f64 - s.lateral;
            let g = (-d * d / (2.0 * sigma_x * sigma_x)).exp();
            for (k, a) in axial.iter().enumerate() {
                rf[[t_lo + k, x]] += a * g;
            }
        }
    }
    rf
}

/// Two-class labelled dataset. Class A is labelled respondent, class B
/// non-respondent; frames are dealt round-robin to `groups_per_class`
/// groups per class. Ids are `a-f000`, `a-g00`, … and `b-…`.
pub fn make_dataset(
    class_a: &PhantomSpec,
    class_b: &PhantomSpec,
    frames_per_class: usize,
    groups_per_class: usize,
    seed: u64,
) -> Result<Vec<(RfFrame, PhantomTruth)>> {
    if frames_per_class == 0 || groups_per_class == 0 || groups_per_class > frames_per_class {
        return Err(Error::argument(format!(
            "need 1 ≤ groups_per_class ≤ frames_per_class, got {groups_per_class} groups for {frames_per_class} frames"
        )));
    }
    let jobs: Vec<(usize, usize)> = (0..2)
        .flat_map(|c| (0..frames_per_class).map(move |i| (c, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(c, i)| {
            let (base, tag, label) = if c == 0 {
                (class_a, "a", ClassLabel::Respondent)
            } else {
                (class_b, "b", ClassLabel::NonRespondent)
            };
            let spec = PhantomSpec {
                seed: derive_seed(seed, (c * frames_per_class + i) as u64 + 1),
                ..base.clone()
            };
            let (mut frame, truth) = synthesize(&spec)?;
            frame.frame_id = format!("{tag}-f{i:03}");
            frame.group_id = format!("{tag}-g{:02}", i % groups_per_class);
            frame.class_label = Some(label);
            Ok((frame, truth))
        })
        .collect()
}

/// `key=value` sidecar with the spec, regime and every scatterer.
pub fn truth_to_text(truth: &PhantomTruth) -> String {
    let s = &truth.spec;
    let mut out = String::new();
    let _ = writeln!(out, "rows={}", s.rows);
    let _ = writeln!(out, "cols={}", s.cols);
    let _ = writeln!(out, "density={}", s.density);
    let _ = writeln!(out, "coherent_ratio={}", s.coherent_ratio);
    let _ = writeln!(
        out,
        "periodic_spacing={}",
        s.periodic_spacing.map_or("none".into(), |v| v.to_string())
    );
    let _ = writeln!(out, "amplitude_variance={}", s.amplitude_variance);
    let _ = writeln!(out, "pulse_length={}", s.psf.pulse_length);
    let _ = writeln!(out, "lateral_width={}", s.psf.lateral_width);
    let _ = writeln!(out, "center_frequency={}", s.psf.center_frequency);
    let _ = writeln!(out, "seed={}", s.seed);
    let _ = writeln!(out, "regime={}", truth.regime.name());
    let _ = writeln!(out, "coherent_amplitude={}", truth.coherent_amplitude);
    let _ = writeln!(out, "scatterer_count={}", truth.scatterers.len());
    for p in &truth.scatterers {
        let _ = writeln!(out, "scatterer={},{},{}", p.axial, p.lateral, p.amplitude);
    }
    out
}

pub fn write_truth(truth: &PhantomTruth, path: &Path, extra: &[(String, String)]) -> Result<()> {
    let mut text = String::new();
    for (k, v) in extra {
        let _ = writeln!(text, "{k}={v}");
    }
    text.push_str(&truth_to_text(truth));
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
