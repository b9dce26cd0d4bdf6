//! RF frames and envelope detection.
//!
//! Each scan line (a column of the RF matrix) is demodulated independently:
//! the envelope is the magnitude of the analytic signal, obtained by zeroing
//! the negative-frequency half of the line's spectrum. No log compression,
//! gain compensation or lateral filtering is applied.

use ndarray::{Array2, Axis};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::classifier::ClassLabel;
use crate::error::{Error, Result};

/// Shortest scan line the demodulator accepts.
pub const MIN_LINE_SAMPLES: usize = 8;

/// Raw beamformed RF data, axial samples × scan lines.
#[derive(Debug, Clone, PartialEq)]
pub struct RfFrame {
    pub samples: Array2<f64>,
    pub sampling_rate_hz: f64,
    pub center_frequency_hz: f64,
    pub frame_id: String,
    /// Tumor / patient grouping used for leakage-free cross-validation.
    pub group_id: String,
    pub class_label: Option<ClassLabel>,
}

impl RfFrame {
    pub fn new(
        samples: Array2<f64>,
        sampling_rate_hz: f64,
        center_frequency_hz: f64,
        frame_id: impl Into<String>,
        group_id: impl Into<String>,
        class_label: Option<ClassLabel>,
    ) -> Result<Self> {
        let frame = RfFrame {
            samples,
            sampling_rate_hz,
            center_frequency_hz,
            frame_id: frame_id.into(),
            group_id: group_id.into(),
            class_label,
        };
        frame.validate()?;
        Ok(frame)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::argument("RF frame is empty"));
        }
        if !(self.center_frequency_hz > 0.0) || !(self.sampling_rate_hz > 2.0 * self.center_frequency_hz) {
            return Err(Error::argument(format!(
                "sampling rate {} Hz must exceed twice the center frequency {} Hz",
                self.sampling_rate_hz, self.center_frequency_hz
            )));
        }
        if let Some(((r, c), v)) = self.samples.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::argument(format!("non-finite RF sample {v} at ({r}, {c})")));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        self.samples.dim()
    }
}

/// Envelope magnitudes with the same shape as the source frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeImage {
    pub values: Array2<f64>,
    pub frame_id: String,
    pub group_id: String,
    pub class_label: Option<ClassLabel>,
}

impl EnvelopeImage {
    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }
}

/// Magnitude of the analytic signal of every scan line.
pub fn detect_envelope(frame: &RfFrame) -> Result<EnvelopeImage> {
    frame.validate()?;
    let (rows, cols) = frame.shape();
    if rows < MIN_LINE_SAMPLES {
        return Err(Error::argument(format!(
            "scan lines have {rows} samples; at least {MIN_LINE_SAMPLES} required"
        )));
    }
    let fft = {
        let mut planner = FftPlanner::<f64>::new();
        (planner.plan_fft_forward(rows), planner.plan_fft_inverse(rows))
    };
    let lines: Vec<Vec<f64>> = (0..cols)
        .into_par_iter()
        .map(|c| {
            let line: Vec<f64> = frame.samples.column(c).to_vec();
            analytic_magnitude(&line, &fft.0, &fft.1)
        })
        .collect();
    let mut values = Array2::<f64>::zeros((rows, cols));
    for (c, line) in lines.into_iter().enumerate() {
        values.index_axis_mut(Axis(1), c).assign(&ndarray::Array1::from(line));
    }
    Ok(EnvelopeImage {
        values,
        frame_id: frame.frame_id.clone(),
        group_id: frame.group_id.clone(),
        class_label: frame.class_label,
    })
}

fn analytic_magnitude(
    line: &[f64],
    forward: &std::sync::Arc<dyn rustfft::Fft<f64>>,
    inverse: &std::sync::Arc<dyn rustfft::Fft<f64>>,
) -> Vec<f64> {
    let n = line.len();
    let mut buf: Vec<Complex<f64>> = line.iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward.process(&mut buf);
    // one-sided spectrum: keep DC (and Nyquist), double positive frequencies
    let half = n / 2;
    for (k, v) in buf.iter_mut().enumerate() {
        let gain = if k == 0 || (n.is_multiple_of(2) && k == half) {
            1.0
        } else if k < n.div_ceil(2) {
            2.0
        } else {
            0.0
        };
        *v *= gain;
    }
    inverse.process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|z| z.norm() * scale).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn frame(samples: Array2<f64>) -> RfFrame {
        RfFrame::new(samples, 11e6, 4e6, "f", "g", None).unwrap()
    }

    fn tone(n: usize, cycles_per_sample: f64, amp: impl Fn(usize) -> f64) -> Array2<f64> {
        Array2::from_shape_fn((n, 3), |(t, _)| {
            amp(t) * (2.0 * PI * cycles_per_sample * t as f64).cos()
        })
    }

    fn interior(n: usize) -> std::ops::Range<usize> {
        n / 10..n - n / 10
    }

    #[test]
    fn pure_tone_has_flat_envelope() {
        let n = 512;
        let env = detect_envelope(&frame(tone(n, 0.2, |_| 3.0))).unwrap();
        for t in interior(n) {
            for c in 0..3 {
                assert!((env.values[[t, c]] - 3.0).abs() / 3.0 < 0.02);
            }
        }
    }

    #[test]
    fn ramp_modulation_is_recovered() {
        let n = 1024;
        let amp = |t: usize| 1.0 + 2.0 * t as f64 / n as f64;
        let env = detect_envelope(&frame(tone(n, 0.23, amp))).unwrap();
        for t in interior(n) {
            let want = amp(t);
            assert!((env.values[[t, 1]] - want).abs() / want < 0.02, "t={t}");
        }
    }

    #[test]
    fn zero_frame_gives_zero_envelope() {
        let env = detect_envelope(&frame(Array2::zeros((64, 4)))).unwrap();
        assert!(env.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sign_flip_invariance() {
        let f = frame(Array2::from_shape_fn((100, 5), |(t, c)| {
            ((t * 7 + c * 13) % 17) as f64 - 8.0
        }));
        let neg = frame(f.samples.mapv(|v| -v));
        let a = detect_envelope(&f).unwrap();
        let b = detect_envelope(&neg).unwrap();
        for (x, y) in a.values.iter().zip(b.values.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(a.shape(), f.shape());
    }

    #[test]
    fn short_lines_rejected() {
        assert!(matches!(
            detect_envelope(&frame(Array2::zeros((7, 4)))),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn frame_validation() {
        assert!(RfFrame::new(Array2::zeros((16, 2)), 8e6, 4e6, "f", "g", None).is_err());
        assert!(RfFrame::new(Array2::zeros((0, 2)), 11e6, 4e6, "f", "g", None).is_err());
    }
}
