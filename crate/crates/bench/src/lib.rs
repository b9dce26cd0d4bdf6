//! Benchmark fixtures over the core crate.

pub use qus_core::*;

use ndarray::Array2;

/// Envelope image of independent Rayleigh draws.
pub fn rayleigh_envelope(rows: usize, cols: usize, seed: u64) -> EnvelopeImage {
    let p = ModelParams::from_values(ModelKind::Rayleigh, &[1.0]).expect("valid parameters");
    let v = sample(&p, rows * cols, seed).expect("sampling succeeds");
    EnvelopeImage {
        values: Array2::from_shape_vec((rows, cols), v).expect("shape matches"),
        frame_id: "bench".into(),
        group_id: "bench".into(),
        class_label: None,
    }
}
