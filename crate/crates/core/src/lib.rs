//! Envelope statistics, parametric maps, fractal texture features and
//! naive Bayes classification for ultrasound RF data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod envelope;
pub mod error;
pub mod fractal;
pub mod io;
pub mod models;
pub mod parametric;
pub mod phantom;
pub mod pipeline;
pub mod seed;
pub mod special;

pub use classifier::ClassLabel;
pub use envelope::{detect_envelope, EnvelopeImage, RfFrame};
pub use error::{Error, Result};
pub use models::{fit_mle, log_likelihood, moment_init, pdf, sample, FitOptions, ModelKind, ModelParams};
