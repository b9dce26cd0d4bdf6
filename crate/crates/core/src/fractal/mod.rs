//! Fractal dimension and lacunarity of parametric maps over wavelet-packet
//! subbands.

mod features;
mod table;
mod wavelet;

pub use features::{
    extract_features, feature_names, mean_node_scores, node_fractal_dimensions, select_basis, select_basis_from_scores,
    BasisPolicy, BasisSelection, FeatureVector, NodeScores,
};
pub use table::FeatureTable;
pub use wavelet::{reconstruct, wpt_decompose, NodeId, WaveletPacketTree, DB4};

use ndarray::{s, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Increment lags of the variogram regression.
pub const LAGS: [usize; 4] = [1, 2, 4, 8];

/// Smallest patch side accepted by [`fractal_dimension`].
pub const MIN_PATCH: usize = 8;

/// Box side of the local-dimension image used for lacunarity.
pub const FRACTAL_BOX: usize = 8;

/// Dimension reported for subbands with no texture.
pub const SENTINEL_FD: f64 = 2.0;

/// Surface fractal dimension estimated through the fBm Hurst exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractalEstimate {
    /// In [2, 3]; always `3 - hurst`.
    pub fd: f64,
    /// In [0, 1].
    pub hurst: f64,
    pub regression_r2: f64,
}

/// Self-similarity dimension ln(N_s) / ln(1/s).
pub fn eq6(n_s: f64, s: f64) -> Result<f64> {
    if !(n_s > 0.0) || !(s > 0.0 && s < 1.0) {
        return Err(Error::argument(format!(
            "need N_s > 0 and 0 < s < 1, got N_s = {n_s}, s = {s}"
        )));
    }
    Ok(n_s.ln() / (1.0 / s).ln())
}

/// Regresses ln E|I(p) − I(p')| on ln |p − p'| over the lags in [`LAGS`]
/// shorter than the patch, pooling axial and lateral pairs.
pub fn fractal_dimension(patch: ArrayView2<f64>) -> Result<FractalEstimate> {
    let (rows, cols) = patch.dim();
    if rows < MIN_PATCH || cols < MIN_PATCH {
        return Err(Error::argument(format!(
            "patch {rows}x{cols} is smaller than {MIN_PATCH}x{MIN_PATCH}"
        )));
    }
    let first = patch[[0, 0]];
    if patch.iter().all(|&v| v == first) {
        return Err(Error::degenerate("constant patch"));
    }
    let mut xs = [0.0; LAGS.len()];
    let mut ys = [0.0; LAGS.len()];
    let mut n = 0;
    for &d in LAGS.iter().filter(|&&d| d < rows.min(cols)) {
        let axial = patch.slice(s![d.., ..]).to_owned() - patch.slice(s![..rows - d, ..]);
        let lateral = patch.slice(s![.., d..]).to_owned() - patch.slice(s![.., ..cols - d]);
        let count = (axial.len() + lateral.len()) as f64;
        let mean = (axial.iter().map(|v| v.abs()).sum::<f64>() + lateral.iter().map(|v| v.abs()).sum::<f64>()) / count;
        if !(mean > 0.0) {
            return Err(Error::degenerate(format!("no increments at lag {d}")));
        }
        xs[n] = (d as f64).ln();
        ys[n] = mean.ln();
        n += 1;
    }
    let (slope, r2) = least_squares(&xs[..n], &ys[..n]);
    let hurst = slope.clamp(0.0, 1.0);
    Ok(FractalEstimate {
        fd: 3.0 - hurst,
        hurst,
        regression_r2: r2,
    })
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (slope, r2)
}

/// Local fractal dimension in every `box_size` × `box_size` window (stride 1).
/// Constant windows take [`SENTINEL_FD`].
pub fn fractal_image(patch: ArrayView2<f64>, box_size: usize) -> Result<Array2<f64>> {
    if box_size < MIN_PATCH {
        return Err(Error::argument(format!("box size {box_size} is below {MIN_PATCH}")));
    }
    let (rows, cols) = patch.dim();
    if rows < box_size || cols < box_size {
        return Err(Error::argument(format!(
            "patch {rows}x{cols} is smaller than the {box_size}x{box_size} box"
        )));
    }
    let (out_r, out_c) = (rows - box_size + 1, cols - box_size + 1);
    let mut out = Array2::zeros((out_r, out_c));
    for ((i, j), v) in out.indexed_iter_mut() {
        let window = patch.slice(s![i..i + box_size, j..j + box_size]);
        *v = match fractal_dimension(window) {
            Ok(e) => e.fd,
            Err(Error::DegenerateData(_)) => SENTINEL_FD,
            Err(e) => return Err(e),
        };
    }
    Ok(out)
}

/// Global lacunarity mean(F²) / mean(F)² − 1 of a nonnegative image.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LacunarityValue(pub f64);

impl LacunarityValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn lacunarity(image: ArrayView2<f64>) -> Result<LacunarityValue> {
    if image.is_empty() {
        return Err(Error::argument("empty image"));
    }
    if let Some(v) = image.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::argument(format!(
            "lacunarity needs finite nonnegative values, found {v}"
        )));
    }
    let n = image.len() as f64;
    let mean = image.sum() / n;
    if !(mean > 0.0) {
        return Err(Error::degenerate("image has zero mean"));
    }
    let first = image.iter().next().copied().unwrap_or(0.0);
    if image.iter().all(|&v| v == first) {
        return Ok(LacunarityValue(0.0));
    }
    let second = image.iter().map(|v| v * v).sum::<f64>() / n;
    Ok(LacunarityValue((second / (mean * mean) - 1.0).max(0.0)))
}
