//! Sliding-window parametric maps.

use std::path::Path;

use ndarray::{s, Array2};
use rayon::prelude::*;

use crate::classifier::ClassLabel;
use crate::envelope::EnvelopeImage;
use crate::error::{Error, Result};
use crate::io::{container_paths, read_container, write_container, Header};
use crate::models::{fit_mle, moment_init_with, FitOptions, ModelKind, ModelParams};

/// Local estimation window in envelope samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WindowSpec {
    pub height: usize,
    pub width: usize,
    pub stride: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            height: 15,
            width: 15,
            stride: 1,
        }
    }
}

impl WindowSpec {
    pub fn new(height: usize, width: usize, stride: usize) -> Result<Self> {
        let w = WindowSpec { height, width, stride };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.height.is_multiple_of(2) || self.width.is_multiple_of(2) {
            return Err(Error::argument(format!(
                "window {}x{} must have odd sides",
                self.height, self.width
            )));
        }
        if self.stride == 0 {
            return Err(Error::argument("window stride must be at least 1"));
        }
        Ok(())
    }

    pub fn validate_for(&self, kind: ModelKind) -> Result<()> {
        self.validate()?;
        let need = 3 * kind.param_count();
        if self.area() < need {
            return Err(Error::argument(format!(
                "window area {} is below {need} samples required for {kind}",
                self.area()
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> usize {
        self.height * self.width
    }

    /// Map shape for an input of `rows × cols`; `None` when the window does not fit.
    pub fn output_shape(&self, rows: usize, cols: usize) -> Option<(usize, usize)> {
        (rows >= self.height && cols >= self.width).then(|| {
            (
                (rows - self.height) / self.stride + 1,
                (cols - self.width) / self.stride + 1,
            )
        })
    }
}

/// One estimated parameter over the envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricMap {
    pub values: Array2<f64>,
    pub parameter_name: String,
    pub kind: ModelKind,
    pub window: WindowSpec,
    pub frame_id: String,
    pub fit_failures: usize,
}

/// All parameter maps of one model over one envelope image.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricImageSet {
    pub kind: ModelKind,
    pub maps: Vec<ParametricMap>,
    pub frame_id: String,
    pub group_id: String,
    pub class_label: Option<ClassLabel>,
}

impl ParametricImageSet {
    pub fn shape(&self) -> (usize, usize) {
        self.maps[0].values.dim()
    }

    pub fn fit_failures(&self) -> usize {
        self.maps[0].fit_failures
    }
}

/// Fits `kind` in every window position on the stride grid.
///
/// A site whose fit fails takes its moment initializer instead and is
/// counted in `fit_failures`; a site whose window is constant takes
/// [`degenerate_site_params`].
pub fn generate_maps(
    envelope: &EnvelopeImage,
    kind: ModelKind,
    window: WindowSpec,
    options: &FitOptions,
) -> Result<ParametricImageSet> {
    window.validate_for(kind)?;
    options.validate()?;
    let (rows, cols) = envelope.shape();
    let (out_rows, out_cols) = window.output_shape(rows, cols).ok_or_else(|| {
        Error::argument(format!(
            "envelope {rows}x{cols} is smaller than window {}x{}",
            window.height, window.width
        ))
    })?;
    if let Some(((r, c), v)) = envelope
        .values
        .indexed_iter()
        .find(|(_, v)| !(**v >= 0.0) || !v.is_finite())
    {
        return Err(Error::argument(format!(
            "envelope value {v} at ({r}, {c}) is not a finite nonnegative number"
        )));
    }

    let sites: Vec<(Vec<f64>, bool)> = (0..out_rows * out_cols)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(window.area()),
            |buf, site| {
                let (i, j) = (site / out_cols * window.stride, site % out_cols * window.stride);
                buf.clear();
                buf.extend(
                    envelope
                        .values
                        .slice(s![i..i + window.height, j..j + window.width])
                        .iter(),
                );
                fit_site(kind, buf, options)
            },
        )
        .collect();

    let fit_failures = sites.iter().filter(|(_, ok)| !ok).count();
    let maps = kind
        .param_names()
        .iter()
        .enumerate()
        .map(|(p, name)| ParametricMap {
            values: Array2::from_shape_fn((out_rows, out_cols), |(r, c)| sites[r * out_cols + c].0[p]),
            parameter_name: (*name).to_string(),
            kind,
            window,
            frame_id: envelope.frame_id.clone(),
            fit_failures,
        })
        .collect();
    Ok(ParametricImageSet {
        kind,
        maps,
        frame_id: envelope.frame_id.clone(),
        group_id: envelope.group_id.clone(),
        class_label: envelope.class_label,
    })
}

fn fit_site(kind: ModelKind, window: &[f64], options: &FitOptions) -> (Vec<f64>, bool) {
    match fit_mle(kind, window, options) {
        Ok(p) => (p.values(), true),
        Err(_) => match moment_init_with(kind, window, options) {
            Ok(p) => (p.values(), false),
            Err(_) => (degenerate_site_params(kind, window, options).values(), false),
        },
    }
}

/// Parameters for a window with no spread: shape parameters at their upper
/// bound (a point mass is the infinitely concentrated limit) and the scale
/// matching the window's mean power.
pub fn degenerate_site_params(kind: ModelKind, window: &[f64], options: &FitOptions) -> ModelParams {
    let b = options.bounds(kind);
    let n = window.len().max(1) as f64;
    let power = (window.iter().map(|x| x * x).sum::<f64>() / n).max(1e-300);
    let clamp = |v: f64, i: usize| v.clamp(b.lower[i], b.upper[i]);
    let v = match kind {
        ModelKind::Rayleigh => vec![clamp(power / 2.0, 0)],
        ModelKind::Rician => vec![clamp(power.sqrt(), 0), clamp(power * 1e-12, 1)],
        ModelKind::KDist => {
            let alpha = b.upper[0];
            vec![alpha, clamp(power / (2.0 * alpha), 1)]
        }
        ModelKind::Nakagami => vec![b.upper[0], clamp(power, 1)],
        ModelKind::Nig => vec![b.upper[0], clamp(power, 1), clamp(1.0, 2), b.upper[3]],
    };
    let v: Vec<f64> = v.into_iter().map(|x| x.max(f64::MIN_POSITIVE)).collect();
    ModelParams::from_values(kind, &v).expect("values clamped into a valid domain")
}

/// Summary statistics of one map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStats {
    pub mean: f64,
    pub variance: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

pub fn map_stats(map: &ParametricMap) -> MapStats {
    let mut v: Vec<f64> = map.values.iter().copied().collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let variance = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    };
    MapStats {
        mean,
        variance,
        median,
        min: v[0],
        max: v[v.len() - 1],
    }
}

pub fn save_map(map: &ParametricMap, path: &Path, extra: &[(String, String)]) -> Result<()> {
    let mut h = Header::new();
    h.set("kind", map.kind.name())
        .set("parameter_name", &map.parameter_name)
        .set("window_height", map.window.height)
        .set("window_width", map.window.width)
        .set("stride", map.window.stride)
        .set("fit_failures", map.fit_failures)
        .set("frame_id", &map.frame_id)
        .extend(extra);
    write_container(path, &h, &map.values)
}

pub fn load_map(path: &Path) -> Result<ParametricMap> {
    let (hdr_path, _) = container_paths(path);
    let (h, values) = read_container(path)?;
    let kind: ModelKind = h.parse_field(&hdr_path, "kind")?;
    let parameter_name: String = h.parse_field(&hdr_path, "parameter_name")?;
    if !kind.param_names().contains(&parameter_name.as_str()) {
        return Err(Error::format(
            &hdr_path,
            format!("header field 'parameter_name': {kind} has no parameter '{parameter_name}'"),
        ));
    }
    let window = WindowSpec {
        height: h.parse_field(&hdr_path, "window_height")?,
        width: h.parse_field(&hdr_path, "window_width")?,
        stride: h.parse_field(&hdr_path, "stride")?,
    };
    window.validate().map_err(|e| Error::format(&hdr_path, e.to_string()))?;
    Ok(ParametricMap {
        values,
        parameter_name,
        kind,
        window,
        frame_id: h.parse_field(&hdr_path, "frame_id")?,
        fit_failures: h.parse_field(&hdr_path, "fit_failures")?,
    })
}
