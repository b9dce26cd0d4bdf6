//! Config file and flag handling.
//!
//! The config file holds UTF-8 `section.key=value` lines; `#` starts a
//! comment. Command-line flags override the matching keys.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use qus_core::classifier::CvScheme;
use qus_core::models::FitOptions;
use qus_core::parametric::WindowSpec;
use qus_core::phantom::PhantomSpec;
use qus_core::pipeline::{hash_text, BasisChoice, PipelineConfig};

pub const PHANTOM_FIELDS: &[&str] = &[
    "rows",
    "cols",
    "density",
    "coherent_ratio",
    "periodic_spacing",
    "amplitude_variance",
    "pulse_length",
    "lateral_width",
    "center_frequency",
];

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct AppConfig {
    pub pipeline: PipelineConfig,
    pub class_a: PhantomSpec,
    pub class_b: PhantomSpec,
    pub frames_per_class: usize,
    pub groups_per_class: usize,
    pub simulate_seed: u64,
    pub threads: Option<usize>,
    pub save_maps: bool,
}

impl AppConfig {
    pub fn input_dir(&self) -> Result<&Path> {
        self.pipeline
            .input_dir
            .as_deref()
            .ok_or_else(|| anyhow!("no input directory (use --in or io.in)"))
    }

    pub fn output_dir(&self) -> Result<&Path> {
        self.pipeline
            .output_dir
            .as_deref()
            .ok_or_else(|| anyhow!("no output directory (use --out or io.out)"))
    }

    /// Hash of everything that determines the simulated dataset.
    pub fn simulate_hash(&self) -> String {
        let mut text = format!(
            "frames_per_class={}\ngroups_per_class={}\nseed={}\n",
            self.frames_per_class, self.groups_per_class, self.simulate_seed
        );
        for (tag, s) in [("a", &self.class_a), ("b", &self.class_b)] {
            text.push_str(&format!("{tag}={s:?}\n"));
        }
        hash_text(&text)
    }
}

/// Demo classes: fully developed speckle versus sparse scatterers.
pub fn default_phantoms() -> (PhantomSpec, PhantomSpec) {
    let a = PhantomSpec {
        density: 20.0,
        ..PhantomSpec::default()
    };
    let b = PhantomSpec {
        density: 0.5,
        ..PhantomSpec::default()
    };
    (a, b)
}

pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), i + 1))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| anyhow!("{key}: invalid value '{v}': {e}"))
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(|s| parse(key, s.trim())).collect()
}

/// `HxW` or `HxW/S`.
pub fn parse_window(v: &str) -> Result<(usize, usize, Option<usize>)> {
    let (dims, stride) = match v.split_once('/') {
        Some((d, s)) => (d, Some(parse("window stride", s)?)),
        None => (v, None),
    };
    let (h, w) = dims
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("window '{v}' must look like 15x15 or 15x15/1"))?;
    Ok((parse("window height", h)?, parse("window width", w)?, stride))
}

/// Resolves `settings` (config file merged with flags) into an [`AppConfig`].
pub fn resolve(settings: &BTreeMap<String, String>) -> Result<AppConfig> {
    let mut pipeline = PipelineConfig::default();
    let (mut class_a, mut class_b) = default_phantoms();
    let mut cfg_frames = 10;
    let mut cfg_groups = 5;
    let mut simulate_seed = 0;
    let mut threads = None;
    let mut save_maps = false;
    let mut window = pipeline.window;
    let mut cv_schemes: Vec<String> = vec!["logo".into(), "kfold".into()];
    let mut ks: Vec<usize> = vec![10];
    let mut fit = FitOptions::default();

    for (key, v) in settings {
        let key = key.as_str();
        if let Some(rest) = key.strip_prefix("phantom.") {
            let (tag, field) = rest
                .split_once('.')
                .ok_or_else(|| anyhow!("unknown config key '{key}'"))?;
            let spec = match tag {
                "a" => &mut class_a,
                "b" => &mut class_b,
                _ => bail!("unknown config key '{key}' (phantom classes are a and b)"),
            };
            set_phantom_field(spec, field, v).with_context(|| format!("config key '{key}'"))?;
            continue;
        }
        match key {
            "pipeline.model" => pipeline.kinds = parse_list(key, v)?,
            "pipeline.window" => {
                let (h, w, s) = parse_window(v)?;
                window.height = h;
                window.width = w;
                if let Some(s) = s {
                    window.stride = s;
                }
            }
            "pipeline.stride" => window.stride = parse(key, v)?,
            "pipeline.depth" => pipeline.depth = parse(key, v)?,
            "pipeline.basis" => pipeline.basis = parse::<BasisChoice>(key, v)?,
            "pipeline.max_iterations" => fit.max_iterations = parse(key, v)?,
            "pipeline.tolerance" => fit.tolerance = parse(key, v)?,
            "pipeline.threads" => threads = Some(parse(key, v)?).filter(|&t: &usize| t > 0),
            "pipeline.save_maps" => save_maps = parse(key, v)?,
            "cv.scheme" => cv_schemes = v.split(',').map(|s| s.trim().to_string()).collect(),
            "cv.k" => ks = parse_list(key, v)?,
            "cv.repeats" => pipeline.repeats = parse(key, v)?,
            "cv.seed" => pipeline.seed = parse(key, v)?,
            "cv.stratified" => pipeline.stratified = parse(key, v)?,
            "io.in" => pipeline.input_dir = Some(PathBuf::from(v)),
            "io.out" => pipeline.output_dir = Some(PathBuf::from(v)),
            "simulate.frames_per_class" => cfg_frames = parse(key, v)?,
            "simulate.groups_per_class" => cfg_groups = parse(key, v)?,
            "simulate.seed" => simulate_seed = parse(key, v)?,
            _ => bail!("unknown config key '{key}'"),
        }
    }
    pipeline.window = WindowSpec::new(window.height, window.width, window.stride)?;
    pipeline.fit = fit;
    pipeline.schemes = Vec::new();
    for s in &cv_schemes {
        match s.as_str() {
            "logo" | "leave-one-group-out" => pipeline.schemes.push(CvScheme::LeaveOneGroupOut),
            "kfold" | "k-fold" => pipeline.schemes.extend(ks.iter().map(|&k| CvScheme::KFold { k })),
            other => bail!("cv.scheme: unknown scheme '{other}' (logo|kfold)"),
        }
    }
    if pipeline.schemes.is_empty() {
        bail!("cv.scheme: no cross-validation scheme configured");
    }
    pipeline.validate()?;
    class_a.validate().context("phantom.a")?;
    class_b.validate().context("phantom.b")?;
    if cfg_frames == 0 || cfg_groups == 0 || cfg_groups > cfg_frames {
        bail!("simulate: need 1 ≤ groups_per_class ≤ frames_per_class");
    }
    Ok(AppConfig {
        pipeline,
        class_a,
        class_b,
        frames_per_class: cfg_frames,
        groups_per_class: cfg_groups,
        simulate_seed,
        threads,
        save_maps,
    })
}

fn set_phantom_field(spec: &mut PhantomSpec, field: &str, v: &str) -> Result<()> {
    match field {
        "rows" => spec.rows = parse(field, v)?,
        "cols" => spec.cols = parse(field, v)?,
        "density" => spec.density = parse(field, v)?,
        "coherent_ratio" => spec.coherent_ratio = parse(field, v)?,
        "periodic_spacing" => {
            spec.periodic_spacing = match v {
                "none" | "" => None,
                s => Some(parse(field, s)?),
            }
        }
        "amplitude_variance" => spec.amplitude_variance = parse(field, v)?,
        "pulse_length" => spec.psf.pulse_length = parse(field, v)?,
        "lateral_width" => spec.psf.lateral_width = parse(field, v)?,
        "center_frequency" => spec.psf.center_frequency = parse(field, v)?,
        other => bail!("unknown phantom field '{other}' (one of {})", PHANTOM_FIELDS.join(", ")),
    }
    Ok(())
}
