//! End-to-end study: envelopes → parametric maps → fractal features →
//! cross-validated classification.

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::classifier::{cross_validate, permutation_null, CvConfig, CvReport, CvScheme};
use crate::envelope::{detect_envelope, EnvelopeImage, RfFrame};
use crate::error::{Error, Result};
use crate::fractal::{
    extract_features, feature_names, node_fractal_dimensions, select_basis_from_scores, wpt_decompose, BasisPolicy,
    BasisSelection, FeatureTable, FeatureVector, NodeScores,
};
use crate::models::{FitOptions, ModelKind};
use crate::parametric::{generate_maps, map_stats, ParametricImageSet, WindowSpec};

/// Subband choice for the feature tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisChoice {
    /// Every subband at the decomposition depth.
    FullLevel,
    /// One best basis for the dataset, scored on node dimensions averaged
    /// over all images and parameter maps.
    Best,
}

impl BasisChoice {
    pub fn name(self) -> &'static str {
        match self {
            BasisChoice::FullLevel => "full",
            BasisChoice::Best => "best",
        }
    }
}

impl std::str::FromStr for BasisChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full-level" => Ok(BasisChoice::FullLevel),
            "best" | "best-basis" => Ok(BasisChoice::Best),
            other => Err(Error::argument(format!("unknown basis policy '{other}' (full|best)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub kinds: Vec<ModelKind>,
    pub window: WindowSpec,
    pub depth: usize,
    pub basis: BasisChoice,
    pub fit: FitOptions,
    pub schemes: Vec<CvScheme>,
    pub repeats: usize,
    pub seed: u64,
    pub stratified: bool,
    pub input_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            kinds: vec![ModelKind::Nakagami],
            window: WindowSpec::default(),
            depth: 2,
            basis: BasisChoice::Best,
            fit: FitOptions::default(),
            schemes: vec![CvScheme::LeaveOneGroupOut, CvScheme::KFold { k: 10 }],
            repeats: 60,
            seed: 0,
            stratified: true,
            input_dir: None,
            output_dir: None,
        }
    }
}

pub const MAX_DEPTH: usize = 4;
pub const MAX_REPEATS: usize = 10_000;

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::argument("at least one model kind is required"));
        }
        for &k in &self.kinds {
            self.window.validate_for(k)?;
        }
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return Err(Error::argument(format!(
                "depth must be in 1..={MAX_DEPTH}, got {}",
                self.depth
            )));
        }
        if self.repeats == 0 || self.repeats > MAX_REPEATS {
            return Err(Error::argument(format!(
                "repeats must be in 1..={MAX_REPEATS}, got {}",
                self.repeats
            )));
        }
        for s in &self.schemes {
            self.cv(*s).validate()?;
        }
        self.fit.validate()?;
        if let (Some(i), Some(o)) = (&self.input_dir, &self.output_dir) {
            if i == o {
                return Err(Error::argument(format!(
                    "input and output directory are both {}",
                    i.display()
                )));
            }
        }
        Ok(())
    }

    pub fn cv(&self, scheme: CvScheme) -> CvConfig {
        CvConfig {
            scheme,
            repeats: self.repeats,
            seed: self.seed,
            stratified: self.stratified,
        }
    }

    /// Settings that determine the outputs, as sorted `key=value` lines.
    /// Directories are excluded.
    pub fn canonical_text(&self) -> String {
        let mut lines = vec![
            format!("basis={}", self.basis.name()),
            format!("depth={}", self.depth),
            format!("fit.max_iterations={}", self.fit.max_iterations),
            format!("fit.tolerance={}", self.fit.tolerance),
            format!(
                "kinds={}",
                self.kinds.iter().map(|k| k.name()).collect::<Vec<_>>().join(",")
            ),
            format!("repeats={}", self.repeats),
            format!(
                "schemes={}",
                self.schemes.iter().map(|s| s.name()).collect::<Vec<_>>().join(",")
            ),
            format!("seed={}", self.seed),
            format!("stratified={}", self.stratified),
            format!(
                "window={}x{}/{}",
                self.window.height, self.window.width, self.window.stride
            ),
        ];
        for k in &self.kinds {
            let b = self.fit.bounds(*k);
            lines.push(format!("fit.bounds.{}={:?}/{:?}", k.name(), b.lower, b.upper));
        }
        lines.sort();
        lines.join("\n") + "\n"
    }

    /// First 16 hex digits of the SHA-256 of [`PipelineConfig::canonical_text`].
    pub fn config_hash(&self) -> String {
        hash_text(&self.canonical_text())
    }

    pub fn provenance(&self) -> Vec<(String, String)> {
        vec![
            ("config_hash".into(), self.config_hash()),
            ("seed".into(), self.seed.to_string()),
        ]
    }
}

pub fn hash_text(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Envelope of every frame, in input order.
pub fn envelopes(frames: &[RfFrame]) -> Vec<Result<EnvelopeImage>> {
    frames.par_iter().map(detect_envelope).collect()
}

/// Parametric maps of every envelope, in input order.
pub fn parametric_sets(
    envelopes: &[EnvelopeImage],
    kind: ModelKind,
    config: &PipelineConfig,
) -> Vec<Result<ParametricImageSet>> {
    envelopes
        .par_iter()
        .map(|e| generate_maps(e, kind, config.window, &config.fit))
        .collect()
}

/// Dataset-level best basis from the mean node dimensions of all maps.
pub fn dataset_basis(sets: &[ParametricImageSet], depth: usize) -> Result<BasisSelection> {
    let scores: Vec<NodeScores> = sets
        .par_iter()
        .flat_map_iter(|s| s.maps.iter())
        .map(|m| wpt_decompose(m.values.view(), depth).map(|t| node_fractal_dimensions(&t)))
        .collect::<Result<_>>()?;
    if scores.is_empty() {
        return Err(Error::argument("no maps to select a basis from"));
    }
    Ok(select_basis_from_scores(
        depth,
        &crate::fractal::mean_node_scores(&scores),
    ))
}

/// Fractal feature table of one model kind.
pub fn fractal_table(sets: &[ParametricImageSet], kind: ModelKind, config: &PipelineConfig) -> Result<FeatureTable> {
    let basis = match config.basis {
        BasisChoice::FullLevel => BasisSelection::full_level(config.depth),
        BasisChoice::Best => dataset_basis(sets, config.depth)?,
    };
    let policy = BasisPolicy::Fixed(basis.clone());
    let rows: Vec<FeatureVector> = sets
        .par_iter()
        .map(|s| extract_features(s, config.depth, &policy))
        .collect::<Result<_>>()?;
    let mut table = FeatureTable::new(feature_names(kind, &basis));
    table.provenance = config.provenance();
    table.provenance.push(("kind".into(), kind.name().into()));
    table.provenance.push((
        "basis".into(),
        basis.nodes.iter().map(|n| n.label()).collect::<Vec<_>>().join(" "),
    ));
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

/// Parametric baseline: mean, variance and median of every parameter map.
pub fn baseline_table(sets: &[ParametricImageSet], kind: ModelKind, config: &PipelineConfig) -> Result<FeatureTable> {
    let columns = kind
        .param_names()
        .iter()
        .flat_map(|p| ["mean", "variance", "median"].map(|s| format!("{}:{p}:{s}", kind.name())))
        .collect();
    let mut table = FeatureTable::new(columns);
    table.provenance = config.provenance();
    table.provenance.push(("kind".into(), kind.name().into()));
    for s in sets {
        let values = s
            .maps
            .iter()
            .flat_map(|m| {
                let st = map_stats(m);
                [st.mean, st.variance, st.median]
            })
            .collect();
        table.push(FeatureVector {
            values,
            image_id: s.frame_id.clone(),
            group_id: s.group_id.clone(),
            class_label: s.class_label,
            degenerate: 0,
        })?;
    }
    Ok(table)
}

/// One report per configured scheme.
pub fn evaluate_table(table: &FeatureTable, config: &PipelineConfig) -> Result<Vec<CvReport>> {
    config
        .schemes
        .iter()
        .map(|&s| cross_validate(&table.rows, &config.cv(s)))
        .collect()
}

/// Repeated k-fold with labels re-permuted in every repeat.
pub fn null_report(table: &FeatureTable, k: usize, config: &PipelineConfig) -> Result<CvReport> {
    permutation_null(&table.rows, &config.cv(CvScheme::KFold { k }))
}

/// Feature tables and reports of one model kind.
#[derive(Debug, Clone, PartialEq)]
pub struct KindResult {
    pub kind: ModelKind,
    pub fractal: FeatureTable,
    pub baseline: FeatureTable,
    pub fractal_reports: Vec<CvReport>,
    pub baseline_reports: Vec<CvReport>,
    pub fit_failures: usize,
}

/// Runs every configured kind over in-memory frames.
pub fn run_study(frames: &[RfFrame], config: &PipelineConfig) -> Result<Vec<KindResult>> {
    config.validate()?;
    let envs: Vec<EnvelopeImage> = envelopes(frames).into_iter().collect::<Result<_>>()?;
    config
        .kinds
        .iter()
        .map(|&kind| {
            let sets: Vec<ParametricImageSet> = parametric_sets(&envs, kind, config)
                .into_iter()
                .collect::<Result<_>>()?;
            let fractal = fractal_table(&sets, kind, config)?;
            let baseline = baseline_table(&sets, kind, config)?;
            Ok(KindResult {
                kind,
                fractal_reports: evaluate_table(&fractal, config)?,
                baseline_reports: evaluate_table(&baseline, config)?,
                fractal,
                baseline,
                fit_failures: sets.iter().map(|s| s.fit_failures()).sum(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_settings_not_directories() {
        let a = PipelineConfig::default();
        let mut b = a.clone();
        b.output_dir = Some("/tmp/x".into());
        assert_eq!(a.config_hash(), b.config_hash());
        b.depth = 1;
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 16);
    }

    #[test]
    fn validation() {
        let mut c = PipelineConfig::default();
        assert!(c.validate().is_ok());
        c.kinds.clear();
        assert!(c.validate().is_err());
        let c = PipelineConfig {
            input_dir: Some("d".into()),
            output_dir: Some("d".into()),
            ..PipelineConfig::default()
        };
        assert!(c.validate().is_err());
        let c = PipelineConfig {
            depth: 0,
            ..PipelineConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
