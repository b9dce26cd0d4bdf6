//! Group-aware cross-validation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::metrics::{compute_metrics, Metric, MetricsReport, Outcome};
use super::nbc::train_refs;
use super::ClassLabel;
use crate::error::{Error, Result};
use crate::fractal::FeatureVector;
use crate::seed::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CvScheme {
    /// Every fold holds out all rows of one group.
    LeaveOneGroupOut,
    /// Groups dealt into `k` folds, reshuffled for every repeat.
    KFold { k: usize },
}

impl CvScheme {
    pub fn name(&self) -> String {
        match self {
            CvScheme::LeaveOneGroupOut => "leave-one-group-out".into(),
            CvScheme::KFold { k } => format!("{k}-fold"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CvConfig {
    pub scheme: CvScheme,
    /// Ignored for leave-one-group-out, which is deterministic.
    pub repeats: usize,
    pub seed: u64,
    /// Deal groups to folds class by class.
    pub stratified: bool,
}

impl CvConfig {
    pub fn leave_one_group_out() -> Self {
        CvConfig {
            scheme: CvScheme::LeaveOneGroupOut,
            repeats: 1,
            seed: 0,
            stratified: true,
        }
    }

    pub fn k_fold(k: usize, repeats: usize, seed: u64) -> Self {
        CvConfig {
            scheme: CvScheme::KFold { k },
            repeats,
            seed,
            stratified: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let CvScheme::KFold { k } = self.scheme {
            if k < 2 {
                return Err(Error::argument(format!("k-fold needs k >= 2, got {k}")));
            }
        }
        if self.repeats == 0 {
            return Err(Error::argument("repeats must be at least 1"));
        }
        Ok(())
    }

    fn effective_repeats(&self) -> usize {
        match self.scheme {
            CvScheme::LeaveOneGroupOut => 1,
            CvScheme::KFold { .. } => self.repeats,
        }
    }
}

/// Row indices of one train/test split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Aggregated cross-validation result.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub config: CvConfig,
    pub folds_per_repeat: usize,
    /// Metrics over the outcomes of all repeats together.
    pub pooled: MetricsReport,
    pub per_repeat: Vec<MetricsReport>,
    /// Majority-vote decisions per group, pooled over repeats.
    pub group_level: MetricsReport,
}

impl CvReport {
    pub fn repeats(&self) -> usize {
        self.per_repeat.len()
    }

    /// Mean and sample standard deviation across repeats of the repeats
    /// where `metric` is defined.
    pub fn mean_std(&self, metric: Metric) -> Option<(f64, f64)> {
        let v: Vec<f64> = self.per_repeat.iter().filter_map(|r| r.get(metric)).collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 {
            (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some((mean, std))
    }
}

/// Rows of every group, groups in lexicographic order.
fn groups(features: &[FeatureVector]) -> BTreeMap<&str, Vec<usize>> {
    let mut g: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, f) in features.iter().enumerate() {
        g.entry(f.group_id.as_str()).or_default().push(i);
    }
    g
}

/// Majority label; ties and unlabeled majorities go to non-respondent.
pub fn majority_label(labels: impl IntoIterator<Item = ClassLabel>) -> ClassLabel {
    let (mut pos, mut neg) = (0usize, 0usize);
    for l in labels {
        if l.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if pos > neg {
        ClassLabel::Respondent
    } else {
        ClassLabel::NonRespondent
    }
}

/// Per-group majority vote over slice predictions.
pub fn group_decisions<'a>(
    predictions: impl IntoIterator<Item = (&'a str, ClassLabel)>,
) -> BTreeMap<String, ClassLabel> {
    let mut by_group: BTreeMap<String, Vec<ClassLabel>> = BTreeMap::new();
    for (g, p) in predictions {
        by_group.entry(g.to_string()).or_default().push(p);
    }
    by_group.into_iter().map(|(g, v)| (g, majority_label(v))).collect()
}

/// Train/test splits for one repeat.
pub fn fold_plan(features: &[FeatureVector], config: &CvConfig, repeat: usize) -> Result<Vec<Fold>> {
    config.validate()?;
    let groups = groups(features);
    let names: Vec<&str> = groups.keys().copied().collect();
    let test_sets: Vec<Vec<usize>> = match config.scheme {
        CvScheme::LeaveOneGroupOut => {
            if groups.len() < 2 {
                return Err(Error::argument(format!(
                    "leave-one-group-out needs at least 2 groups, found {}",
                    groups.len()
                )));
            }
            groups.values().cloned().collect()
        }
        CvScheme::KFold { k } => {
            if groups.len() < k {
                return Err(Error::argument(format!(
                    "{k}-fold needs at least {k} groups, found {}",
                    groups.len()
                )));
            }
            let mut rng = stream_rng(config.seed, repeat as u64);
            let strata: Vec<Vec<&str>> = if config.stratified {
                ClassLabel::ALL
                    .iter()
                    .map(|&c| {
                        names
                            .iter()
                            .copied()
                            .filter(|g| majority_label(groups[g].iter().filter_map(|&i| features[i].class_label)) == c)
                            .collect()
                    })
                    .collect()
            } else {
                vec![names.clone()]
            };
            let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
            let mut slot = 0;
            for mut stratum in strata {
                stratum.shuffle(&mut rng);
                for g in stratum {
                    folds[slot % k].extend(&groups[g]);
                    slot += 1;
                }
            }
            folds
        }
    };
    Ok(test_sets
        .into_iter()
        .filter(|t| !t.is_empty())
        .map(|mut test| {
            test.sort_unstable();
            let train = (0..features.len()).filter(|i| test.binary_search(i).is_err()).collect();
            Fold { train, test }
        })
        .collect())
}

pub fn cross_validate(features: &[FeatureVector], config: &CvConfig) -> Result<CvReport> {
    cross_validate_inner(features, config, |_| Ok(None))
}

/// Null check: before every repeat the class labels are permuted across
/// rows (keeping class counts), then one k-fold repeat is run.
pub fn permutation_null(features: &[FeatureVector], config: &CvConfig) -> Result<CvReport> {
    cross_validate_inner(features, config, |repeat| {
        let mut labels: Vec<Option<ClassLabel>> = features.iter().map(|f| f.class_label).collect();
        labels.shuffle(&mut stream_rng(config.seed ^ 0x6e75_6c6c, repeat as u64));
        Ok(Some(labels))
    })
}

fn cross_validate_inner(
    features: &[FeatureVector],
    config: &CvConfig,
    relabel: impl Fn(usize) -> Result<Option<Vec<Option<ClassLabel>>>> + Sync,
) -> Result<CvReport> {
    config.validate()?;
    let unlabeled: Vec<&str> = features
        .iter()
        .filter(|f| f.class_label.is_none())
        .map(|f| f.image_id.as_str())
        .collect();
    if !unlabeled.is_empty() {
        return Err(Error::argument(format!("unlabeled rows: {}", unlabeled.join(", "))));
    }
    let runs: Vec<(Vec<Outcome>, Vec<Outcome>, usize)> = (0..config.effective_repeats())
        .into_par_iter()
        .map(|repeat| {
            let relabeled: Vec<FeatureVector>;
            let data: &[FeatureVector] = match relabel(repeat)? {
                Some(labels) => {
                    relabeled = features
                        .iter()
                        .zip(labels)
                        .map(|(f, l)| FeatureVector {
                            class_label: l,
                            ..f.clone()
                        })
                        .collect();
                    &relabeled
                }
                None => features,
            };
            run_repeat(data, config, repeat)
        })
        .collect::<Result<_>>()?;
    let folds_per_repeat = runs[0].2;
    let per_repeat = runs
        .iter()
        .map(|(o, _, _)| compute_metrics(o))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<Outcome> = runs.iter().flat_map(|(o, _, _)| o.iter().copied()).collect();
    let all_groups: Vec<Outcome> = runs.iter().flat_map(|(_, g, _)| g.iter().copied()).collect();
    Ok(CvReport {
        config: *config,
        folds_per_repeat,
        pooled: compute_metrics(&all)?,
        per_repeat,
        group_level: compute_metrics(&all_groups)?,
    })
}

/// Slice outcomes in row order, group outcomes in group order, fold count.
fn run_repeat(
    features: &[FeatureVector],
    config: &CvConfig,
    repeat: usize,
) -> Result<(Vec<Outcome>, Vec<Outcome>, usize)> {
    let folds = fold_plan(features, config, repeat)?;
    let mut slots: Vec<Option<Outcome>> = vec![None; features.len()];
    let fold_outcomes: Vec<Vec<(usize, Outcome)>> = folds
        .par_iter()
        .enumerate()
        .map(|(fi, fold)| {
            let train: Vec<&FeatureVector> = fold.train.iter().map(|&i| &features[i]).collect();
            let model = train_refs(&train).map_err(|e| match e {
                Error::Training(msg) => Error::Training(format!("fold {fi} of repeat {repeat}: {msg}")),
                other => other,
            })?;
            fold.test
                .iter()
                .map(|&i| {
                    let post = model.posterior(&features[i].values)?;
                    let predicted = model.decide(&post);
                    let score = model
                        .classes()
                        .iter()
                        .zip(&post)
                        .find(|(c, _)| c.is_positive())
                        .map_or(0.0, |(_, p)| *p);
                    Ok((
                        i,
                        Outcome {
                            truth: features[i].class_label.expect("labels checked"),
                            predicted,
                            score,
                        },
                    ))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    for (i, o) in fold_outcomes.into_iter().flatten() {
        slots[i] = Some(o);
    }
    let outcomes: Vec<Outcome> = slots
        .into_iter()
        .map(|o| o.expect("every row is tested once"))
        .collect();

    let mut group_rows: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, f) in features.iter().enumerate() {
        group_rows.entry(f.group_id.as_str()).or_default().push(i);
    }
    let group_outcomes = group_rows
        .values()
        .map(|rows| {
            let predicted = majority_label(rows.iter().map(|&i| outcomes[i].predicted));
            let truth = majority_label(rows.iter().map(|&i| outcomes[i].truth));
            let score =
                rows.iter().filter(|&&i| outcomes[i].predicted.is_positive()).count() as f64 / rows.len() as f64;
            Outcome {
                truth,
                predicted,
                score,
            }
        })
        .collect();
    Ok((outcomes, group_outcomes, folds.len()))
}
