//! Naive Bayes classifier with per-feature class-conditional densities.

use std::f64::consts::PI;

use super::ClassLabel;
use crate::error::{Error, Result};
use crate::fractal::FeatureVector;

/// Relative variance floor, scaled by the squared range of each feature.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Class-conditional density of one feature.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureDensity {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// Probability masses at exact values; other values have mass 0.
    Tabulated(Vec<(f64, f64)>),
}

impl FeatureDensity {
    pub fn ln_density(&self, x: f64) -> f64 {
        match self {
            FeatureDensity::Gaussian { mean, variance } => {
                -0.5 * ((2.0 * PI * variance).ln() + (x - mean).powi(2) / variance)
            }
            FeatureDensity::Tabulated(masses) => masses
                .iter()
                .find(|(v, _)| *v == x)
                .map_or(f64::NEG_INFINITY, |(_, p)| p.ln()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NbcModel {
    classes: Vec<ClassLabel>,
    priors: Vec<f64>,
    /// `densities[class][feature]`
    densities: Vec<Vec<FeatureDensity>>,
}

impl NbcModel {
    pub fn from_parts(classes: Vec<ClassLabel>, priors: Vec<f64>, densities: Vec<Vec<FeatureDensity>>) -> Result<Self> {
        if classes.len() != priors.len() || classes.len() != densities.len() || classes.is_empty() {
            return Err(Error::argument("classes, priors and densities must align"));
        }
        if priors.iter().any(|p| !(*p > 0.0)) || (priors.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::argument("priors must be positive and sum to 1"));
        }
        let n = densities[0].len();
        if densities.iter().any(|d| d.len() != n) {
            return Err(Error::argument(
                "every class needs the same number of feature densities",
            ));
        }
        Ok(NbcModel {
            classes,
            priors,
            densities,
        })
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn densities(&self) -> &[Vec<FeatureDensity>] {
        &self.densities
    }

    pub fn feature_count(&self) -> usize {
        self.densities[0].len()
    }

    /// Unnormalized log posterior of each class.
    pub fn log_joint(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_count() {
            return Err(Error::argument(format!(
                "feature vector has {} entries, model expects {}",
                x.len(),
                self.feature_count()
            )));
        }
        Ok(self
            .priors
            .iter()
            .zip(&self.densities)
            .map(|(p, dens)| p.ln() + dens.iter().zip(x).map(|(d, &v)| d.ln_density(v)).sum::<f64>())
            .collect())
    }

    /// Class probabilities aligned with [`NbcModel::classes`].
    pub fn posterior(&self, x: &[f64]) -> Result<Vec<f64>> {
        let lj = self.log_joint(x)?;
        let max = lj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::degenerate("every class has zero likelihood"));
        }
        let w: Vec<f64> = lj.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = w.iter().sum();
        Ok(w.into_iter().map(|v| v / total).collect())
    }

    /// Posterior of the positive class.
    pub fn positive_score(&self, x: &[f64]) -> Result<f64> {
        let post = self.posterior(x)?;
        Ok(self
            .classes
            .iter()
            .zip(&post)
            .find(|(c, _)| c.is_positive())
            .map_or(0.0, |(_, p)| *p))
    }

    /// Maximum posterior; ties go to the higher prior, then the
    /// lexicographically smaller class name.
    pub fn classify(&self, x: &[f64]) -> Result<ClassLabel> {
        let post = self.posterior(x)?;
        Ok(self.decide(&post))
    }

    pub(crate) fn decide(&self, post: &[f64]) -> ClassLabel {
        let mut best = 0;
        for i in 1..post.len() {
            let key = |j: usize| (post[j], self.priors[j]);
            let (pi, qi) = key(i);
            let (pb, qb) = key(best);
            if pi > pb || (pi == pb && (qi > qb || (qi == qb && self.classes[i].name() < self.classes[best].name()))) {
                best = i;
            }
        }
        self.classes[best]
    }
}

/// Fits class priors and per-feature Gaussians with a variance floor of
/// `1e-9 × range²` (or `1e-9` for a feature constant over all examples).
pub fn train(examples: &[FeatureVector]) -> Result<NbcModel> {
    let refs: Vec<&FeatureVector> = examples.iter().collect();
    train_refs(&refs)
}

pub(crate) fn train_refs(examples: &[&FeatureVector]) -> Result<NbcModel> {
    let first = examples
        .first()
        .ok_or_else(|| Error::Training("no training examples".into()))?;
    let n_features = first.len();
    if let Some(bad) = examples.iter().find(|e| e.len() != n_features) {
        return Err(Error::argument(format!(
            "example '{}' has {} features, expected {n_features}",
            bad.image_id,
            bad.len()
        )));
    }
    let unlabeled: Vec<&str> = examples
        .iter()
        .filter(|e| e.class_label.is_none())
        .map(|e| e.image_id.as_str())
        .collect();
    if !unlabeled.is_empty() {
        return Err(Error::Training(format!("unlabeled examples: {}", unlabeled.join(", "))));
    }
    let floors: Vec<f64> = (0..n_features)
        .map(|f| {
            let (lo, hi) = examples
                .iter()
                .map(|e| e.values[f])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            let range = hi - lo;
            if range > 0.0 {
                VARIANCE_FLOOR * range * range
            } else {
                VARIANCE_FLOOR
            }
        })
        .collect();
    let total = examples.len() as f64;
    let mut priors = Vec::new();
    let mut densities = Vec::new();
    for class in ClassLabel::ALL {
        let members: Vec<&FeatureVector> = examples
            .iter()
            .copied()
            .filter(|e| e.class_label == Some(class))
            .collect();
        if members.is_empty() {
            return Err(Error::Training(format!("no training examples of class '{class}'")));
        }
        let n = members.len() as f64;
        priors.push(n / total);
        densities.push(
            (0..n_features)
                .map(|f| {
                    let mean = members.iter().map(|e| e.values[f]).sum::<f64>() / n;
                    let var = members.iter().map(|e| (e.values[f] - mean).powi(2)).sum::<f64>() / n;
                    FeatureDensity::Gaussian {
                        mean,
                        variance: var.max(floors[f]),
                    }
                })
                .collect(),
        );
    }
    NbcModel::from_parts(ClassLabel::ALL.to_vec(), priors, densities)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(values: Vec<f64>, label: ClassLabel) -> FeatureVector {
        FeatureVector {
            values,
            image_id: "i".into(),
            group_id: "g".into(),
            class_label: Some(label),
            degenerate: 0,
        }
    }

    use ClassLabel::{NonRespondent as N, Respondent as R};

    #[test]
    fn priors_are_class_frequencies() {
        let data = vec![fv(vec![1.0], R), fv(vec![2.0], R), fv(vec![3.0], R), fv(vec![9.0], N)];
        let m = train(&data).unwrap();
        assert_eq!(m.priors(), &[0.75, 0.25]);
    }

    #[test]
    fn constant_feature_gets_floor() {
        let data = vec![fv(vec![1.0], R), fv(vec![1.0], R), fv(vec![3.0], N), fv(vec![5.0], N)];
        let m = train(&data).unwrap();
        assert_eq!(
            m.densities()[0][0],
            FeatureDensity::Gaussian {
                mean: 1.0,
                variance: 1e-9 * 16.0
            }
        );
    }

    #[test]
    fn duplicated_training_set_gives_same_model() {
        let data = vec![
            fv(vec![1.0, 2.0], R),
            fv(vec![1.5, 0.0], R),
            fv(vec![3.0, 1.0], N),
            fv(vec![4.0, -1.0], N),
        ];
        let doubled: Vec<_> = data.iter().chain(&data).cloned().collect();
        assert_eq!(train(&data).unwrap(), train(&doubled).unwrap());
    }

    #[test]
    fn missing_class_and_length_mismatch() {
        assert!(matches!(
            train(&[fv(vec![1.0], R), fv(vec![2.0], R)]),
            Err(Error::Training(_))
        ));
        assert!(matches!(
            train(&[fv(vec![1.0], R), fv(vec![2.0, 1.0], N)]),
            Err(Error::Argument(_))
        ));
        let m = train(&[fv(vec![1.0], R), fv(vec![2.0], N), fv(vec![1.1], R), fv(vec![2.2], N)]).unwrap();
        assert!(m.posterior(&[1.0, 2.0]).is_err());
    }

    fn gaussian_model(priors: [f64; 2], means: [f64; 2], var: f64) -> NbcModel {
        NbcModel::from_parts(
            vec![R, N],
            priors.to_vec(),
            means
                .iter()
                .map(|&mean| vec![FeatureDensity::Gaussian { mean, variance: var }])
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn posterior_examples() {
        let m = gaussian_model([0.5, 0.5], [0.0, 2.0], 1.0);
        let p = m.posterior(&[1.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = m.posterior(&[0.0]).unwrap();
        let far = gaussian_model([0.5, 0.5], [0.0, 6.0], 1.0).posterior(&[0.0]).unwrap();
        assert!(far[0] > 0.99);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tie_rules() {
        let m = gaussian_model([0.6, 0.4], [0.0, 2.0], 1.0);
        assert_eq!(m.decide(&[0.5, 0.5]), R);
        let m = gaussian_model([0.4, 0.6], [0.0, 2.0], 1.0);
        assert_eq!(m.decide(&[0.5, 0.5]), N);
        assert_eq!(m.decide(&[0.7, 0.3]), R);
        let m = gaussian_model([0.5, 0.5], [0.0, 2.0], 1.0);
        // equal priors: "non-respondent" sorts first
        assert_eq!(m.decide(&[0.5, 0.5]), N);
    }
}
