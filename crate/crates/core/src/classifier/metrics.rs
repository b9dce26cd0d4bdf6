//! Confusion-matrix metrics and rank-based ROC area.

use super::ClassLabel;
use crate::error::{Error, Result};

/// One classified example: truth, prediction and positive-class score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub truth: ClassLabel,
    pub predicted: ClassLabel,
    pub score: f64,
}

/// The seven reported metrics, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    FpRate,
    Sensitivity,
    Specificity,
    Accuracy,
    Precision,
    DiceSc,
    RocArea,
}

impl Metric {
    pub const ALL: [Metric; 7] = [
        Metric::FpRate,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Accuracy,
        Metric::Precision,
        Metric::DiceSc,
        Metric::RocArea,
    ];

    pub fn row_name(self) -> &'static str {
        match self {
            Metric::FpRate => "FP rate",
            Metric::Sensitivity => "Sensitivity",
            Metric::Specificity => "Specificity",
            Metric::Accuracy => "Accuracy",
            Metric::Precision => "Precision",
            Metric::DiceSc => "Dice SC",
            Metric::RocArea => "ROC Area",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Metric::FpRate => "fp_rate",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::DiceSc => "dice_sc",
            Metric::RocArea => "roc_area",
        }
    }
}

/// Metrics of one set of outcomes. `None` marks a metric whose denominator
/// is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub fp_rate: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub dice_sc: Option<f64>,
    pub roc_area: Option<f64>,
}

impl MetricsReport {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::FpRate => self.fp_rate,
            Metric::Sensitivity => self.sensitivity,
            Metric::Specificity => self.specificity,
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::DiceSc => self.dice_sc,
            Metric::RocArea => self.roc_area,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Count-based metrics from a confusion matrix; `roc_area` is left `None`.
    pub fn from_counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
        MetricsReport {
            tp,
            fp,
            tn,
            fn_,
            fp_rate: ratio(fp, fp + tn),
            sensitivity: ratio(tp, tp + fn_),
            specificity: ratio(tn, tn + fp),
            accuracy: ratio(tp + tn, tp + tn + fp + fn_),
            precision: ratio(tp, tp + fp),
            dice_sc: ratio(2 * tp, 2 * tp + fp + fn_),
            roc_area: None,
        }
    }
}

pub fn compute_metrics(outcomes: &[Outcome]) -> Result<MetricsReport> {
    if outcomes.is_empty() {
        return Err(Error::argument("no outcomes to score"));
    }
    if let Some(o) = outcomes.iter().find(|o| !o.score.is_finite()) {
        return Err(Error::argument(format!("non-finite score {}", o.score)));
    }
    let count = |truth: bool, pred: bool| {
        outcomes
            .iter()
            .filter(|o| o.truth.is_positive() == truth && o.predicted.is_positive() == pred)
            .count()
    };
    let mut report = MetricsReport::from_counts(
        count(true, true),
        count(false, true),
        count(false, false),
        count(true, false),
    );
    report.roc_area = roc_area(outcomes);
    Ok(report)
}

/// Probability that a random positive outscores a random negative, ties ½.
pub fn roc_area(outcomes: &[Outcome]) -> Option<f64> {
    let n_pos = outcomes.iter().filter(|o| o.truth.is_positive()).count();
    let n_neg = outcomes.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..outcomes.len()).collect();
    idx.sort_by(|&a, &b| outcomes[a].score.total_cmp(&outcomes[b].score));
    // midranks (1-based) over tied blocks
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && outcomes[idx[j + 1]].score == outcomes[idx[i]].score {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum_pos += mid * idx[i..=j].iter().filter(|&&k| outcomes[k].truth.is_positive()).count() as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Some((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::{NonRespondent as N, Respondent as R};

    fn outcomes(tp: usize, fn_: usize, tn: usize, fp: usize) -> Vec<Outcome> {
        let mut v = Vec::new();
        v.extend((0..tp).map(|_| Outcome {
            truth: R,
            predicted: R,
            score: 0.9,
        }));
        v.extend((0..fn_).map(|_| Outcome {
            truth: R,
            predicted: N,
            score: 0.2,
        }));
        v.extend((0..tn).map(|_| Outcome {
            truth: N,
            predicted: N,
            score: 0.1,
        }));
        v.extend((0..fp).map(|_| Outcome {
            truth: N,
            predicted: R,
            score: 0.8,
        }));
        v
    }

    #[test]
    fn hand_computed_counts() {
        let m = compute_metrics(&outcomes(94, 6, 73, 27)).unwrap();
        assert_eq!((m.tp, m.fn_, m.tn, m.fp), (94, 6, 73, 27));
        assert_eq!(m.sensitivity, Some(0.94));
        assert_eq!(m.specificity, Some(0.73));
        assert_eq!(m.fp_rate, Some(0.27));
        assert_eq!(m.dice_sc, Some(188.0 / 221.0));
        assert!((m.dice_sc.unwrap() - 0.851).abs() < 5e-4);
        assert_eq!(m.accuracy, Some(167.0 / 200.0));
        assert_eq!(m.precision, Some(94.0 / 121.0));
    }

    #[test]
    fn perfect_predictions() {
        let m = compute_metrics(&outcomes(5, 0, 7, 0)).unwrap();
        for metric in Metric::ALL {
            let want = if metric == Metric::FpRate { 0.0 } else { 1.0 };
            assert_eq!(m.get(metric), Some(want), "{metric:?}");
        }
    }

    #[test]
    fn roc_extremes() {
        let exact: Vec<Outcome> = [R, N, R, N]
            .iter()
            .map(|&t| Outcome {
                truth: t,
                predicted: t,
                score: if t.is_positive() { 1.0 } else { 0.0 },
            })
            .collect();
        assert_eq!(roc_area(&exact), Some(1.0));
        let flat: Vec<Outcome> = exact.iter().map(|o| Outcome { score: 0.3, ..*o }).collect();
        assert_eq!(roc_area(&flat), Some(0.5));
    }

    #[test]
    fn undefined_metrics_are_flagged() {
        let m = compute_metrics(&outcomes(0, 0, 4, 0)).unwrap();
        assert_eq!(m.sensitivity, None);
        assert_eq!(m.precision, None);
        assert_eq!(m.dice_sc, None);
        assert_eq!(m.roc_area, None);
        assert_eq!(m.specificity, Some(1.0));
        assert!(compute_metrics(&[]).is_err());
    }
}
