//! Naive Bayes classification, metrics and cross-validation.

mod cv;
mod label;
mod metrics;
mod nbc;
mod report;

pub use cv::{
    cross_validate, fold_plan, group_decisions, majority_label, permutation_null, CvConfig, CvReport, CvScheme, Fold,
};
pub use label::{optional_label_name, parse_optional_label, ClassLabel};
pub use metrics::{compute_metrics, roc_area, Metric, MetricsReport, Outcome};
pub use nbc::{train, FeatureDensity, NbcModel, VARIANCE_FLOOR};
pub use report::{format_key_values, format_table};
