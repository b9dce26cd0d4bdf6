//! Text renderings of cross-validation results.

use std::fmt::Write as _;

use super::cv::{CvReport, CvScheme};
use super::metrics::{Metric, MetricsReport};

fn cell(report: &CvReport, metric: Metric) -> String {
    match report.config.scheme {
        CvScheme::LeaveOneGroupOut => report.pooled.get(metric).map_or("n/a".into(), |v| format!("{v:.3}")),
        CvScheme::KFold { .. } => report
            .mean_std(metric)
            .map_or("n/a".into(), |(m, s)| format!("{m:.3} ± {s:.3}")),
    }
}

/// Table with one row per metric and one column per labelled report.
pub fn format_table(title: &str, columns: &[(String, &CvReport)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let header: Vec<&str> = std::iter::once("metric")
        .chain(columns.iter().map(|(l, _)| l.as_str()))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for metric in Metric::ALL {
        let cells: Vec<String> = columns.iter().map(|(_, r)| cell(r, metric)).collect();
        let _ = writeln!(out, "{},{}", metric.row_name(), cells.join(","));
    }
    out
}

fn dump_counts(out: &mut String, prefix: &str, m: &MetricsReport) {
    let _ = writeln!(out, "{prefix}.tp={}", m.tp);
    let _ = writeln!(out, "{prefix}.fp={}", m.fp);
    let _ = writeln!(out, "{prefix}.tn={}", m.tn);
    let _ = writeln!(out, "{prefix}.fn={}", m.fn_);
    for metric in Metric::ALL {
        let v = m.get(metric).map_or("undefined".into(), |v| v.to_string());
        let _ = writeln!(out, "{prefix}.{}={v}", metric.key());
    }
}

/// Machine-readable `key=value` lines for every labelled report.
pub fn format_key_values(columns: &[(String, &CvReport)]) -> String {
    let mut out = String::new();
    for (label, r) in columns {
        let _ = writeln!(out, "{label}.scheme={}", r.config.scheme.name());
        let _ = writeln!(out, "{label}.folds={}", r.folds_per_repeat);
        let _ = writeln!(out, "{label}.repeats={}", r.repeats());
        let _ = writeln!(out, "{label}.seed={}", r.config.seed);
        let _ = writeln!(out, "{label}.stratified={}", r.config.stratified);
        dump_counts(&mut out, &format!("{label}.pooled"), &r.pooled);
        dump_counts(&mut out, &format!("{label}.group"), &r.group_level);
        for metric in Metric::ALL {
            if let Some((m, s)) = r.mean_std(metric) {
                let _ = writeln!(out, "{label}.mean.{}={m}", metric.key());
                let _ = writeln!(out, "{label}.std.{}={s}", metric.key());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::cv::CvConfig;
    use super::*;

    fn report(scheme: CvScheme) -> CvReport {
        let m = MetricsReport {
            roc_area: Some(0.9),
            ..MetricsReport::from_counts(94, 27, 73, 6)
        };
        CvReport {
            config: CvConfig {
                scheme,
                repeats: 2,
                seed: 7,
                stratified: true,
            },
            folds_per_repeat: 10,
            pooled: m,
            per_repeat: vec![m, MetricsReport::from_counts(90, 20, 80, 10)],
            group_level: m,
        }
    }

    #[test]
    fn table_rows_follow_metric_order() {
        let r = report(CvScheme::LeaveOneGroupOut);
        let t = format_table("demo", &[("Nkg".into(), &r)]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[1], "metric,Nkg");
        assert_eq!(lines[2], "FP rate,0.270");
        assert_eq!(lines[3], "Sensitivity,0.940");
        assert_eq!(lines[8], "ROC Area,0.900");
        let k = report(CvScheme::KFold { k: 10 });
        let t = format_table("demo", &[("Nkg".into(), &k)]);
        assert!(t.contains("ROC Area,n/a") || t.contains("ROC Area,0.900"));
        assert!(t.contains("Sensitivity,0.920 ± 0.028"));
    }

    #[test]
    fn key_values_include_counts_and_seed() {
        let r = report(CvScheme::KFold { k: 10 });
        let kv = format_key_values(&[("Nkg".into(), &r)]);
        for want in [
            "Nkg.seed=7",
            "Nkg.repeats=2",
            "Nkg.pooled.tp=94",
            "Nkg.pooled.fn=6",
            "Nkg.folds=10",
        ] {
            assert!(kv.lines().any(|l| l == want), "{want}");
        }
    }
}
