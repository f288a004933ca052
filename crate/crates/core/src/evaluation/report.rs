use std::fmt::Write;

use super::{EvalProtocol, EvaluationReport, MetricSummary};
use crate::similarity::SINGULARITY_FORM;

/// Ordered key/value lines written ahead of every report so each number can
/// be traced back to the configuration that produced it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportHeader {
    pub entries: Vec<(String, String)>,
}

impl ReportHeader {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Protocol and model settings shared by every method in a run.
    pub fn for_protocol(protocol: &EvalProtocol, reports: &[EvaluationReport]) -> Self {
        let mut h = ReportHeader::default();
        let topn: Vec<String> = protocol
            .top_n_values
            .iter()
            .map(|n| n.to_string())
            .collect();
        h.push("folds", protocol.folds);
        h.push("repetitions", protocol.repetitions);
        h.push("seed", protocol.seed);
        h.push("topn", topn.join(","));
        h.push("threshold", protocol.relevance_threshold);
        h.push("averaging", protocol.averaging);
        h.push("scope", protocol.scope);
        h.push("clusters", protocol.clustering.cluster_count);
        h.push("fuzzifier", protocol.clustering.fuzzifier);
        h.push("fcm_max_iterations", protocol.clustering.max_iterations);
        h.push("fcm_tolerance", protocol.clustering.tolerance);
        h.push(
            "defuzzification",
            "COG over 1-based labels, round half away from zero",
        );
        h.push("singularity", SINGULARITY_FORM);
        if let Some(first) = reports.first() {
            h.push("neighbors", first.method.predictor.neighbor_count);
            h.push(
                "clamp",
                if first.method.predictor.clamp_predictions {
                    "on"
                } else {
                    "off"
                },
            );
        }
        h
    }
}

const METRICS: [&str; 4] = ["Accuracy", "Precision", "Recall", "MAE"];

fn metric_value(m: &MetricSummary, name: &str) -> Option<f64> {
    match name {
        "Accuracy" => Some(m.accuracy),
        "Precision" => m.precision,
        "Recall" => m.recall,
        "MAE" => Some(m.mae),
        _ => unreachable!("unknown metric {name}"),
    }
}

fn fmt4(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.4}"))
}

/// Aligned text tables, one block per method, Top-N columns plus the
/// across-Top-N average.
pub fn render_table(header: &ReportHeader, reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    for (k, v) in &header.entries {
        let _ = writeln!(out, "# {k}: {v}");
    }
    for report in reports {
        let _ = writeln!(out);
        let p = &report.method.predictor;
        let _ = writeln!(
            out,
            "{}  (similarity {}, reliability {}, fallback predictions {}/{})",
            report.method.method.label(),
            p.measure,
            if p.use_reliability { "on" } else { "off" },
            report.fallback_predictions,
            report.predictions,
        );
        let _ = write!(out, "{:<10}", "Metric");
        for s in &report.per_top_n {
            let _ = write!(out, "{:>10}", format!("Top {}", s.top_n));
        }
        let _ = writeln!(out, "{:>10}", "Average");
        for name in METRICS {
            let _ = write!(out, "{name:<10}");
            for s in &report.per_top_n {
                let _ = write!(out, "{:>10}", fmt4(metric_value(&s.metrics, name)));
            }
            let _ = writeln!(out, "{:>10}", fmt4(metric_value(&report.average, name)));
        }
        let excluded: usize = report
            .per_top_n
            .iter()
            .map(|s| s.precision_excluded + s.recall_excluded)
            .sum();
        if excluded > 0 {
            let _ = writeln!(
                out,
                "({excluded} undefined precision/recall cells excluded)"
            );
        }
    }
    out
}

/// CSV with `#` comment lines for the header, then one row per
/// (method, metric, Top-N) and one `average` row per (method, metric).
pub fn render_csv(header: &ReportHeader, reports: &[EvaluationReport]) -> String {
    let mut out = String::new();
    for (k, v) in &header.entries {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "method,metric,top_n,value");
    for report in reports {
        let label = report.method.method.label();
        for name in METRICS {
            for s in &report.per_top_n {
                let _ = writeln!(
                    out,
                    "{label},{name},{},{}",
                    s.top_n,
                    fmt4(metric_value(&s.metrics, name))
                );
            }
            let _ = writeln!(
                out,
                "{label},{name},average,{}",
                fmt4(metric_value(&report.average, name))
            );
        }
    }
    out
}
