//! Report emission: a per-record CSV time series and an optional JSON summary.

use eviohmm::EffectivenessReport;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::trace::format_value;

pub const CSV_HEADER: [&str; 4] = [
    "timestamp",
    "conflict",
    "step_effectiveness",
    "window_effectiveness",
];

/// Largest accepted gap between a window value and the product of its steps.
const PRODUCT_TOLERANCE: f64 = 1e-12;

/// Verifies every window value against the product of the step values it
/// was computed from.
pub fn check_windows(report: &EffectivenessReport) -> Result<()> {
    for w in &report.windows {
        if w.len() != report.window_len {
            return Err(CliError::Report(format!(
                "window {}..={} holds {} steps, expected {}",
                w.start,
                w.end,
                w.len(),
                report.window_len
            )));
        }
        let product: f64 = w.conflicts.iter().map(|c| 1.0 - c).product();
        if (product - w.effectiveness).abs() > PRODUCT_TOLERANCE {
            return Err(CliError::Report(format!(
                "window ending at record {} reports {} but its steps multiply to {product}",
                w.end + 1,
                w.effectiveness
            )));
        }
    }
    Ok(())
}

/// One row per record; the window column holds the window ending at that
/// record and stays empty where no window ends.
pub fn report_csv(report: &EffectivenessReport) -> Result<String> {
    check_windows(report)?;
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Report(e.to_string());
    writer.write_record(CSV_HEADER).map_err(io)?;
    let mut windows = report.windows.iter().peekable();
    for (i, step) in report.steps.iter().enumerate() {
        let window = match windows.peek() {
            Some(w) if w.end == i => {
                let value = format_value(&w.effectiveness);
                windows.next();
                value
            }
            _ => String::new(),
        };
        writer
            .write_record([
                format_value(&step.timestamp),
                format_value(&step.conflict),
                format_value(&step.step_effectiveness),
                window,
            ])
            .map_err(io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

// ---------------------------------------------------------------------------
// JSON summary
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub model: String,
    pub rule: String,
    pub records: usize,
    pub window: usize,
    pub stride: usize,
    /// Effectiveness of the whole trace as one sequence.
    pub overall_effectiveness: f64,
    pub min_window_effectiveness: f64,
    pub mean_window_effectiveness: f64,
    /// At least one record contradicts every expected state.
    pub breach: bool,
    pub breach_records: Vec<usize>,
    /// Records where the belief state was reset after total conflict.
    pub reset_records: Vec<usize>,
    /// Records with partial conflict.
    pub tolerance_records: Vec<usize>,
    pub windows: Vec<WindowSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSummary {
    /// First and last records, 1-based.
    pub first_record: usize,
    pub last_record: usize,
    pub end_timestamp: f64,
    pub effectiveness: f64,
    pub conflicts: Vec<f64>,
}

pub fn summarize(report: &EffectivenessReport, model: &str, rule: &str) -> Result<Summary> {
    check_windows(report)?;
    let records_where = |pred: &dyn Fn(f64, bool) -> bool| -> Vec<usize> {
        report
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| pred(s.conflict, s.reset))
            .map(|(i, _)| i + 1)
            .collect()
    };
    let values: Vec<f64> = report.windows.iter().map(|w| w.effectiveness).collect();
    let breach_records = records_where(&|c, _| c >= 1.0);
    Ok(Summary {
        model: model.to_string(),
        rule: rule.to_string(),
        records: report.steps.len(),
        window: report.window_len,
        stride: report.stride,
        overall_effectiveness: report.overall(),
        min_window_effectiveness: values.iter().cloned().fold(f64::INFINITY, f64::min),
        mean_window_effectiveness: values.iter().sum::<f64>() / values.len() as f64,
        breach: !breach_records.is_empty(),
        breach_records,
        reset_records: records_where(&|_, reset| reset),
        tolerance_records: records_where(&|c, _| c > 0.0 && c < 1.0),
        windows: report
            .windows
            .iter()
            .map(|w| WindowSummary {
                first_record: w.start + 1,
                last_record: w.end + 1,
                end_timestamp: w.end_timestamp,
                effectiveness: w.effectiveness,
                conflicts: w.conflicts.clone(),
            })
            .collect(),
    })
}

pub fn summary_json(summary: &Summary) -> String {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use eviohmm::effectiveness::{StepReport, WindowReport};

    fn report() -> EffectivenessReport {
        let steps = [0.0, 0.5, 0.0]
            .iter()
            .enumerate()
            .map(|(i, &c)| StepReport {
                timestamp: i as f64,
                conflict: c,
                step_effectiveness: 1.0 - c,
                reset: false,
            })
            .collect();
        let window = |start: usize, conflicts: Vec<f64>| WindowReport {
            start,
            end: start + 1,
            end_timestamp: (start + 1) as f64,
            effectiveness: conflicts.iter().map(|c| 1.0 - c).product(),
            conflicts,
        };
        EffectivenessReport {
            window_len: 2,
            stride: 1,
            steps,
            windows: vec![window(0, vec![0.0, 0.5]), window(1, vec![0.5, 0.0])],
        }
    }

    #[test]
    fn csv_leaves_leading_window_cells_empty() {
        let csv = report_csv(&report()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "timestamp,conflict,step_effectiveness,window_effectiveness"
        );
        assert_eq!(lines[1], "0,0,1,");
        assert_eq!(lines[2], "1,0.5,0.5,0.5");
        assert_eq!(lines[3], "2,0,1,0.5");
    }

    #[test]
    fn inconsistent_windows_are_refused() {
        let mut bad = report();
        bad.windows[1].effectiveness = 1.0;
        assert!(matches!(report_csv(&bad), Err(CliError::Report(_))));
    }

    #[test]
    fn summary_flags() {
        let s = summarize(&report(), "m", "dempster").unwrap();
        assert!(!s.breach);
        assert_eq!(s.tolerance_records, [2]);
        assert_eq!(s.min_window_effectiveness, 0.5);
        assert_eq!(s.windows[0].first_record, 1);
    }
}
