//! CSV traces: a `timestamp` column, then `in.<name>` and `out.<name>`
//! columns. Lines starting with `#` are comments and carry metadata such as
//! the generation manifest.

use std::path::Path;

use eviohmm::{EvIohmmModel, Observation, TraceRecord};

use crate::error::{CliError, Result};

pub const TIMESTAMP: &str = "timestamp";
pub const INPUT_PREFIX: &str = "in.";
pub const OUTPUT_PREFIX: &str = "out.";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceFile {
    /// Comment lines without the leading `#` and surrounding blanks.
    pub comments: Vec<String>,
    /// Input variable names, in column order.
    pub inputs: Vec<String>,
    /// Output variable names, in column order.
    pub outputs: Vec<String>,
    pub records: Vec<TraceRecord>,
}

impl TraceFile {
    /// Value of a `key=value` token found in the comments.
    pub fn comment_value(&self, key: &str) -> Option<&str> {
        let prefix = format!("{key}=");
        self.comments
            .iter()
            .flat_map(|c| c.split_whitespace())
            .find_map(|token| token.strip_prefix(prefix.as_str()))
    }
}

enum Column {
    Timestamp,
    Input(String),
    Output(String),
}

pub fn load_trace(path: &Path) -> Result<TraceFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_trace(&text, &path.display().to_string())
}

/// Parses a trace. Empty cells are read as absent values; [`check_trace`]
/// decides which absences are acceptable for a given model.
pub fn parse_trace(text: &str, origin: &str) -> Result<TraceFile> {
    let parse_err = |location: String, message: String| CliError::Parse {
        path: origin.to_string(),
        location,
        message,
    };
    let comments = text
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix('#'))
        .map(|c| c.trim().to_string())
        .collect();

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err("header".into(), e.to_string()))?
        .clone();

    let mut columns = Vec::with_capacity(headers.len());
    let mut file = TraceFile {
        comments,
        ..TraceFile::default()
    };
    for name in headers.iter() {
        let column = if name == TIMESTAMP {
            Column::Timestamp
        } else if let Some(v) = name.strip_prefix(INPUT_PREFIX) {
            file.inputs.push(v.to_string());
            Column::Input(v.to_string())
        } else if let Some(v) = name.strip_prefix(OUTPUT_PREFIX) {
            file.outputs.push(v.to_string());
            Column::Output(v.to_string())
        } else {
            return Err(parse_err(
                "header".into(),
                format!("column `{name}` is neither `{TIMESTAMP}`, `{INPUT_PREFIX}*` nor `{OUTPUT_PREFIX}*`"),
            ));
        };
        columns.push(column);
    }
    let timestamps = columns
        .iter()
        .filter(|c| matches!(c, Column::Timestamp))
        .count();
    if timestamps != 1 {
        return Err(parse_err(
            "header".into(),
            format!("expected exactly one `{TIMESTAMP}` column, found {timestamps}"),
        ));
    }

    let mut previous = f64::NEG_INFINITY;
    for (index, row) in reader.records().enumerate() {
        let number = index + 1;
        let row = row.map_err(|e| parse_err(format!("record {number}"), e.to_string()))?;
        let location = || {
            let line = row.position().map_or(0, |p| p.line());
            format!("line {line} (record {number})")
        };
        let mut record = TraceRecord::default();
        let mut timestamp = None;
        for (column, cell) in columns.iter().zip(row.iter()) {
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| parse_err(location(), format!("`{cell}` is not a finite number")))?;
            match column {
                Column::Timestamp => timestamp = Some(value),
                Column::Input(v) => {
                    record.inputs.insert(v.clone(), value);
                }
                Column::Output(v) => {
                    record.outputs.insert(v.clone(), value);
                }
            }
        }
        record.timestamp =
            timestamp.ok_or_else(|| parse_err(location(), format!("missing `{TIMESTAMP}`")))?;
        if record.timestamp < previous {
            return Err(parse_err(
                location(),
                format!(
                    "timestamp {} goes back in time (previous {previous})",
                    record.timestamp
                ),
            ));
        }
        previous = record.timestamp;
        file.records.push(record);
    }
    Ok(file)
}

/// Checks that `trace` provides every variable `model` reads.
///
/// Outputs are needed on every record. Inputs drive the transition into the
/// next record, so only the last record may leave them empty.
pub fn check_trace(trace: &TraceFile, model: &EvIohmmModel, origin: &str) -> Result<()> {
    let fail = |field: String, message: String| CliError::Validation {
        path: origin.to_string(),
        field,
        message,
    };
    if trace.records.is_empty() {
        return Err(fail("records".into(), "trace has no records".into()));
    }
    let required = |vars: Vec<&str>, declared: &[String], prefix: &str| {
        for v in vars {
            if !declared.iter().any(|d| d == v) {
                return Err(fail(
                    format!("{prefix}{v}"),
                    format!("missing column `{prefix}{v}` required by the model (record 1)"),
                ));
            }
        }
        Ok(())
    };
    let inputs: Vec<&str> = model.input_variables().into_iter().collect();
    let outputs: Vec<&str> = model.output_variables().into_iter().collect();
    required(inputs.clone(), &trace.inputs, INPUT_PREFIX)?;
    required(outputs.clone(), &trace.outputs, OUTPUT_PREFIX)?;

    let last = trace.records.len() - 1;
    for (i, record) in trace.records.iter().enumerate() {
        let missing = |obs: &Observation, vars: &[&str], prefix: &str| {
            vars.iter().find(|v| !obs.contains_key(**v)).map(|v| {
                fail(
                    format!("{prefix}{v}"),
                    format!("record {} has no value", i + 1),
                )
            })
        };
        if let Some(err) = missing(&record.outputs, &outputs, OUTPUT_PREFIX) {
            return Err(err);
        }
        if i < last {
            if let Some(err) = missing(&record.inputs, &inputs, INPUT_PREFIX) {
                return Err(err);
            }
        }
    }
    Ok(())
}

/// Serializes a trace with its comments first.
pub fn write_trace(trace: &TraceFile) -> String {
    let mut out = String::new();
    for comment in &trace.comments {
        out.push_str("# ");
        out.push_str(comment);
        out.push('\n');
    }
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let header = std::iter::once(TIMESTAMP.to_string())
        .chain(trace.inputs.iter().map(|v| format!("{INPUT_PREFIX}{v}")))
        .chain(trace.outputs.iter().map(|v| format!("{OUTPUT_PREFIX}{v}")));
    writer.write_record(header).expect("in-memory write");
    let cell = |obs: &Observation, v: &String| obs.get(v).map(format_value).unwrap_or_default();
    for r in &trace.records {
        let row = std::iter::once(format_value(&r.timestamp))
            .chain(trace.inputs.iter().map(|v| cell(&r.inputs, v)))
            .chain(trace.outputs.iter().map(|v| cell(&r.outputs, v)));
        writer.write_record(row).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8"));
    out
}

/// Shortest decimal form that reads back to the same `f64`.
pub fn format_value(v: &f64) -> String {
    format!("{v}")
}
