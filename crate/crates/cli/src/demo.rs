//! The two-state luminosity walkthrough: every intermediate table of one
//! prediction/emission step, checked against reference values.

use std::fmt::Write;

use eviohmm::belief::mass_to_plausibility;
use eviohmm::forward::{emission_bba, predict};
use eviohmm::transition::singleton_transition_bbas;
use eviohmm::{build_transition_rows, combine_conjunctive, MassFunction, Observation};

use crate::error::{CliError, Result};
use crate::model_file::{parse_model, LoadedModel};

pub const LUMINOSITY_MODEL: &str = include_str!("../data/models/luminosity.model");

pub const TOLERANCE: f64 = 1e-9;

const PRES: f64 = 3.5;
const LUM: f64 = 2.34;

/// One reference value next to the value computed here.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub table: &'static str,
    pub cell: String,
    pub expected: f64,
    pub actual: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.expected - self.actual).abs() <= TOLERANCE
    }
}

#[derive(Debug, Clone)]
pub struct Walkthrough {
    pub text: String,
    pub checks: Vec<Check>,
}

impl Walkthrough {
    pub fn mismatches(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Error naming the first mismatching cell, if any.
    pub fn verdict(&self) -> Result<()> {
        match self.mismatches().next() {
            None => Ok(()),
            Some(c) => Err(CliError::Demo(format!(
                "{} {}: expected {}, computed {}",
                c.table, c.cell, c.expected, c.actual
            ))),
        }
    }
}

pub fn luminosity_model() -> LoadedModel {
    parse_model(LUMINOSITY_MODEL, "luminosity.model").expect("bundled model is valid")
}

struct Builder {
    text: String,
    checks: Vec<Check>,
    subsets: Vec<String>,
}

impl Builder {
    fn heading(&mut self, title: &str) {
        let _ = writeln!(self.text, "\n{title}");
    }

    fn row(
        &mut self,
        table: &'static str,
        label: &str,
        columns: &[String],
        actual: &[f64],
        expected: &[f64],
    ) {
        let cells: Vec<String> = columns
            .iter()
            .zip(actual)
            .map(|(c, v)| format!("{c}={}", fmt(*v)))
            .collect();
        let _ = write!(self.text, "  {label:<8} {}", cells.join("  "));
        let mut bad = Vec::new();
        for ((column, a), e) in columns.iter().zip(actual).zip(expected) {
            let check = Check {
                table,
                cell: format!("{label} {column}"),
                expected: *e,
                actual: *a,
            };
            if !check.passed() {
                bad.push(format!("{column}: expected {}", fmt(*e)));
            }
            self.checks.push(check);
        }
        if bad.is_empty() {
            let _ = writeln!(self.text, "   ok");
        } else {
            let _ = writeln!(self.text, "   MISMATCH ({})", bad.join(", "));
        }
    }

    fn masses(&mut self, table: &'static str, label: &str, m: &MassFunction, expected: &[f64]) {
        let subsets = self.subsets.clone();
        self.row(table, label, &subsets, m.masses(), expected);
    }

    fn scalar(&mut self, table: &'static str, label: &str, actual: f64, expected: f64) {
        self.row(table, label, &["value".to_string()], &[actual], &[expected]);
    }
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Runs the walkthrough: `pres = 3.5` at `t - 1`, `lum = 2.34` at `t`, no
/// prior knowledge of the state at `t - 1`.
pub fn walkthrough() -> Result<Walkthrough> {
    let loaded = luminosity_model();
    let model = &loaded.model;
    let frame = model.frame();
    let states = frame.labels().to_vec();
    let subsets: Vec<String> = (0..frame.powerset_len())
        .map(|a| frame.describe(a))
        .collect();
    let mut b = Builder {
        text: String::new(),
        checks: Vec::new(),
        subsets: subsets.clone(),
    };
    let input: Observation = [("pres".to_string(), PRES)].into();
    let output: Observation = [("lum".to_string(), LUM)].into();
    let _ = writeln!(
        b.text,
        "model `{}`: pres(t-1) = {PRES}, lum(t) = {LUM}",
        loaded.document.name
    );

    b.heading("Table 1  transition possibilities");
    let values = model.transition_values(&input)?;
    for (i, from) in states.iter().enumerate() {
        b.row(
            "Table 1",
            from,
            &states,
            &values[i * 2..i * 2 + 2],
            &[0.75, 0.0],
        );
    }

    let singles = singleton_transition_bbas(model, &input)?;
    b.heading("Table 2  plausibility of the transition BBAs");
    for (from, m) in states.iter().zip(&singles) {
        let pl = mass_to_plausibility(m);
        b.row(
            "Table 2",
            &format!("[{from}]"),
            &subsets,
            pl.values(),
            &[0.0, 0.75, 0.0, 0.75],
        );
    }
    b.heading("Table 3  transition BBAs conditional on singletons");
    for (from, m) in states.iter().zip(&singles) {
        b.masses("Table 3", &format!("[{from}]"), m, &[0.25, 0.75, 0.0, 0.0]);
    }

    let rows = build_transition_rows(model, &input)?;
    b.heading("Table 4  conditional transition BBAs on every subset");
    let expected_rows = [
        [1.0, 0.0, 0.0, 0.0],
        [0.25, 0.75, 0.0, 0.0],
        [0.25, 0.75, 0.0, 0.0],
        [0.0625, 0.9375, 0.0, 0.0],
    ];
    for (subset, expected) in expected_rows.iter().enumerate() {
        b.masses(
            "Table 4",
            &format!("[{}]", subsets[subset]),
            rows.row(subset),
            expected,
        );
    }

    let vacuous = MassFunction::vacuous(frame.clone());
    let predicted = predict(&vacuous, &rows)?;
    b.heading("Table 5  prediction from a vacuous BBA at t-1");
    b.masses("Table 5", "m^", &predicted, &[0.25, 0.75, 0.0, 0.0]);

    b.heading("Table 6  emission possibilities");
    let emission_values = model.emission_values(&output)?;
    b.row("Table 6", "lum", &states, &emission_values, &[1.0, 0.0]);

    let emission = emission_bba(model, &output)?;
    b.heading("Table 7  emission plausibility");
    let pl = mass_to_plausibility(&emission);
    b.row(
        "Table 7",
        "pl",
        &subsets,
        pl.values(),
        &[0.0, 1.0, 0.0, 1.0],
    );
    b.heading("Table 8  emission BBA");
    b.masses("Table 8", "m", &emission, &[0.0, 1.0, 0.0, 0.0]);

    let focused = MassFunction::categorical(frame.clone(), frame.singleton(0));
    let from_singleton = predict(&focused, &rows)?;
    let _ = writeln!(
        b.text,
        "  (from a BBA focused on a singleton at t-1 the prediction is {:?})",
        from_singleton.masses()
    );

    let combined = combine_conjunctive(&predicted, &emission)?;
    b.heading("Step  prediction combined with the emission");
    b.masses("Step", "m", &combined, &[0.25, 0.75, 0.0, 0.0]);
    b.scalar("Step", "conflict", combined.conflict(), 0.25);
    b.scalar("Step", "1-conflict", 1.0 - combined.conflict(), 0.75);

    let failed = b.checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(
        b.text,
        "\n{} of {} published values reproduced within {TOLERANCE:e}",
        b.checks.len() - failed,
        b.checks.len()
    );
    Ok(Walkthrough {
        text: b.text,
        checks: b.checks,
    })
}
