//! JSON model files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "luminosity",
//!   "states": ["x1", "x2"],
//!   "inputs":  [{ "name": "pres", "range": [0, 30] }],
//!   "outputs": [{ "name": "lum",  "range": [0, 40] }],
//!   "normalization": "dempster",
//!   "transitions": [
//!     { "from": "*", "to": "x1",
//!       "constraints": [{ "variable": "pres", "kind": "ramp_down", "a": 3, "b": 5 }] },
//!     { "from": "x2", "to": "x1", "forbidden": true }
//!   ],
//!   "emissions": [
//!     { "state": "x1", "constraints": [{ "variable": "lum", "kind": "ramp_down", "a": 5, "b": 10 }] }
//!   ]
//! }
//! ```
//!
//! `from: "*"` stands for every source state. Every ordered pair of states
//! must be covered exactly once, either by constraints or by `forbidden`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use eviohmm::possibility::{Constraint, ConstraintVector, PossibilityDistribution};
use eviohmm::{EvIohmmModel, EvidenceKind, Frame, MassFunction, NormalizationRule};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Wildcard source state in a transition declaration.
pub const ANY_STATE: &str = "*";

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub inputs: Vec<VariableDecl>,
    #[serde(default)]
    pub outputs: Vec<VariableDecl>,
    #[serde(default)]
    pub evidence: EvidenceKind,
    #[serde(default)]
    pub normalization: NormalizationRule,
    /// Focal elements of the initial BBA; vacuous when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<FocalDecl>>,
    pub transitions: Vec<TransitionDecl>,
    pub emissions: Vec<EmissionDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub unit: String,
    /// Plausible values `[lo, hi]`, used when generating traces.
    pub range: [f64; 2],
    /// Value used by generated traces when no constraint pins the variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalDecl {
    pub states: Vec<String>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDecl {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<ConstraintDecl>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub forbidden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionDecl {
    pub state: String,
    pub constraints: Vec<ConstraintDecl>,
}

/// One tolerance curve; the curve's own fields (`kind`, parameters) sit
/// alongside `variable`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(flatten)]
    pub distribution: PossibilityDistribution,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inhibited: bool,
}

impl ModelDocument {
    pub fn input(&self, name: &str) -> Option<&VariableDecl> {
        self.inputs.iter().find(|v| v.name == name)
    }

    pub fn output(&self, name: &str) -> Option<&VariableDecl> {
        self.outputs.iter().find(|v| v.name == name)
    }
}

/// A parsed document together with the model it describes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedModel {
    pub document: ModelDocument,
    pub model: EvIohmmModel,
}

// ---------------------------------------------------------------------------
// Reading and writing
// ---------------------------------------------------------------------------

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_model(&text, &path.display().to_string())
}

/// Parses and validates a model document. `origin` names the source in
/// diagnostics.
pub fn parse_model(text: &str, origin: &str) -> Result<LoadedModel> {
    let document: ModelDocument = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        location: format!("{}:{}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let model = build_model(&document, origin)?;
    Ok(LoadedModel { document, model })
}

pub fn write_model(document: &ModelDocument) -> String {
    let mut text = serde_json::to_string_pretty(document).expect("model documents serialize");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Validator<'a> {
    origin: &'a str,
}

impl Validator<'_> {
    fn fail(&self, field: impl Into<String>, message: impl ToString) -> CliError {
        CliError::Validation {
            path: self.origin.to_string(),
            field: field.into(),
            message: message.to_string(),
        }
    }

    fn variables(&self, field: &str, decls: &[VariableDecl]) -> Result<BTreeSet<String>> {
        let mut names = BTreeSet::new();
        for (i, decl) in decls.iter().enumerate() {
            let at = format!("{field}[{i}]");
            if decl.name.trim().is_empty() {
                return Err(self.fail(at, "variable name is empty"));
            }
            if !names.insert(decl.name.clone()) {
                return Err(self.fail(at, format!("variable `{}` declared twice", decl.name)));
            }
            let [lo, hi] = decl.range;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(self.fail(at, format!("range [{lo}, {hi}] must satisfy lo < hi")));
            }
            if let Some(v) = decl.nominal {
                if !(lo..=hi).contains(&v) {
                    return Err(self.fail(at, format!("nominal {v} outside range [{lo}, {hi}]")));
                }
            }
        }
        Ok(names)
    }

    fn constraints(
        &self,
        field: &str,
        decls: &[ConstraintDecl],
        declared: &BTreeSet<String>,
        role: &str,
    ) -> Result<ConstraintVector> {
        if decls.is_empty() {
            return Err(self.fail(field, "no constraints (use `forbidden` to disable an arc)"));
        }
        let mut entries = Vec::with_capacity(decls.len());
        for (i, decl) in decls.iter().enumerate() {
            let at = format!("{field}.constraints[{i}]");
            decl.distribution
                .validate()
                .map_err(|e| self.fail(&at, e))?;
            if let Some(var) = &decl.variable {
                if !declared.contains(var) {
                    return Err(self.fail(&at, format!("`{var}` is not a declared {role}")));
                }
            }
            entries.push(Constraint {
                variable: decl.variable.clone(),
                distribution: decl.distribution,
                inhibited: decl.inhibited,
            });
        }
        ConstraintVector::new(entries).map_err(|e| self.fail(field, e))
    }
}

fn build_model(doc: &ModelDocument, origin: &str) -> Result<EvIohmmModel> {
    let v = Validator { origin };
    if doc.format_version != FORMAT_VERSION {
        return Err(v.fail(
            "format_version",
            format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                doc.format_version
            ),
        ));
    }
    if doc.name.trim().is_empty() {
        return Err(v.fail("name", "model name is empty"));
    }
    if doc.states.iter().any(|s| s == ANY_STATE) {
        return Err(v.fail("states", format!("`{ANY_STATE}` is reserved")));
    }
    let frame = Frame::new(doc.states.iter().cloned()).map_err(|e| v.fail("states", e))?;
    let n = frame.len();
    let inputs = v.variables("inputs", &doc.inputs)?;
    let outputs = v.variables("outputs", &doc.outputs)?;

    let state_index = |field: &str, name: &str| {
        frame
            .index_of(name)
            .ok_or_else(|| v.fail(field, format!("unknown state `{name}`")))
    };

    let mut arcs: BTreeMap<(usize, usize), (usize, ConstraintVector)> = BTreeMap::new();
    for (i, t) in doc.transitions.iter().enumerate() {
        let field = format!("transitions[{i}] ({} -> {})", t.from, t.to);
        let to = state_index(&field, &t.to)?;
        let sources: Vec<usize> = if t.from == ANY_STATE {
            (0..n).collect()
        } else {
            vec![state_index(&field, &t.from)?]
        };
        let cv = match (t.forbidden, t.constraints.is_empty()) {
            (true, true) => ConstraintVector::forbidden(),
            (true, false) => {
                return Err(v.fail(field, "a forbidden arc cannot carry constraints"));
            }
            (false, _) => v.constraints(&field, &t.constraints, &inputs, "input")?,
        };
        for from in sources {
            if let Some((first, _)) = arcs.insert((from, to), (i, cv.clone())) {
                return Err(v.fail(
                    field,
                    format!(
                        "arc {} -> {} already defined by transitions[{first}]",
                        doc.states[from], doc.states[to]
                    ),
                ));
            }
        }
    }
    let mut transitions = Vec::with_capacity(n);
    for from in 0..n {
        let mut row = Vec::with_capacity(n);
        for to in 0..n {
            let (_, cv) = arcs.remove(&(from, to)).ok_or_else(|| {
                v.fail(
                    "transitions",
                    format!(
                        "arc {} -> {} is neither constrained nor forbidden",
                        doc.states[from], doc.states[to]
                    ),
                )
            })?;
            row.push(cv);
        }
        transitions.push(row);
    }

    let mut emissions: Vec<Option<ConstraintVector>> = vec![None; n];
    for (i, e) in doc.emissions.iter().enumerate() {
        let field = format!("emissions[{i}] ({})", e.state);
        let state = state_index(&field, &e.state)?;
        if emissions[state].is_some() {
            return Err(v.fail(field, format!("state `{}` has two emissions", e.state)));
        }
        emissions[state] = Some(v.constraints(&field, &e.constraints, &outputs, "output")?);
    }
    let emissions = emissions
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            e.ok_or_else(|| {
                v.fail(
                    "emissions",
                    format!("state `{}` has no emission", doc.states[i]),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut model = EvIohmmModel::new(frame.clone(), transitions, emissions)
        .map_err(|e| v.fail("model", e))?
        .with_evidence(doc.evidence)
        .with_normalization(doc.normalization);

    if let Some(prior) = &doc.prior {
        let mut focal = Vec::with_capacity(prior.len());
        for (i, f) in prior.iter().enumerate() {
            let subset = frame
                .subset(&f.states)
                .map_err(|e| v.fail(format!("prior[{i}]"), e))?;
            focal.push((subset, f.mass));
        }
        let m = MassFunction::from_focal(frame, &focal).map_err(|e| v.fail("prior", e))?;
        model = model.with_prior(m).map_err(|e| v.fail("prior", e))?;
    }
    Ok(model)
}
