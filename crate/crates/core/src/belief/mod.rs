//! Belief-function algebra on a finite frame of discernment.
//!
//! Every set function is stored densely, one value per subset, indexed by the
//! subset's bitmask. Transforms between representations run in `O(N·2^N)`
//! through fast zeta/Möbius passes over the subset lattice.

mod combine;
pub(crate) mod transform;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use combine::{
    combine_conjunctive, combine_conjunctive_normalized, combine_conjunctive_via_commonality,
    combine_disjunctive, combine_disjunctive_via_implicability, conflict_from_commonalities,
    conflict_mass, normalize, NormalizationRule, NormalizedCombination,
};
pub use transform::{
    commonality_to_mass, implicability_to_mass, mass_to_belief, mass_to_commonality,
    mass_to_implicability, mass_to_plausibility, plausibility_to_mass,
};

/// Largest supported frame: powerset tables hold `2^20` entries.
pub const MAX_STATES: usize = 20;

/// Absolute tolerance used when validating masses.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Tolerance on the total mass recovered from an inverse transform.
pub const INVERSE_SUM_TOLERANCE: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Frame
// ---------------------------------------------------------------------------

/// An ordered set of state labels; state `i` is bit `i` of a subset index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidFrame(
                "a frame needs at least one state".into(),
            ));
        }
        if labels.len() > MAX_STATES {
            return Err(Error::InvalidFrame(format!(
                "{} states exceeds the maximum of {MAX_STATES}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(Error::InvalidFrame(format!("state {i} has an empty label")));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidFrame(format!(
                    "duplicate state label `{label}`"
                )));
            }
        }
        Ok(Self {
            labels: labels.into(),
        })
    }

    /// Number of states `N`.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of subsets, `2^N`.
    pub fn powerset_len(&self) -> usize {
        1 << self.labels.len()
    }

    /// Bitmask of the whole frame Ω.
    pub fn full_set(&self) -> usize {
        self.powerset_len() - 1
    }

    pub fn singleton(&self, state: usize) -> usize {
        debug_assert!(state < self.len());
        1 << state
    }

    /// Bitmask of the subset made of the named states.
    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels.iter().try_fold(0usize, |acc, label| {
            let label = label.as_ref();
            self.index_of(label)
                .map(|i| acc | (1 << i))
                .ok_or_else(|| Error::InvalidFrame(format!("unknown state `{label}`")))
        })
    }

    /// Human readable form of a subset, e.g. `{x1,x2}` or `∅`.
    pub fn describe(&self, subset: usize) -> String {
        if subset == 0 {
            return "∅".to_string();
        }
        let members: Vec<&str> = (0..self.len())
            .filter(|i| subset & (1 << i) != 0)
            .map(|i| self.labels[i].as_str())
            .collect();
        format!("{{{}}}", members.join(","))
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

// ---------------------------------------------------------------------------
// Mass functions
// ---------------------------------------------------------------------------

/// A basic belief assignment over `2^Ω`. Mass on `∅` is allowed (open world).
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    masses: Vec<f64>,
}

impl MassFunction {
    /// Validated constructor: one non-negative mass per subset, summing to 1.
    pub fn new(frame: Frame, mut masses: Vec<f64>) -> Result<Self> {
        if masses.len() != frame.powerset_len() {
            return Err(Error::InvalidMass(format!(
                "expected {} masses for a frame of {} states, got {}",
                frame.powerset_len(),
                frame.len(),
                masses.len()
            )));
        }
        for (subset, m) in masses.iter_mut().enumerate() {
            if !m.is_finite() {
                return Err(Error::InvalidMass(format!(
                    "mass of {} is not finite",
                    frame.describe(subset)
                )));
            }
            if *m < 0.0 {
                if *m < -MASS_TOLERANCE {
                    return Err(Error::InvalidMass(format!(
                        "mass of {} is negative ({m})",
                        frame.describe(subset)
                    )));
                }
                *m = 0.0;
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMass(format!("masses sum to {total}, not 1")));
        }
        Ok(Self { frame, masses })
    }

    /// Builds a mass function from `(subset, mass)` pairs; unlisted subsets get 0.
    pub fn from_focal(frame: Frame, focal: &[(usize, f64)]) -> Result<Self> {
        let mut masses = vec![0.0; frame.powerset_len()];
        for &(subset, m) in focal {
            if subset >= masses.len() {
                return Err(Error::InvalidMass(format!(
                    "subset index {subset} is outside the frame"
                )));
            }
            masses[subset] += m;
        }
        Self::new(frame, masses)
    }

    /// All the mass on a single subset.
    pub fn categorical(frame: Frame, subset: usize) -> Self {
        assert!(subset < frame.powerset_len(), "subset outside the frame");
        let mut masses = vec![0.0; frame.powerset_len()];
        masses[subset] = 1.0;
        Self { frame, masses }
    }

    /// Total ignorance, `m(Ω) = 1`.
    pub fn vacuous(frame: Frame) -> Self {
        let full = frame.full_set();
        Self::categorical(frame, full)
    }

    /// Total conflict, `m(∅) = 1`. Neutral element of the disjunctive rule.
    pub fn empty_categorical(frame: Frame) -> Self {
        Self::categorical(frame, 0)
    }

    /// Wraps values produced by exact operations on valid inputs.
    pub(crate) fn from_raw(frame: Frame, masses: Vec<f64>) -> Self {
        debug_assert_eq!(masses.len(), frame.powerset_len());
        Self { frame, masses }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, subset: usize) -> f64 {
        self.masses[subset]
    }

    /// Mass on the empty set.
    pub fn conflict(&self) -> f64 {
        self.masses[0]
    }

    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn is_normal(&self) -> bool {
        self.masses[0] == 0.0
    }

    /// True when every focal element is a singleton (or `∅`).
    pub fn is_bayesian(&self) -> bool {
        self.focal_elements().all(|(s, _)| s.count_ones() <= 1)
    }

    /// `(subset, mass)` for every subset with strictly positive mass.
    pub fn focal_elements(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(s, &m)| (s, m))
    }
}

impl fmt::Display for MassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .focal_elements()
            .map(|(s, m)| format!("{}:{m}", self.frame.describe(s)))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The vacuous mass function on `frame`.
pub fn vacuous(frame: &Frame) -> MassFunction {
    MassFunction::vacuous(frame.clone())
}

// ---------------------------------------------------------------------------
// Other set functions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetFunctionKind {
    Mass,
    Commonality,
    Plausibility,
    Belief,
}

/// A dense set function of a given kind over `2^Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction {
    frame: Frame,
    kind: SetFunctionKind,
    values: Vec<f64>,
}

impl SetFunction {
    pub fn new(frame: Frame, kind: SetFunctionKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != frame.powerset_len() {
            return Err(Error::InvalidSetFunction(format!(
                "expected {} values, got {}",
                frame.powerset_len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSetFunction(format!("non-finite value {v}")));
        }
        Ok(Self {
            frame,
            kind,
            values,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn kind(&self) -> SetFunctionKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, subset: usize) -> f64 {
        self.values[subset]
    }

    pub(crate) fn from_raw(frame: Frame, kind: SetFunctionKind, values: Vec<f64>) -> Self {
        Self {
            frame,
            kind,
            values,
        }
    }

    pub(crate) fn into_values(self) -> Vec<f64> {
        self.values
    }
}
