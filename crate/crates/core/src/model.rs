//! The Ev-IOHMM: frame, input-conditioned transition constraints, per-state
//! emission constraints, prior and normalization policy.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::belief::{Frame, MassFunction, NormalizationRule};
use crate::error::{Error, Result};
use crate::possibility::{
    singleton_likelihoods_to_bba, singleton_possibilities_to_bba, singleton_probabilities_to_bba,
    ConstraintVector,
};
use crate::trace::Observation;

/// How per-state constraint evaluations are turned into a BBA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    /// Values are possibilities: consonant BBA through max-plausibility.
    #[default]
    Possibility,
    /// Values are likelihoods: BBA through the product commonality.
    Likelihood,
    /// Values are probabilities: Bayesian BBA, the missing mass on `∅`.
    Probability,
}

impl EvidenceKind {
    /// Converts one value per state into a BBA on `frame`.
    ///
    /// An all-zero likelihood vector means no state is compatible and maps to
    /// the `∅`-categorical BBA, as it does for the other kinds.
    pub fn to_bba(self, frame: &Frame, values: &[f64]) -> Result<MassFunction> {
        match self {
            EvidenceKind::Possibility => singleton_possibilities_to_bba(frame, values),
            EvidenceKind::Probability => singleton_probabilities_to_bba(frame, values),
            EvidenceKind::Likelihood => {
                if values.len() == frame.len() && values.iter().all(|v| *v == 0.0) {
                    Ok(MassFunction::empty_categorical(frame.clone()))
                } else {
                    singleton_likelihoods_to_bba(frame, values)
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EvidenceKind::Possibility => "possibility",
            EvidenceKind::Likelihood => "likelihood",
            EvidenceKind::Probability => "probability",
        }
    }
}

/// An evidential input/output HMM.
///
/// `transitions[i * N + j]` constrains the input that moves state `i` to
/// state `j`; `emissions[i]` constrains the output expected in state `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvIohmmModel {
    frame: Frame,
    transitions: Vec<ConstraintVector>,
    emissions: Vec<ConstraintVector>,
    prior: MassFunction,
    normalization: NormalizationRule,
    evidence: EvidenceKind,
}

impl EvIohmmModel {
    /// Builds a model with a vacuous prior, Dempster normalization and
    /// possibilistic evidence.
    pub fn new(
        frame: Frame,
        transitions: Vec<Vec<ConstraintVector>>,
        emissions: Vec<ConstraintVector>,
    ) -> Result<Self> {
        let n = frame.len();
        if transitions.len() != n {
            return Err(Error::InvalidModel(format!(
                "transition table has {} rows for {n} states",
                transitions.len()
            )));
        }
        if let Some((i, row)) = transitions.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidModel(format!(
                "transition row for `{}` has {} entries, expected {n}",
                frame.labels()[i],
                row.len()
            )));
        }
        if emissions.len() != n {
            return Err(Error::InvalidModel(format!(
                "{} emission constraints for {n} states",
                emissions.len()
            )));
        }
        let prior = MassFunction::vacuous(frame.clone());
        Ok(Self {
            frame,
            transitions: transitions.into_iter().flatten().collect(),
            emissions,
            prior,
            normalization: NormalizationRule::default(),
            evidence: EvidenceKind::default(),
        })
    }

    pub fn with_prior(mut self, prior: MassFunction) -> Result<Self> {
        if prior.frame() != &self.frame {
            return Err(Error::FrameMismatch);
        }
        self.prior = prior;
        Ok(self)
    }

    pub fn with_normalization(mut self, rule: NormalizationRule) -> Self {
        self.normalization = rule;
        self
    }

    pub fn with_evidence(mut self, evidence: EvidenceKind) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn num_states(&self) -> usize {
        self.frame.len()
    }

    pub fn transition(&self, from: usize, to: usize) -> &ConstraintVector {
        &self.transitions[from * self.frame.len() + to]
    }

    pub fn emission(&self, state: usize) -> &ConstraintVector {
        &self.emissions[state]
    }

    pub fn emissions(&self) -> &[ConstraintVector] {
        &self.emissions
    }

    pub fn prior(&self) -> &MassFunction {
        &self.prior
    }

    pub fn normalization(&self) -> NormalizationRule {
        self.normalization
    }

    pub fn evidence(&self) -> EvidenceKind {
        self.evidence
    }

    /// Evaluations of every arc on `input`, row-major `N × N`.
    pub fn transition_values(&self, input: &Observation) -> Result<Vec<f64>> {
        self.transitions
            .iter()
            .map(|cv| cv.evaluate(input))
            .collect()
    }

    /// Evaluations of every state's emission constraints on `output`.
    pub fn emission_values(&self, output: &Observation) -> Result<Vec<f64>> {
        self.emissions
            .iter()
            .map(|cv| cv.evaluate(output))
            .collect()
    }

    /// True when every active constraint is a crisp indicator.
    pub fn is_crisp(&self) -> bool {
        self.transitions.iter().all(ConstraintVector::is_crisp)
            && self.emissions.iter().all(ConstraintVector::is_crisp)
    }

    /// Variables read by at least one transition.
    pub fn input_variables(&self) -> BTreeSet<&str> {
        self.transitions
            .iter()
            .flat_map(|cv| cv.variables())
            .collect()
    }

    /// Variables read by at least one emission.
    pub fn output_variables(&self) -> BTreeSet<&str> {
        self.emissions
            .iter()
            .flat_map(|cv| cv.variables())
            .collect()
    }
}
