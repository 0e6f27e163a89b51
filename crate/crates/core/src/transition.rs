//! Conditional transition BBAs `m[A, u]` for every subset `A` of the previous
//! states.
//!
//! Only the rows conditioned on singletons come from the model's constraints.
//! The others follow from the disjunctive rule: `m[A] = ∪_{x ∈ A} m[{x}]`,
//! with `m[∅]` the `∅`-categorical BBA (the neutral element of the rule).

use crate::belief::{combine_disjunctive, Frame, MassFunction};
use crate::error::Result;
use crate::model::EvIohmmModel;
use crate::trace::Observation;

/// One transition BBA per source state, evaluated on `input`.
pub fn singleton_transition_bbas(
    model: &EvIohmmModel,
    input: &Observation,
) -> Result<Vec<MassFunction>> {
    let n = model.num_states();
    let values = model.transition_values(input)?;
    values
        .chunks(n)
        .map(|row| model.evidence().to_bba(model.frame(), row))
        .collect()
}

/// The full `2^N`-row conditional transition structure for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTransitionBBAs {
    frame: Frame,
    rows: Vec<MassFunction>,
}

impl ConditionalTransitionBBAs {
    /// Extends singleton rows (`rows[i]` conditioned on state `i`) to every subset.
    pub fn from_singleton_rows(frame: &Frame, singletons: &[MassFunction]) -> Result<Self> {
        assert_eq!(singletons.len(), frame.len(), "one row per state");
        let size = frame.powerset_len();
        let mut rows = Vec::with_capacity(size);
        rows.push(MassFunction::empty_categorical(frame.clone()));
        for subset in 1..size {
            let low = subset.trailing_zeros() as usize;
            let rest = subset & (subset - 1);
            let row = if rest == 0 {
                singletons[low].clone()
            } else {
                combine_disjunctive(&rows[rest], &singletons[low])?
            };
            rows.push(row);
        }
        Ok(Self {
            frame: frame.clone(),
            rows,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// BBA on the next state given the previous state lies in `subset`.
    pub fn row(&self, subset: usize) -> &MassFunction {
        &self.rows[subset]
    }

    pub fn rows(&self) -> &[MassFunction] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Evaluates the model's transitions on `input` and builds every conditional row.
pub fn build_transition_rows(
    model: &EvIohmmModel,
    input: &Observation,
) -> Result<ConditionalTransitionBBAs> {
    let singletons = singleton_transition_bbas(model, input)?;
    ConditionalTransitionBBAs::from_singleton_rows(model.frame(), &singletons)
}
