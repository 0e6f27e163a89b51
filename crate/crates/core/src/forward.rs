//! The evidential forward recursion.
//!
//! Each step predicts the next-state BBA from the current one and the previous
//! input, combines it conjunctively with the emission BBA of the current
//! output, records the conflict `m(∅)` and normalizes.
//!
//! Prediction mixes the conditional rows with the current masses,
//! `q̂(A) = Σ_X m(X)·q[X, u](A)`. Two equivalent routes are implemented:
//!
//! - [`PredictionPath::Commonality`] materializes all `2^N` conditional rows
//!   and mixes their commonalities, `O(2^{2N})` per step;
//! - [`PredictionPath::Plausibility`] never builds the rows. The mixture is
//!   linear, so it can be taken in plausibility space, where a row conditioned
//!   on `X` is `pl[X](A) = 1 - Π_{x ∈ X} (1 - pl[{x}](A))`. The cost is
//!   `O(2^N)` per focal element of the current BBA.

use crate::belief::transform::subset_mobius;
use crate::belief::{
    combine_conjunctive_normalized, commonality_to_mass, mass_to_commonality, mass_to_plausibility,
    MassFunction, SetFunction, SetFunctionKind,
};
use crate::error::{Error, Result};
use crate::model::{EvIohmmModel, EvidenceKind};
use crate::possibility::max_plausibility;
use crate::trace::Observation;
use crate::transition::{build_transition_rows, ConditionalTransitionBBAs};

/// Which algebraic route computes the state prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredictionPath {
    #[default]
    Plausibility,
    Commonality,
}

// ---------------------------------------------------------------------------
// Prediction
// ---------------------------------------------------------------------------

/// Generalized conjunctive prediction in commonality space over the full
/// conditional structure. With a vacuous prior this is `rows.row(Ω)`.
pub fn predict(prior: &MassFunction, rows: &ConditionalTransitionBBAs) -> Result<MassFunction> {
    if prior.frame() != rows.frame() {
        return Err(Error::FrameMismatch);
    }
    let mut q_hat = vec![0.0; prior.frame().powerset_len()];
    for (subset, weight) in prior.focal_elements() {
        let q = mass_to_commonality(rows.row(subset));
        for (acc, v) in q_hat.iter_mut().zip(q.values()) {
            *acc += weight * v;
        }
    }
    let q_hat = SetFunction::new(prior.frame().clone(), SetFunctionKind::Commonality, q_hat)?;
    commonality_to_mass(&q_hat)
}

/// Prediction from the singleton rows' plausibilities (`singleton_pl[i]` is
/// the plausibility of the row conditioned on state `i`; rows for states
/// outside every focal element of `prior` may be left empty).
pub fn predict_from_plausibilities(
    prior: &MassFunction,
    singleton_pl: &[Vec<f64>],
) -> Result<MassFunction> {
    let frame = prior.frame();
    let size = frame.powerset_len();
    let mut pl_hat = vec![0.0; size];
    let mut product = vec![0.0; size];
    for (subset, weight) in prior.focal_elements() {
        // m[∅] is the ∅-categorical BBA: zero plausibility everywhere.
        if subset == 0 {
            continue;
        }
        product.fill(1.0);
        let mut members = subset;
        while members != 0 {
            let state = members.trailing_zeros() as usize;
            members &= members - 1;
            let pl = &singleton_pl[state];
            for (p, v) in product.iter_mut().zip(pl) {
                *p *= 1.0 - v;
            }
        }
        for (acc, p) in pl_hat.iter_mut().zip(&product) {
            *acc += weight * (1.0 - p);
        }
    }
    // b(A) = 1 - pl(Ā), then Möbius inversion on subsets.
    let full = frame.full_set();
    let mut implicability: Vec<f64> = (0..size).map(|a| 1.0 - pl_hat[full ^ a]).collect();
    subset_mobius(&mut implicability);
    crate::belief::transform::finish_inverse(frame, implicability)
}

/// Plausibility vectors of the singleton transition rows needed by `prior`.
fn singleton_plausibilities(
    model: &EvIohmmModel,
    prior: &MassFunction,
    input: &Observation,
) -> Result<Vec<Vec<f64>>> {
    let n = model.num_states();
    let needed = prior.focal_elements().fold(0usize, |acc, (s, _)| acc | s);
    let values = model.transition_values(input)?;
    let mut out = vec![Vec::new(); n];
    for (state, row) in values.chunks(n).enumerate() {
        if needed & (1 << state) == 0 {
            continue;
        }
        out[state] = match model.evidence() {
            EvidenceKind::Possibility => max_plausibility(row),
            kind => {
                let bba = kind.to_bba(model.frame(), row)?;
                mass_to_plausibility(&bba).into_values()
            }
        };
    }
    Ok(out)
}

/// Predicted BBA at `t` from the current BBA and the input observed at `t - 1`.
pub fn predict_state(
    model: &EvIohmmModel,
    current: &MassFunction,
    input_prev: &Observation,
    path: PredictionPath,
) -> Result<MassFunction> {
    match path {
        PredictionPath::Commonality => {
            let rows = build_transition_rows(model, input_prev)?;
            predict(current, &rows)
        }
        PredictionPath::Plausibility => {
            let pls = singleton_plausibilities(model, current, input_prev)?;
            predict_from_plausibilities(current, &pls)
        }
    }
}

/// BBA on the current state given the output observation.
pub fn emission_bba(model: &EvIohmmModel, output: &Observation) -> Result<MassFunction> {
    let values = model.emission_values(output)?;
    model.evidence().to_bba(model.frame(), &values)
}

// ---------------------------------------------------------------------------
// Forward state
// ---------------------------------------------------------------------------

/// Normalized belief on the current state plus the conflict history.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardState {
    current: MassFunction,
    conflict_log: Vec<f64>,
    resets: Vec<usize>,
}

impl ForwardState {
    /// Normalized BBA on the current state (`m(∅) = 0`).
    pub fn current(&self) -> &MassFunction {
        &self.current
    }

    /// Conflict recorded at each step, before normalization.
    pub fn conflict_log(&self) -> &[f64] {
        &self.conflict_log
    }

    /// Steps where total conflict forced a reset to the vacuous BBA.
    pub fn resets(&self) -> &[usize] {
        &self.resets
    }

    /// Number of steps processed so far.
    pub fn step_index(&self) -> usize {
        self.conflict_log.len()
    }

    /// `Π (1 - conflict)` over the steps so far.
    pub fn effectiveness(&self) -> f64 {
        self.conflict_log.iter().map(|c| 1.0 - c).product()
    }

    fn absorb(
        mut self,
        model: &EvIohmmModel,
        predicted: &MassFunction,
        emission: &MassFunction,
    ) -> Result<Self> {
        match combine_conjunctive_normalized(predicted, emission, model.normalization()) {
            Ok(combined) => {
                self.conflict_log.push(combined.conflict.clamp(0.0, 1.0));
                self.current = combined.mass;
            }
            Err(Error::TotalConflict { .. }) => {
                self.resets.push(self.conflict_log.len());
                self.conflict_log.push(1.0);
                self.current = MassFunction::vacuous(model.frame().clone());
            }
            Err(other) => return Err(other),
        }
        Ok(self)
    }

    /// Advances by one record using the given prediction route.
    pub fn step_with(
        self,
        model: &EvIohmmModel,
        input_prev: &Observation,
        output: &Observation,
        path: PredictionPath,
    ) -> Result<Self> {
        let predicted = predict_state(model, &self.current, input_prev, path)?;
        let emission = emission_bba(model, output)?;
        self.absorb(model, &predicted, &emission)
    }

    pub fn step(
        self,
        model: &EvIohmmModel,
        input_prev: &Observation,
        output: &Observation,
    ) -> Result<Self> {
        self.step_with(model, input_prev, output, PredictionPath::default())
    }
}

/// First step: the model's prior (vacuous by default) combined with the first
/// emission, conflict recorded, then normalized.
pub fn forward_init(model: &EvIohmmModel, output: &Observation) -> Result<ForwardState> {
    let emission = emission_bba(model, output)?;
    let state = ForwardState {
        current: model.prior().clone(),
        conflict_log: Vec::new(),
        resets: Vec::new(),
    };
    let prior = model.prior().clone();
    state.absorb(model, &prior, &emission)
}

/// One induction step with the default (plausibility) prediction route.
pub fn forward_step(
    state: ForwardState,
    model: &EvIohmmModel,
    input_prev: &Observation,
    output: &Observation,
) -> Result<ForwardState> {
    state.step(model, input_prev, output)
}

/// [`forward_step`] with an explicit prediction route.
pub fn forward_step_with(
    state: ForwardState,
    model: &EvIohmmModel,
    input_prev: &Observation,
    output: &Observation,
    path: PredictionPath,
) -> Result<ForwardState> {
    state.step_with(model, input_prev, output, path)
}
