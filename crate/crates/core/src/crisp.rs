//! Deterministic acceptance test for models whose constraints are all crisp.

use crate::error::{Error, Result};
use crate::model::EvIohmmModel;
use crate::trace::TraceRecord;

/// True when `states` explains `trace` under the crisp model: every output
/// satisfies the emission of its state and every transition `s_{t-1} → s_t`
/// is enabled by the input observed at `t - 1`.
pub fn deterministic_test(
    model: &EvIohmmModel,
    states: &[usize],
    trace: &[TraceRecord],
) -> Result<bool> {
    if !model.is_crisp() {
        return Err(Error::NotCrisp(
            "every active constraint must be a crisp indicator".into(),
        ));
    }
    if states.len() != trace.len() {
        return Err(Error::LengthMismatch {
            expected: trace.len(),
            actual: states.len(),
        });
    }
    if let Some(&bad) = states.iter().find(|&&s| s >= model.num_states()) {
        return Err(Error::InvalidModel(format!(
            "state index {bad} outside a frame of {} states",
            model.num_states()
        )));
    }
    for (t, (&state, record)) in states.iter().zip(trace).enumerate() {
        if model.emission(state).evaluate(&record.outputs)? != 1.0 {
            return Ok(false);
        }
        if t > 0 {
            let arc = model.transition(states[t - 1], state);
            if arc.evaluate(&trace[t - 1].inputs)? != 1.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::Frame;
    use crate::possibility::{ConstraintVector, PossibilityDistribution as D};
    use crate::trace::Observation;

    fn model() -> EvIohmmModel {
        let frame = Frame::new(["off", "on"]).unwrap();
        let low = ConstraintVector::single("u", D::crisp_below(0.5).unwrap());
        let high = ConstraintVector::single("u", D::crisp_above(0.5).unwrap());
        EvIohmmModel::new(
            frame,
            vec![vec![low.clone(), high.clone()], vec![low, high]],
            vec![
                ConstraintVector::single("y", D::crisp_below(0.5).unwrap()),
                ConstraintVector::single("y", D::crisp_above(0.5).unwrap()),
            ],
        )
        .unwrap()
    }

    fn record(u: f64, y: f64) -> TraceRecord {
        let inputs: Observation = [("u".to_string(), u)].into();
        let outputs: Observation = [("y".to_string(), y)].into();
        TraceRecord::new(0.0, inputs, outputs)
    }

    #[test]
    fn accepts_and_rejects() {
        let m = model();
        let trace = [record(1.0, 0.0), record(0.0, 1.0), record(0.0, 0.0)];
        assert!(deterministic_test(&m, &[0, 1, 0], &trace).unwrap());
        assert!(!deterministic_test(&m, &[0, 0, 0], &trace).unwrap());
        assert!(!deterministic_test(&m, &[1, 1, 0], &trace).unwrap());
        assert!(matches!(
            deterministic_test(&m, &[0, 1], &trace),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
