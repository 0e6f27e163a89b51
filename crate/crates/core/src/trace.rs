//! Timestamped input/output observations.

use std::collections::BTreeMap;

/// Named scalar observations, e.g. `{"pres": 3.5}`.
pub type Observation = BTreeMap<String, f64>;

/// One sample of a trace: the inputs `u_t` and outputs `y_t` observed at `timestamp`.
///
/// The transition into record `t` is driven by the inputs of record `t - 1`,
/// so the inputs of the first record are never read.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceRecord {
    /// Seconds; non-decreasing along a trace.
    pub timestamp: f64,
    pub inputs: Observation,
    pub outputs: Observation,
}

impl TraceRecord {
    pub fn new(timestamp: f64, inputs: Observation, outputs: Observation) -> Self {
        Self {
            timestamp,
            inputs,
            outputs,
        }
    }
}
