//! Degree of effectiveness: `Π_t (1 - m_t(∅))` over a run of the forward
//! recursion, over a whole trace or over sliding windows.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forward::{forward_init, ForwardState, PredictionPath};
use crate::model::EvIohmmModel;
use crate::trace::TraceRecord;

/// `Π (1 - conflict_t)` over a non-empty conflict log.
pub fn effectiveness(conflict_log: &[f64]) -> Result<f64> {
    if conflict_log.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(conflict_log.iter().map(|c| 1.0 - c).product())
}

/// Runs the forward recursion over `records`, starting from the model prior.
pub fn run_forward(
    model: &EvIohmmModel,
    records: &[TraceRecord],
    path: PredictionPath,
) -> Result<ForwardState> {
    let (first, rest) = records.split_first().ok_or(Error::EmptyLog)?;
    let mut state = forward_init(model, &first.outputs)?;
    let mut previous = first;
    for record in rest {
        state = state.step_with(model, &previous.inputs, &record.outputs, path)?;
        previous = record;
    }
    Ok(state)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub timestamp: f64,
    pub conflict: f64,
    pub step_effectiveness: f64,
    /// Total conflict forced the belief state back to vacuous at this step.
    pub reset: bool,
}

/// One window evaluated from a fresh (vacuous) prior.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    /// Index of the window's first record.
    pub start: usize,
    /// Index of the window's last record.
    pub end: usize,
    pub end_timestamp: f64,
    /// Conflict at each step of the window's own run.
    pub conflicts: Vec<f64>,
    /// `Π (1 - c)` over `conflicts`.
    pub effectiveness: f64,
}

impl WindowReport {
    pub fn len(&self) -> usize {
        self.conflicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conflicts.is_empty()
    }
}

/// Per-step results over the whole trace plus one entry per window position.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectivenessReport {
    pub window_len: usize,
    pub stride: usize,
    pub steps: Vec<StepReport>,
    pub windows: Vec<WindowReport>,
}

impl EffectivenessReport {
    /// Effectiveness of the whole trace as a single sequence.
    pub fn overall(&self) -> f64 {
        self.steps.iter().map(|s| s.step_effectiveness).product()
    }

    /// Window ending at record `index`, if any.
    pub fn window_ending_at(&self, index: usize) -> Option<&WindowReport> {
        self.windows
            .binary_search_by_key(&index, |w| w.end)
            .ok()
            .map(|i| &self.windows[i])
    }

    /// Indices of steps whose conflict is total.
    pub fn breach_steps(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.conflict >= 1.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Evaluates `trace` once end to end and, independently, every window of
/// `window_len` records advanced by `stride`. Each window restarts from the
/// model prior, so its value only reflects the records it covers.
pub fn sliding_effectiveness(
    trace: &[TraceRecord],
    model: &EvIohmmModel,
    window_len: usize,
    stride: usize,
) -> Result<EffectivenessReport> {
    sliding_effectiveness_with(trace, model, window_len, stride, PredictionPath::default())
}

pub fn sliding_effectiveness_with(
    trace: &[TraceRecord],
    model: &EvIohmmModel,
    window_len: usize,
    stride: usize,
    path: PredictionPath,
) -> Result<EffectivenessReport> {
    if window_len == 0 {
        return Err(Error::InvalidWindow(
            "window length must be at least 1".into(),
        ));
    }
    if stride == 0 {
        return Err(Error::InvalidWindow("stride must be at least 1".into()));
    }
    if trace.len() < window_len {
        return Err(Error::TraceTooShort {
            len: trace.len(),
            window: window_len,
        });
    }

    let full = run_forward(model, trace, path)?;
    let resets = full.resets();
    let steps = trace
        .iter()
        .zip(full.conflict_log())
        .enumerate()
        .map(|(i, (record, &conflict))| StepReport {
            timestamp: record.timestamp,
            conflict,
            step_effectiveness: 1.0 - conflict,
            reset: resets.contains(&i),
        })
        .collect();

    let starts: Vec<usize> = (0..=trace.len() - window_len).step_by(stride).collect();
    let windows = starts
        .into_par_iter()
        .map(|start| {
            let end = start + window_len - 1;
            let run = run_forward(model, &trace[start..=end], path)?;
            let conflicts = run.conflict_log().to_vec();
            let effectiveness = effectiveness(&conflicts)?;
            Ok(WindowReport {
                start,
                end,
                end_timestamp: trace[end].timestamp,
                conflicts,
                effectiveness,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EffectivenessReport {
        window_len,
        stride,
        steps,
        windows,
    })
}
