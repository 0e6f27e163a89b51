//! Evidential Input/Output Hidden Markov Models (Ev-IOHMM) for assessing the
//! run-time degree of effectiveness of a cyber-physical system.
//!
//! The crate is organized bottom-up:
//!
//! - [`belief`]: exact belief-function algebra over the powerset of a finite
//!   frame of discernment (mass, commonality, plausibility and belief
//!   functions, conjunctive/disjunctive combination, conflict, normalization).
//! - [`possibility`]: tolerance curves (ramps, trapezoids, crisp zones) and the
//!   conversion of per-state observations into basic belief assignments.
//! - [`model`], [`transition`], [`forward`]: the Ev-IOHMM itself, its
//!   conditional transition structure and the evidential forward recursion.
//! - [`effectiveness`]: the degree of effectiveness over a trace, including
//!   sliding windows.
//! - [`crisp`]: the deterministic pass/fail test that the evidential model
//!   reduces to when every tolerance is crisp.
//!
//! Subsets of the frame are encoded as bitmasks: bit `i` set means state `i`
//! belongs to the subset, so index `0` is the empty set and `2^N - 1` the whole
//! frame.

pub mod belief;
pub mod crisp;
pub mod effectiveness;
mod error;
pub mod forward;
pub mod model;
pub mod possibility;
pub mod trace;
pub mod transition;

pub use belief::{
    combine_conjunctive, combine_conjunctive_normalized, combine_disjunctive, conflict_mass,
    vacuous, Frame, MassFunction, NormalizationRule, SetFunction, SetFunctionKind,
};
pub use effectiveness::{effectiveness, sliding_effectiveness, EffectivenessReport};
pub use error::{Error, Result};
pub use forward::{forward_init, forward_step, ForwardState, PredictionPath};
pub use model::{EvIohmmModel, EvidenceKind};
pub use possibility::{Constraint, ConstraintVector, PossibilityDistribution};
pub use trace::{Observation, TraceRecord};
pub use transition::{build_transition_rows, ConditionalTransitionBBAs};
