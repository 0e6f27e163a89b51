//! Tolerance curves and the conversion of per-state evidence into BBAs.
//!
//! A [`PossibilityDistribution`] maps an observed scalar to a degree of
//! possibility in `[0, 1]`. Its support splits the observation axis into a
//! zone of comfort (possibility 1), a zone of tolerance (strictly between 0
//! and 1) and everything outside the zone of viability (possibility 0).

use serde::{Deserialize, Serialize};

use crate::belief::{
    commonality_to_mass, plausibility_to_mass, Frame, MassFunction, SetFunction, SetFunctionKind,
};
use crate::error::{Error, Result};
use crate::trace::Observation;

/// A parametric tolerance curve over one observed variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PossibilityDistribution {
    /// 0 up to `a`, linear to 1 at `b`, 1 beyond.
    RampUp { a: f64, b: f64 },
    /// 1 up to `a`, linear to 0 at `b`, 0 beyond.
    RampDown { a: f64, b: f64 },
    /// 0 outside `[a, d]`, 1 on `[b, c]`, linear in between.
    Trapezoid { a: f64, b: f64, c: f64, d: f64 },
    /// 1 strictly above the threshold, 0 otherwise.
    CrispAbove { threshold: f64 },
    /// 1 strictly below the threshold, 0 otherwise.
    CrispBelow { threshold: f64 },
    /// 1 on the closed interval `[lo, hi]`, 0 otherwise.
    CrispInterval { lo: f64, hi: f64 },
    /// The same possibility whatever the observation; `0` forbids, `1` always allows.
    Constant { value: f64 },
}

impl PossibilityDistribution {
    pub fn ramp_up(a: f64, b: f64) -> Result<Self> {
        Self::RampUp { a, b }.validated()
    }

    pub fn ramp_down(a: f64, b: f64) -> Result<Self> {
        Self::RampDown { a, b }.validated()
    }

    pub fn trapezoid(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::Trapezoid { a, b, c, d }.validated()
    }

    pub fn crisp_above(threshold: f64) -> Result<Self> {
        Self::CrispAbove { threshold }.validated()
    }

    pub fn crisp_below(threshold: f64) -> Result<Self> {
        Self::CrispBelow { threshold }.validated()
    }

    pub fn crisp_interval(lo: f64, hi: f64) -> Result<Self> {
        Self::CrispInterval { lo, hi }.validated()
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::Constant { value }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter ordering invariants.
    pub fn validate(&self) -> Result<()> {
        let params: &[f64] = match self {
            Self::RampUp { a, b } | Self::RampDown { a, b } => &[*a, *b],
            Self::Trapezoid { a, b, c, d } => &[*a, *b, *c, *d],
            Self::CrispAbove { threshold } | Self::CrispBelow { threshold } => &[*threshold],
            Self::CrispInterval { lo, hi } => &[*lo, *hi],
            Self::Constant { value } => &[*value],
        };
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!(
                "{} has a non-finite parameter",
                self.kind_name()
            )));
        }
        let ok = match *self {
            Self::RampUp { a, b } | Self::RampDown { a, b } => a < b,
            Self::Trapezoid { a, b, c, d } => a <= b && b <= c && c <= d,
            Self::CrispInterval { lo, hi } => lo <= hi,
            Self::Constant { value } => (0.0..=1.0).contains(&value),
            Self::CrispAbove { .. } | Self::CrispBelow { .. } => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDistribution(match self {
                Self::RampUp { a, b } | Self::RampDown { a, b } => {
                    format!("{} requires a < b (a = {a}, b = {b})", self.kind_name())
                }
                Self::Trapezoid { a, b, c, d } => {
                    format!("trapezoid requires a <= b <= c <= d (got {a}, {b}, {c}, {d})")
                }
                Self::CrispInterval { lo, hi } => {
                    format!("crisp_interval requires lo <= hi (lo = {lo}, hi = {hi})")
                }
                Self::Constant { value } => format!("constant value {value} is outside [0, 1]"),
                _ => unreachable!(),
            }))
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::RampUp { .. } => "ramp_up",
            Self::RampDown { .. } => "ramp_down",
            Self::Trapezoid { .. } => "trapezoid",
            Self::CrispAbove { .. } => "crisp_above",
            Self::CrispBelow { .. } => "crisp_below",
            Self::CrispInterval { .. } => "crisp_interval",
            Self::Constant { .. } => "constant",
        }
    }

    /// Possibility of `value`. Ramp knots take the extreme value on their side:
    /// `ramp_down(a, b)` is exactly 1 at `a` and exactly 0 at `b`.
    pub fn evaluate(&self, value: f64) -> f64 {
        match *self {
            Self::RampUp { a, b } => {
                if value <= a {
                    0.0
                } else if value >= b {
                    1.0
                } else {
                    (value - a) / (b - a)
                }
            }
            Self::RampDown { a, b } => {
                if value <= a {
                    1.0
                } else if value >= b {
                    0.0
                } else {
                    (b - value) / (b - a)
                }
            }
            Self::Trapezoid { a, b, c, d } => {
                if value < a {
                    0.0
                } else if value < b {
                    (value - a) / (b - a)
                } else if value <= c {
                    1.0
                } else if value < d {
                    (d - value) / (d - c)
                } else {
                    0.0
                }
            }
            Self::CrispAbove { threshold } => indicator(value > threshold),
            Self::CrispBelow { threshold } => indicator(value < threshold),
            Self::CrispInterval { lo, hi } => indicator(lo <= value && value <= hi),
            Self::Constant { value: v } => v,
        }
    }

    /// True when the curve only ever takes the values 0 and 1.
    pub fn is_crisp(&self) -> bool {
        match *self {
            Self::CrispAbove { .. } | Self::CrispBelow { .. } | Self::CrispInterval { .. } => true,
            Self::Constant { value } => value == 0.0 || value == 1.0,
            Self::Trapezoid { a, b, c, d } => a == b && c == d,
            Self::RampUp { .. } | Self::RampDown { .. } => false,
        }
    }

    /// True when the curve does not depend on the observation.
    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }
}

fn indicator(condition: bool) -> f64 {
    if condition {
        1.0
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// Constraint vectors
// ---------------------------------------------------------------------------

/// One tolerance curve attached to one variable.
///
/// `variable` may only be omitted for [`PossibilityDistribution::Constant`].
/// Inhibited entries document a variable the arc deliberately ignores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub distribution: PossibilityDistribution,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub inhibited: bool,
}

impl Constraint {
    pub fn new(variable: impl Into<String>, distribution: PossibilityDistribution) -> Self {
        Self {
            variable: Some(variable.into()),
            distribution,
            inhibited: false,
        }
    }

    pub fn inhibited(variable: impl Into<String>, distribution: PossibilityDistribution) -> Self {
        Self {
            inhibited: true,
            ..Self::new(variable, distribution)
        }
    }

    pub fn constant(value: f64) -> Result<Self> {
        Ok(Self {
            variable: None,
            distribution: PossibilityDistribution::constant(value)?,
            inhibited: false,
        })
    }
}

/// Conjunction of per-variable constraints qualifying one transition or state.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintVector {
    entries: Vec<Constraint>,
}

impl ConstraintVector {
    pub fn new(entries: Vec<Constraint>) -> Result<Self> {
        if !entries.iter().any(|e| !e.inhibited) {
            return Err(Error::InvalidConstraint(
                "at least one constraint must be active (not inhibited)".into(),
            ));
        }
        for (i, entry) in entries.iter().enumerate() {
            entry
                .distribution
                .validate()
                .map_err(|e| Error::InvalidConstraint(format!("entry {i}: {e}")))?;
            match &entry.variable {
                None if !entry.distribution.is_constant() => {
                    return Err(Error::InvalidConstraint(format!(
                        "entry {i}: a {} constraint needs a variable",
                        entry.distribution.kind_name()
                    )));
                }
                Some(name) if name.trim().is_empty() => {
                    return Err(Error::InvalidConstraint(format!(
                        "entry {i}: empty variable name"
                    )));
                }
                Some(name) => {
                    let duplicate = entries[..i]
                        .iter()
                        .any(|other| other.variable.as_deref() == Some(name.as_str()));
                    if duplicate {
                        return Err(Error::InvalidConstraint(format!(
                            "variable `{name}` appears more than once"
                        )));
                    }
                }
                None => {}
            }
        }
        Ok(Self { entries })
    }

    /// A single constraint on one variable.
    pub fn single(variable: impl Into<String>, distribution: PossibilityDistribution) -> Self {
        Self::new(vec![Constraint::new(variable, distribution)])
            .expect("a single active constraint is always valid")
    }

    /// The transition or state is never possible.
    pub fn forbidden() -> Self {
        Self::constant(0.0).expect("0 is a valid possibility")
    }

    /// A constant possibility independent of any observation.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![Constraint::constant(value)?])
    }

    pub fn entries(&self) -> &[Constraint] {
        &self.entries
    }

    pub fn active(&self) -> impl Iterator<Item = &Constraint> {
        self.entries.iter().filter(|e| !e.inhibited)
    }

    /// True for the `constant(0)` marker produced by [`ConstraintVector::forbidden`].
    pub fn is_forbidden(&self) -> bool {
        self.active().any(|e| {
            e.variable.is_none()
                && e.distribution == PossibilityDistribution::Constant { value: 0.0 }
        })
    }

    pub fn is_crisp(&self) -> bool {
        self.active().all(|e| e.distribution.is_crisp())
    }

    /// Variables the vector reads (inhibited entries excluded).
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.active().filter_map(|e| e.variable.as_deref())
    }

    /// Minimum over the active entries of each curve at the observed value.
    pub fn evaluate(&self, observation: &Observation) -> Result<f64> {
        let mut possibility: f64 = 1.0;
        for entry in self.active() {
            let value = match &entry.variable {
                Some(name) if !entry.distribution.is_constant() => *observation
                    .get(name)
                    .ok_or_else(|| Error::MissingVariable {
                        variable: name.clone(),
                    })?,
                _ => 0.0,
            };
            possibility = possibility.min(entry.distribution.evaluate(value));
        }
        Ok(possibility)
    }
}

/// Alias of [`ConstraintVector::evaluate`].
pub fn evaluate_constraint_vector(cv: &ConstraintVector, observation: &Observation) -> Result<f64> {
    cv.evaluate(observation)
}

// ---------------------------------------------------------------------------
// Singleton evidence to BBA
// ---------------------------------------------------------------------------

fn check_len(frame: &Frame, values: &[f64]) -> Result<()> {
    if values.len() == frame.len() {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: frame.len(),
            actual: values.len(),
        })
    }
}

/// Consonant plausibility `pl(A) = max_{x ∈ A} poss(x)`, `pl(∅) = 0`.
pub(crate) fn max_plausibility(poss: &[f64]) -> Vec<f64> {
    let size = 1usize << poss.len();
    let mut pl = vec![0.0f64; size];
    for a in 1..size {
        let low = a.trailing_zeros() as usize;
        pl[a] = pl[a & (a - 1)].max(poss[low]);
    }
    pl
}

/// BBA whose singleton plausibilities are the given possibilities.
///
/// Plausibility extends to subsets by maximum, then is inverted to masses.
/// The result is consonant with `m(∅) = 1 - max poss`.
pub fn singleton_possibilities_to_bba(frame: &Frame, poss: &[f64]) -> Result<MassFunction> {
    check_len(frame, poss)?;
    if let Some(p) = poss.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidSetFunction(format!(
            "possibility {p} is outside [0, 1]"
        )));
    }
    let pl = SetFunction::new(
        frame.clone(),
        SetFunctionKind::Plausibility,
        max_plausibility(poss),
    )?;
    plausibility_to_mass(&pl)
}

/// BBA from per-state likelihoods through `q(A) = Π_{x ∈ A} L̂(x)`, where the
/// likelihoods are first rescaled so that their maximum is 1.
pub fn singleton_likelihoods_to_bba(frame: &Frame, likelihoods: &[f64]) -> Result<MassFunction> {
    check_len(frame, likelihoods)?;
    if let Some(l) = likelihoods.iter().find(|l| !l.is_finite() || **l < 0.0) {
        return Err(Error::InvalidSetFunction(format!(
            "likelihood {l} is negative or not finite"
        )));
    }
    let max = likelihoods.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::AllZeroLikelihood);
    }
    let size = frame.powerset_len();
    let mut q = vec![1.0; size];
    for a in 1..size {
        let low = a.trailing_zeros() as usize;
        q[a] = q[a & (a - 1)] * (likelihoods[low] / max);
    }
    let q = SetFunction::new(frame.clone(), SetFunctionKind::Commonality, q)?;
    commonality_to_mass(&q)
}

/// Bayesian BBA: `m({x}) = p(x)` with the missing mass `1 - Σ p` on `∅`.
pub fn singleton_probabilities_to_bba(frame: &Frame, probs: &[f64]) -> Result<MassFunction> {
    check_len(frame, probs)?;
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidMass(format!(
            "probability {p} is outside [0, 1]"
        )));
    }
    let total: f64 = probs.iter().sum();
    if total > 1.0 + crate::belief::MASS_TOLERANCE {
        return Err(Error::InvalidMass(format!(
            "singleton probabilities sum to {total} > 1"
        )));
    }
    let mut masses = vec![0.0; frame.powerset_len()];
    for (i, p) in probs.iter().enumerate() {
        masses[1 << i] = *p;
    }
    masses[0] = (1.0 - total).max(0.0);
    MassFunction::new(frame.clone(), masses)
}
