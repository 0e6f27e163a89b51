//! One-to-one transforms between mass, commonality, plausibility and belief.

use super::{
    Frame, MassFunction, SetFunction, SetFunctionKind, INVERSE_SUM_TOLERANCE, MASS_TOLERANCE,
};
use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Lattice passes
// ---------------------------------------------------------------------------

/// `f(A) <- Σ_{B ⊇ A} f(B)`.
pub(crate) fn superset_zeta(values: &mut [f64]) {
    let n = values.len();
    let mut bit = 1;
    while bit < n {
        for a in 0..n {
            if a & bit == 0 {
                values[a] += values[a | bit];
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`superset_zeta`].
pub(crate) fn superset_mobius(values: &mut [f64]) {
    let n = values.len();
    let mut bit = 1;
    while bit < n {
        for a in 0..n {
            if a & bit == 0 {
                values[a] -= values[a | bit];
            }
        }
        bit <<= 1;
    }
}

/// `f(A) <- Σ_{B ⊆ A} f(B)`.
pub(crate) fn subset_zeta(values: &mut [f64]) {
    let n = values.len();
    let mut bit = 1;
    while bit < n {
        for a in 0..n {
            if a & bit != 0 {
                values[a] += values[a ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// Inverse of [`subset_zeta`].
pub(crate) fn subset_mobius(values: &mut [f64]) {
    let n = values.len();
    let mut bit = 1;
    while bit < n {
        for a in 0..n {
            if a & bit != 0 {
                values[a] -= values[a ^ bit];
            }
        }
        bit <<= 1;
    }
}

/// Validates masses recovered by an inverse transform, flushing round-off
/// negatives to zero.
pub(crate) fn finish_inverse(frame: &Frame, mut masses: Vec<f64>) -> Result<MassFunction> {
    for (subset, m) in masses.iter_mut().enumerate() {
        if !m.is_finite() || *m < -MASS_TOLERANCE {
            return Err(Error::InvalidSetFunction(format!(
                "recovered mass of {} is {m}",
                frame.describe(subset)
            )));
        }
        if *m < 0.0 {
            *m = 0.0;
        }
    }
    let total: f64 = masses.iter().sum();
    if (total - 1.0).abs() > INVERSE_SUM_TOLERANCE {
        return Err(Error::InvalidSetFunction(format!(
            "recovered masses sum to {total}"
        )));
    }
    Ok(MassFunction::from_raw(frame.clone(), masses))
}

fn expect_kind(f: &SetFunction, kind: SetFunctionKind) -> Result<()> {
    if f.kind() == kind {
        Ok(())
    } else {
        Err(Error::InvalidSetFunction(format!(
            "expected a {kind:?} function, got {:?}",
            f.kind()
        )))
    }
}

// ---------------------------------------------------------------------------
// Public transforms
// ---------------------------------------------------------------------------

/// `q(A) = Σ_{B ⊇ A} m(B)`.
pub fn mass_to_commonality(m: &MassFunction) -> SetFunction {
    let mut values = m.masses().to_vec();
    superset_zeta(&mut values);
    SetFunction::from_raw(m.frame().clone(), SetFunctionKind::Commonality, values)
}

/// `m(A) = Σ_{B ⊇ A} (-1)^{|B|-|A|} q(B)`.
pub fn commonality_to_mass(q: &SetFunction) -> Result<MassFunction> {
    expect_kind(q, SetFunctionKind::Commonality)?;
    let mut values = q.values().to_vec();
    superset_mobius(&mut values);
    finish_inverse(q.frame(), values)
}

/// `pl(A) = Σ_{B ∩ A ≠ ∅} m(B)`.
pub fn mass_to_plausibility(m: &MassFunction) -> SetFunction {
    let implicability = mass_to_implicability(m);
    let full = m.frame().full_set();
    let total = m.total();
    let values = (0..implicability.len())
        .map(|a| total - implicability[full ^ a])
        .collect();
    SetFunction::from_raw(m.frame().clone(), SetFunctionKind::Plausibility, values)
}

/// Inverse of [`mass_to_plausibility`] for a unit-mass BBA.
///
/// Goes through the implicability `b(A) = 1 - pl(Ā)`; for `A ≠ ∅` this is the
/// alternating sum `Σ_{B ⊆ A} (-1)^{|A|-|B|+1} pl(B̄)`, and `m(∅) = 1 - pl(Ω)`.
pub fn plausibility_to_mass(pl: &SetFunction) -> Result<MassFunction> {
    expect_kind(pl, SetFunctionKind::Plausibility)?;
    let full = pl.frame().full_set();
    let values = pl.values();
    let mut implicability: Vec<f64> = (0..values.len()).map(|a| 1.0 - values[full ^ a]).collect();
    subset_mobius(&mut implicability);
    finish_inverse(pl.frame(), implicability)
}

/// `bel(A) = Σ_{∅ ≠ B ⊆ A} m(B)`. The `∅` mass is left out of every sum;
/// sub-normal inputs are not renormalized.
pub fn mass_to_belief(m: &MassFunction) -> SetFunction {
    let mut values = m.masses().to_vec();
    values[0] = 0.0;
    subset_zeta(&mut values);
    SetFunction::from_raw(m.frame().clone(), SetFunctionKind::Belief, values)
}

/// Implicability `b(A) = Σ_{B ⊆ A} m(B)`, i.e. belief with the `∅` mass kept.
/// The disjunctive rule is a pointwise product in this representation.
pub fn mass_to_implicability(m: &MassFunction) -> Vec<f64> {
    let mut values = m.masses().to_vec();
    subset_zeta(&mut values);
    values
}

/// Inverse of [`mass_to_implicability`].
pub fn implicability_to_mass(frame: &Frame, implicability: &[f64]) -> Result<MassFunction> {
    if implicability.len() != frame.powerset_len() {
        return Err(Error::InvalidSetFunction(format!(
            "expected {} values, got {}",
            frame.powerset_len(),
            implicability.len()
        )));
    }
    let mut values = implicability.to_vec();
    subset_mobius(&mut values);
    finish_inverse(frame, values)
}
