//! Unnormalized conjunctive/disjunctive combination, conflict and the
//! normalization rules that redistribute it.

use serde::{Deserialize, Serialize};

use super::transform::{
    finish_inverse, subset_mobius, subset_zeta, superset_mobius, superset_zeta,
};
use super::MassFunction;
use crate::error::{Error, Result};

/// Conflict at or above this level cannot be normalized with Dempster's rule.
pub const TOTAL_CONFLICT_THRESHOLD: f64 = 1.0 - 1e-12;

fn same_frame(m1: &MassFunction, m2: &MassFunction) -> Result<()> {
    if m1.frame() == m2.frame() {
        Ok(())
    } else {
        Err(Error::FrameMismatch)
    }
}

fn focal_list(m: &MassFunction) -> Vec<(usize, f64)> {
    m.focal_elements().collect()
}

/// Unnormalized conjunctive rule: `m(A) = Σ_{B ∩ C = A} m1(B)·m2(C)`.
pub fn combine_conjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    same_frame(m1, m2)?;
    let f1 = focal_list(m1);
    let f2 = focal_list(m2);
    let mut out = vec![0.0; m1.frame().powerset_len()];
    for &(b, mb) in &f1 {
        for &(c, mc) in &f2 {
            out[b & c] += mb * mc;
        }
    }
    Ok(MassFunction::from_raw(m1.frame().clone(), out))
}

/// Conjunctive rule computed as a pointwise product of commonalities.
pub fn combine_conjunctive_via_commonality(
    m1: &MassFunction,
    m2: &MassFunction,
) -> Result<MassFunction> {
    same_frame(m1, m2)?;
    let mut q1 = m1.masses().to_vec();
    let mut q2 = m2.masses().to_vec();
    superset_zeta(&mut q1);
    superset_zeta(&mut q2);
    for (a, b) in q1.iter_mut().zip(&q2) {
        *a *= b;
    }
    superset_mobius(&mut q1);
    finish_inverse(m1.frame(), q1)
}

/// Unnormalized disjunctive rule: `m(A) = Σ_{B ∪ C = A} m1(B)·m2(C)`.
pub fn combine_disjunctive(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    same_frame(m1, m2)?;
    let f1 = focal_list(m1);
    let f2 = focal_list(m2);
    let mut out = vec![0.0; m1.frame().powerset_len()];
    for &(b, mb) in &f1 {
        for &(c, mc) in &f2 {
            out[b | c] += mb * mc;
        }
    }
    Ok(MassFunction::from_raw(m1.frame().clone(), out))
}

/// Disjunctive rule computed as a pointwise product of implicabilities.
pub fn combine_disjunctive_via_implicability(
    m1: &MassFunction,
    m2: &MassFunction,
) -> Result<MassFunction> {
    same_frame(m1, m2)?;
    let mut b1 = m1.masses().to_vec();
    let mut b2 = m2.masses().to_vec();
    subset_zeta(&mut b1);
    subset_zeta(&mut b2);
    for (a, b) in b1.iter_mut().zip(&b2) {
        *a *= b;
    }
    subset_mobius(&mut b1);
    finish_inverse(m1.frame(), b1)
}

/// Mass the conjunctive rule assigns to `∅`.
pub fn conflict_mass(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    same_frame(m1, m2)?;
    let f2 = focal_list(m2);
    let conflict = m1
        .focal_elements()
        .map(|(b, mb)| {
            f2.iter()
                .filter(|&&(c, _)| b & c == 0)
                .map(|&(_, mc)| mb * mc)
                .sum::<f64>()
        })
        .sum();
    Ok(conflict)
}

/// Conflict from commonalities: `1 + Σ_{A ≠ ∅} (-1)^{|A|} q1(A)·q2(A)`.
pub fn conflict_from_commonalities(m1: &MassFunction, m2: &MassFunction) -> Result<f64> {
    same_frame(m1, m2)?;
    let mut q1 = m1.masses().to_vec();
    let mut q2 = m2.masses().to_vec();
    superset_zeta(&mut q1);
    superset_zeta(&mut q2);
    let alternating: f64 = (1..q1.len())
        .map(|a| {
            let sign = if a.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            sign * q1[a] * q2[a]
        })
        .sum();
    Ok(1.0 + alternating)
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

/// How conflict mass is redistributed so that `m(∅) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationRule {
    /// Scale every non-empty focal element by `1 / (1 - m(∅))`.
    #[default]
    Dempster,
    /// Move `m(∅)` onto Ω.
    Yager,
    /// Give each conflicting product `m1(B)·m2(C)` to `B ∪ C`.
    DuboisPrade,
}

impl NormalizationRule {
    pub fn name(self) -> &'static str {
        match self {
            NormalizationRule::Dempster => "dempster",
            NormalizationRule::Yager => "yager",
            NormalizationRule::DuboisPrade => "dubois_prade",
        }
    }
}

impl std::str::FromStr for NormalizationRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dempster" => Ok(Self::Dempster),
            "yager" => Ok(Self::Yager),
            "dubois_prade" | "duboisprade" => Ok(Self::DuboisPrade),
            other => Err(format!(
                "unknown normalization rule `{other}` (expected dempster, yager or dubois_prade)"
            )),
        }
    }
}

fn dempster(m: &MassFunction) -> Result<MassFunction> {
    let conflict = m.conflict();
    if conflict >= TOTAL_CONFLICT_THRESHOLD {
        return Err(Error::TotalConflict { conflict });
    }
    let scale = 1.0 / (m.total() - conflict);
    let mut masses: Vec<f64> = m.masses().iter().map(|v| v * scale).collect();
    masses[0] = 0.0;
    Ok(MassFunction::from_raw(m.frame().clone(), masses))
}

fn yager(m: &MassFunction) -> MassFunction {
    let mut masses = m.masses().to_vec();
    let full = m.frame().full_set();
    masses[full] += masses[0];
    masses[0] = 0.0;
    MassFunction::from_raw(m.frame().clone(), masses)
}

/// Normalizes a single (possibly sub-normal) mass function.
///
/// Dubois-Prade needs the two operands of a combination; on its own a mass
/// function is read as `m ∩ vacuous`, whose only conflicting products are
/// `m(∅)·1`, reassigned to `∅ ∪ Ω = Ω`. That coincides with Yager's rule.
/// Use [`combine_conjunctive_normalized`] to apply Dubois-Prade to a pair.
pub fn normalize(m: &MassFunction, rule: NormalizationRule) -> Result<MassFunction> {
    match rule {
        NormalizationRule::Dempster => dempster(m),
        NormalizationRule::Yager | NormalizationRule::DuboisPrade => Ok(yager(m)),
    }
}

/// Result of a conjunctive combination followed by normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedCombination {
    /// `m(∅)` of the unnormalized combination.
    pub conflict: f64,
    pub mass: MassFunction,
}

/// Conjunctive combination followed by the chosen normalization.
///
/// For Dubois-Prade a conflicting product whose union is still empty (both
/// operands put mass on `∅`) has nowhere to go and is moved onto Ω.
pub fn combine_conjunctive_normalized(
    m1: &MassFunction,
    m2: &MassFunction,
    rule: NormalizationRule,
) -> Result<NormalizedCombination> {
    match rule {
        NormalizationRule::Dempster | NormalizationRule::Yager => {
            let combined = combine_conjunctive(m1, m2)?;
            let conflict = combined.conflict();
            let mass = normalize(&combined, rule)?;
            Ok(NormalizedCombination { conflict, mass })
        }
        NormalizationRule::DuboisPrade => {
            same_frame(m1, m2)?;
            let f1 = focal_list(m1);
            let f2 = focal_list(m2);
            let mut out = vec![0.0; m1.frame().powerset_len()];
            let mut conflict = 0.0;
            for &(b, mb) in &f1 {
                for &(c, mc) in &f2 {
                    let product = mb * mc;
                    let meet = b & c;
                    if meet == 0 {
                        conflict += product;
                        out[b | c] += product;
                    } else {
                        out[meet] += product;
                    }
                }
            }
            let full = m1.frame().full_set();
            out[full] += out[0];
            out[0] = 0.0;
            Ok(NormalizedCombination {
                conflict,
                mass: MassFunction::from_raw(m1.frame().clone(), out),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::Frame;
    use super::*;

    fn frame2() -> Frame {
        Frame::new(["x1", "x2"]).unwrap()
    }

    fn bba(values: [f64; 4]) -> MassFunction {
        MassFunction::new(frame2(), values.to_vec()).unwrap()
    }

    fn close(a: &MassFunction, b: &[f64]) {
        for (x, y) in a.masses().iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{:?} != {b:?}", a.masses());
        }
    }

    #[test]
    fn conjunctive_examples() {
        let predicted = bba([0.25, 0.75, 0.0, 0.0]);
        let emission = bba([0.0, 1.0, 0.0, 0.0]);
        close(
            &combine_conjunctive(&predicted, &emission).unwrap(),
            &[0.25, 0.75, 0.0, 0.0],
        );
        let vac = MassFunction::vacuous(frame2());
        close(
            &combine_conjunctive(&predicted, &vac).unwrap(),
            predicted.masses(),
        );
        let x1 = MassFunction::categorical(frame2(), 0b01);
        let x2 = MassFunction::categorical(frame2(), 0b10);
        close(
            &combine_conjunctive(&x1, &x2).unwrap(),
            &[1.0, 0.0, 0.0, 0.0],
        );
    }

    #[test]
    fn disjunctive_examples() {
        let row = bba([0.25, 0.75, 0.0, 0.0]);
        close(
            &combine_disjunctive(&row, &row).unwrap(),
            &[0.0625, 0.9375, 0.0, 0.0],
        );
        let empty = MassFunction::empty_categorical(frame2());
        close(&combine_disjunctive(&row, &empty).unwrap(), row.masses());
        let x1 = MassFunction::categorical(frame2(), 0b01);
        let x2 = MassFunction::categorical(frame2(), 0b10);
        close(
            &combine_disjunctive(&x1, &x2).unwrap(),
            &[0.0, 0.0, 0.0, 1.0],
        );
    }

    #[test]
    fn conflict_examples() {
        let x1 = MassFunction::categorical(frame2(), 0b01);
        let x2 = MassFunction::categorical(frame2(), 0b10);
        let vac = MassFunction::vacuous(frame2());
        assert_eq!(conflict_mass(&x1, &x2).unwrap(), 1.0);
        assert_eq!(conflict_mass(&x1, &vac).unwrap(), 0.0);
        let predicted = bba([0.25, 0.75, 0.0, 0.0]);
        assert_eq!(conflict_mass(&predicted, &x1).unwrap(), 0.25);
        assert!((conflict_from_commonalities(&predicted, &x1).unwrap() - 0.25).abs() < 1e-12);
        assert!((conflict_from_commonalities(&x1, &x2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frame_mismatch_is_reported() {
        let other = Frame::new(["a", "b"]).unwrap();
        let m1 = MassFunction::vacuous(frame2());
        let m2 = MassFunction::vacuous(other);
        assert_eq!(combine_conjunctive(&m1, &m2), Err(Error::FrameMismatch));
        assert_eq!(combine_disjunctive(&m1, &m2), Err(Error::FrameMismatch));
        assert_eq!(conflict_mass(&m1, &m2), Err(Error::FrameMismatch));
    }

    #[test]
    fn normalization_rules() {
        let m = bba([0.25, 0.75, 0.0, 0.0]);
        close(
            &normalize(&m, NormalizationRule::Dempster).unwrap(),
            &[0.0, 1.0, 0.0, 0.0],
        );
        close(
            &normalize(&m, NormalizationRule::Yager).unwrap(),
            &[0.0, 0.75, 0.0, 0.25],
        );
        let total = MassFunction::empty_categorical(frame2());
        assert!(matches!(
            normalize(&total, NormalizationRule::Dempster),
            Err(Error::TotalConflict { .. })
        ));
        close(
            &normalize(&total, NormalizationRule::Yager).unwrap(),
            &[0.0, 0.0, 0.0, 1.0],
        );
    }

    #[test]
    fn dubois_prade_reassigns_to_union() {
        let x1 = MassFunction::categorical(frame2(), 0b01);
        let x2 = MassFunction::categorical(frame2(), 0b10);
        let out = combine_conjunctive_normalized(&x1, &x2, NormalizationRule::DuboisPrade).unwrap();
        assert_eq!(out.conflict, 1.0);
        close(&out.mass, &[0.0, 0.0, 0.0, 1.0]);
        // Both operands sub-normal: the ∅·∅ product ends on Ω.
        let a = bba([0.5, 0.5, 0.0, 0.0]);
        let b = bba([0.5, 0.0, 0.5, 0.0]);
        let out = combine_conjunctive_normalized(&a, &b, NormalizationRule::DuboisPrade).unwrap();
        assert_eq!(out.conflict, 1.0);
        close(&out.mass, &[0.0, 0.25, 0.25, 0.5]);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("Dempster".parse(), Ok(NormalizationRule::Dempster));
        assert_eq!("dubois-prade".parse(), Ok(NormalizationRule::DuboisPrade));
        assert!("smets".parse::<NormalizationRule>().is_err());
    }
}
