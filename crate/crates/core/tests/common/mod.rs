//! Independent reference implementations used by the integration tests.
//!
//! Everything here is written as plain double loops over subsets, with no use
//! of the crate's lattice transforms, so that it can serve as an oracle.

#![allow(dead_code)]

use eviohmm::possibility::{Constraint, ConstraintVector, PossibilityDistribution as D};
use eviohmm::{EvIohmmModel, EvidenceKind, Frame, MassFunction, Observation, TraceRecord};
use rand::Rng;

// ---------------------------------------------------------------------------
// Set-function oracles
// ---------------------------------------------------------------------------

pub fn popcount(a: usize) -> u32 {
    a.count_ones()
}

pub fn is_subset(a: usize, b: usize) -> bool {
    a & !b == 0
}

pub fn naive_commonality(m: &[f64]) -> Vec<f64> {
    let size = m.len();
    (0..size)
        .map(|a| (0..size).filter(|&b| is_subset(a, b)).map(|b| m[b]).sum())
        .collect()
}

pub fn naive_mass_from_commonality(q: &[f64]) -> Vec<f64> {
    let size = q.len();
    (0..size)
        .map(|a| {
            (0..size)
                .filter(|&b| is_subset(a, b))
                .map(|b| sign(popcount(b & !a)) * q[b])
                .sum()
        })
        .collect()
}

pub fn naive_plausibility(m: &[f64]) -> Vec<f64> {
    let size = m.len();
    (0..size)
        .map(|a| (0..size).filter(|&b| a & b != 0).map(|b| m[b]).sum())
        .collect()
}

/// Inverse of [`naive_plausibility`] through `b(A) = 1 - pl(Ā)` and
/// alternating sums over subsets.
pub fn naive_mass_from_plausibility(pl: &[f64]) -> Vec<f64> {
    let size = pl.len();
    let full = size - 1;
    let b: Vec<f64> = (0..size).map(|a| 1.0 - pl[full ^ a]).collect();
    (0..size)
        .map(|a| {
            (0..size)
                .filter(|&c| is_subset(c, a))
                .map(|c| sign(popcount(a & !c)) * b[c])
                .sum()
        })
        .collect()
}

pub fn naive_belief(m: &[f64]) -> Vec<f64> {
    let size = m.len();
    (0..size)
        .map(|a| (1..size).filter(|&b| is_subset(b, a)).map(|b| m[b]).sum())
        .collect()
}

pub fn naive_conjunctive(m1: &[f64], m2: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m1.len()];
    for (b, x) in m1.iter().enumerate() {
        for (c, y) in m2.iter().enumerate() {
            out[b & c] += x * y;
        }
    }
    out
}

pub fn naive_disjunctive(m1: &[f64], m2: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m1.len()];
    for (b, x) in m1.iter().enumerate() {
        for (c, y) in m2.iter().enumerate() {
            out[b | c] += x * y;
        }
    }
    out
}

fn sign(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Random belief functions
// ---------------------------------------------------------------------------

pub fn frame(n: usize) -> Frame {
    Frame::new((1..=n).map(|i| format!("x{i}"))).unwrap()
}

/// Random BBA with a random number of focal elements. `allow_empty` lets
/// `∅` be focal.
pub fn random_bba<R: Rng>(rng: &mut R, n: usize, allow_empty: bool) -> MassFunction {
    let frame = frame(n);
    let size = frame.powerset_len();
    let first = usize::from(!allow_empty);
    let mut masses = vec![0.0; size];
    let focal = rng.gen_range(1..=size - first);
    for _ in 0..focal {
        masses[rng.gen_range(first..size)] += rng.gen::<f64>() + 1e-3;
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    MassFunction::new(frame, masses).unwrap()
}

/// Random BBA with strictly positive, non-total mass on `∅`.
pub fn random_subnormal_bba<R: Rng>(rng: &mut R, n: usize) -> MassFunction {
    let frame = frame(n);
    let base = random_bba(rng, n, false);
    let conflict = rng.gen_range(0.01..0.99);
    let mut masses: Vec<f64> = base.masses().iter().map(|m| m * (1.0 - conflict)).collect();
    masses[0] = conflict;
    MassFunction::new(frame, masses).unwrap()
}

// ---------------------------------------------------------------------------
// Random models
// ---------------------------------------------------------------------------

/// Ramp evaluated from its definition, independently of the crate.
pub fn ramp_up(a: f64, b: f64, x: f64) -> f64 {
    if x <= a {
        0.0
    } else if x >= b {
        1.0
    } else {
        (x - a) / (b - a)
    }
}

/// Probability-evidence model on `n` states: every arc and emission is a
/// rising ramp on one variable capped by a constant below `1/n`, so each row
/// is a sub-stochastic vector. Observations are drawn above every ramp's
/// foot, so every path has positive likelihood.
pub struct BayesianCase {
    pub model: EvIohmmModel,
    /// `(a, b, cap)` per arc, row-major.
    pub arcs: Vec<(f64, f64, f64)>,
    /// `(a, b, cap)` per state.
    pub emissions: Vec<(f64, f64, f64)>,
    pub trace: Vec<TraceRecord>,
}

impl BayesianCase {
    pub fn random<R: Rng>(rng: &mut R, n: usize, len: usize) -> Self {
        let mut params = || {
            let a = rng.gen_range(0.0..5.0);
            let b = a + rng.gen_range(0.5..5.0);
            let cap = rng.gen_range(0.05..1.0) / n as f64;
            (a, b, cap)
        };
        let arcs: Vec<_> = (0..n * n).map(|_| params()).collect();
        let emissions: Vec<_> = (0..n).map(|_| params()).collect();
        let cv = |var: &str, (a, b, cap): (f64, f64, f64)| {
            ConstraintVector::new(vec![
                Constraint::new(var, D::ramp_up(a, b).unwrap()),
                Constraint::constant(cap).unwrap(),
            ])
            .unwrap()
        };
        let transitions = (0..n)
            .map(|i| (0..n).map(|j| cv("u", arcs[i * n + j])).collect())
            .collect();
        let emission_cvs = emissions.iter().map(|&p| cv("y", p)).collect();
        let model = EvIohmmModel::new(frame(n), transitions, emission_cvs)
            .unwrap()
            .with_evidence(EvidenceKind::Probability);
        let trace = (0..len)
            .map(|t| {
                let u = rng.gen_range(5.0..12.0);
                let y = rng.gen_range(5.0..12.0);
                record(t as f64, &[("u", u)], &[("y", y)])
            })
            .collect();
        Self {
            model,
            arcs,
            emissions,
            trace,
        }
    }

    fn value((a, b, cap): (f64, f64, f64), x: f64) -> f64 {
        ramp_up(a, b, x).min(cap)
    }

    /// `Σ_{paths} e_1(s_1) Π_t a_{u_{t-1}}(s_{t-1}, s_t) e_t(s_t)` enumerated
    /// explicitly over all `N^T` state sequences.
    pub fn brute_force_likelihood(&self) -> f64 {
        let n = self.model.num_states();
        let len = self.trace.len();
        let mut total = 0.0;
        let mut path = vec![0usize; len];
        loop {
            let mut p = 1.0;
            for t in 0..len {
                let y = self.trace[t].outputs["y"];
                p *= Self::value(self.emissions[path[t]], y);
                if t > 0 {
                    let u = self.trace[t - 1].inputs["u"];
                    p *= Self::value(self.arcs[path[t - 1] * n + path[t]], u);
                }
            }
            total += p;
            // Odometer increment.
            let mut k = 0;
            loop {
                if k == len {
                    return total;
                }
                path[k] += 1;
                if path[k] < n {
                    break;
                }
                path[k] = 0;
                k += 1;
            }
        }
    }
}

/// Random crisp model on `n` states over one input `u` and one output `y`,
/// both sampled from `0..10`.
pub fn random_crisp_model<R: Rng>(rng: &mut R, n: usize) -> EvIohmmModel {
    let dist = |rng: &mut R| -> D {
        let a = rng.gen_range(0.0..10.0);
        let b = rng.gen_range(0.0..10.0);
        match rng.gen_range(0..4) {
            0 => D::crisp_above(a).unwrap(),
            1 => D::crisp_below(a).unwrap(),
            2 => D::crisp_interval(a.min(b), a.max(b)).unwrap(),
            _ => D::trapezoid(a.min(b), a.min(b), a.max(b), a.max(b)).unwrap(),
        }
    };
    let transitions = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.15) {
                        ConstraintVector::forbidden()
                    } else {
                        ConstraintVector::single("u", dist(rng))
                    }
                })
                .collect()
        })
        .collect();
    let emissions = (0..n)
        .map(|_| ConstraintVector::single("y", dist(rng)))
        .collect();
    EvIohmmModel::new(frame(n), transitions, emissions).unwrap()
}

pub fn random_crisp_trace<R: Rng>(rng: &mut R, len: usize) -> Vec<TraceRecord> {
    (0..len)
        .map(|t| {
            record(
                t as f64,
                &[("u", rng.gen_range(0.0..10.0))],
                &[("y", rng.gen_range(0.0..10.0))],
            )
        })
        .collect()
}

pub fn record(timestamp: f64, inputs: &[(&str, f64)], outputs: &[(&str, f64)]) -> TraceRecord {
    let obs = |pairs: &[(&str, f64)]| -> Observation {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    };
    TraceRecord::new(timestamp, obs(inputs), obs(outputs))
}

/// Calls `f` on every sequence of `len` states out of `n`.
pub fn for_each_sequence(n: usize, len: usize, mut f: impl FnMut(&[usize])) {
    let mut seq = vec![0usize; len];
    loop {
        f(&seq);
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
    }
}
