//! Synthetic traces with a known zone class for every record.
//!
//! A hidden state path is drawn first. Records then get inputs inside the
//! comfort zone of the arc taken next and outputs inside the comfort zone of
//! the current state, except for the records a scenario deliberately places
//! in a tolerance zone or outside every state's viability zone. A manifest
//! comment lists which records are in which class.

use std::fmt;
use std::str::FromStr;

use eviohmm::possibility::{ConstraintVector, PossibilityDistribution as D};
use eviohmm::{EvIohmmModel, Observation, TraceRecord};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};
use crate::model_file::{LoadedModel, VariableDecl};
use crate::trace::TraceFile;

/// Probability of staying in the current state when the self arc allows it.
const STAY: f64 = 0.9;
const SAMPLE_ATTEMPTS: usize = 64;
const BREACH_ATTEMPTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// Every record in the comfort zone.
    Comfort,
    /// One stretch of outputs in the tolerance zone.
    Tolerance,
    /// Stretches of outputs that no state tolerates.
    Breach,
    /// Alternating tolerance and breach stretches.
    Mixed,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Comfort => "comfort",
            Scenario::Tolerance => "tolerance",
            Scenario::Breach => "breach",
            Scenario::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Comfort,
    Tolerance,
    Breach,
}

impl Zone {
    pub fn name(self) -> &'static str {
        match self {
            Zone::Comfort => "comfort",
            Zone::Tolerance => "tolerance",
            Zone::Breach => "breach",
        }
    }
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Zone class of every record, stored as one comment line of
/// `key=value` tokens with 1-based inclusive record ranges, e.g.
/// `manifest scenario=breach seed=7 comfort=1-99,105-600 breach=100-104`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub scenario: String,
    pub seed: u64,
    pub zones: Vec<Zone>,
}

const MANIFEST_TAG: &str = "manifest";

impl Manifest {
    /// Records (0-based) in `zone`.
    pub fn records(&self, zone: Zone) -> Vec<usize> {
        (0..self.zones.len())
            .filter(|&i| self.zones[i] == zone)
            .collect()
    }

    pub fn find(comments: &[String]) -> Option<Result<Manifest>> {
        comments
            .iter()
            .find(|c| c.split_whitespace().next() == Some(MANIFEST_TAG))
            .map(|c| c.parse())
    }
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{MANIFEST_TAG} scenario={} seed={} length={}",
            self.scenario,
            self.seed,
            self.zones.len()
        )?;
        for zone in [Zone::Comfort, Zone::Tolerance, Zone::Breach] {
            let ranges = ranges(&self.records(zone));
            if !ranges.is_empty() {
                write!(f, " {}={}", zone.name(), ranges)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Manifest {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| CliError::Parse {
            path: "trace".into(),
            location: "manifest".into(),
            message: msg,
        };
        let mut scenario = None;
        let mut seed = None;
        let mut length = None;
        let mut assigned: Vec<(usize, Zone)> = Vec::new();
        for token in s.split_whitespace().skip(1) {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| bad(format!("token `{token}` is not key=value")))?;
            let number = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| bad(format!("`{v}` is not a record number")))
            };
            match key {
                "scenario" => scenario = Some(value.to_string()),
                "seed" => {
                    seed = Some(
                        value
                            .parse::<u64>()
                            .map_err(|_| bad(format!("bad seed `{value}`")))?,
                    )
                }
                "length" => length = Some(number(value)?),
                "comfort" | "tolerance" | "breach" => {
                    let zone = match key {
                        "comfort" => Zone::Comfort,
                        "tolerance" => Zone::Tolerance,
                        _ => Zone::Breach,
                    };
                    for range in value.split(',') {
                        let (a, b) = range.split_once('-').unwrap_or((range, range));
                        let (a, b) = (number(a)?, number(b)?);
                        if a == 0 || b < a {
                            return Err(bad(format!("bad range `{range}`")));
                        }
                        assigned.extend((a..=b).map(|r| (r - 1, zone)));
                    }
                }
                _ => {}
            }
        }
        let length = length.ok_or_else(|| bad("missing length".into()))?;
        let mut zones = vec![None; length];
        for (i, zone) in assigned {
            let slot = zones
                .get_mut(i)
                .ok_or_else(|| bad(format!("record {} beyond length {length}", i + 1)))?;
            if slot.replace(zone).is_some() {
                return Err(bad(format!("record {} listed twice", i + 1)));
            }
        }
        let zones = zones
            .into_iter()
            .enumerate()
            .map(|(i, z)| z.ok_or_else(|| bad(format!("record {} has no zone", i + 1))))
            .collect::<Result<_>>()?;
        Ok(Manifest {
            scenario: scenario.ok_or_else(|| bad("missing scenario".into()))?,
            seed: seed.ok_or_else(|| bad("missing seed".into()))?,
            zones,
        })
    }
}

fn ranges(indices: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut iter = indices.iter().copied().peekable();
    while let Some(start) = iter.next() {
        let mut end = start;
        while iter.peek() == Some(&(end + 1)) {
            end = iter.next().unwrap();
        }
        parts.push(if start == end {
            format!("{}", start + 1)
        } else {
            format!("{}-{}", start + 1, end + 1)
        });
    }
    parts.join(",")
}

// ---------------------------------------------------------------------------
// Zone intervals
// ---------------------------------------------------------------------------

/// Intervals (bounds may be infinite) where the curve is exactly 1.
fn core(d: &D) -> Vec<(f64, f64)> {
    const INF: f64 = f64::INFINITY;
    match *d {
        D::RampUp { b, .. } => vec![(b, INF)],
        D::RampDown { a, .. } => vec![(-INF, a)],
        D::Trapezoid { b, c, .. } => vec![(b, c)],
        D::CrispAbove { threshold } => vec![(threshold, INF)],
        D::CrispBelow { threshold } => vec![(-INF, threshold)],
        D::CrispInterval { lo, hi } => vec![(lo, hi)],
        D::Constant { value } if value >= 1.0 => vec![(-INF, INF)],
        D::Constant { .. } => vec![],
    }
}

/// Intervals where the curve is strictly between 0 and 1.
fn band(d: &D) -> Vec<(f64, f64)> {
    match *d {
        D::RampUp { a, b } | D::RampDown { a, b } => vec![(a, b)],
        D::Trapezoid { a, b, c, d } => [(a, b), (c, d)]
            .into_iter()
            .filter(|(x, y)| x < y)
            .collect(),
        _ => vec![],
    }
}

/// Draws a value in one of `intervals` clipped to `range` and accepted by
/// `check`, preferring values rounded to three decimals.
fn sample<R: Rng>(
    rng: &mut R,
    intervals: &[(f64, f64)],
    range: [f64; 2],
    check: impl Fn(f64) -> bool,
) -> Option<f64> {
    let clipped: Vec<(f64, f64)> = intervals
        .iter()
        .map(|&(lo, hi)| (lo.max(range[0]), hi.min(range[1])))
        .filter(|(lo, hi)| lo <= hi)
        .collect();
    if clipped.is_empty() {
        return None;
    }
    for _ in 0..SAMPLE_ATTEMPTS {
        let &(lo, hi) = clipped.choose(rng).unwrap();
        let x = if lo < hi { rng.gen_range(lo..=hi) } else { lo };
        let rounded = (x * 1000.0).round() / 1000.0;
        if check(rounded) {
            return Some(rounded);
        }
        if check(x) {
            return Some(x);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub scenario: Scenario,
    pub length: usize,
    pub seed: u64,
    /// Extra comment lines written after the manifest.
    pub notes: Vec<String>,
}

struct Generator<'a> {
    model: &'a EvIohmmModel,
    inputs: &'a [VariableDecl],
    outputs: &'a [VariableDecl],
    rng: ChaCha8Rng,
}

impl Generator<'_> {
    /// Values for the active variables of `cv` inside its comfort zone,
    /// with `tolerant` naming one variable to place in its tolerance band.
    fn constrained(
        &mut self,
        cv: &ConstraintVector,
        decls: &[VariableDecl],
        tolerant: Option<&str>,
    ) -> Option<Observation> {
        let mut obs = Observation::new();
        for entry in cv.active() {
            let Some(var) = &entry.variable else {
                // A constant entry: fine only in the comfort zone when it is 1.
                if core(&entry.distribution).is_empty() {
                    return None;
                }
                continue;
            };
            let decl = decls.iter().find(|d| &d.name == var)?;
            let d = entry.distribution;
            let flags: Vec<f64> = decl
                .range
                .into_iter()
                .filter(|x| d.evaluate(*x) == 1.0)
                .collect();
            let value = if d.is_crisp() && !flags.is_empty() && tolerant != Some(var.as_str()) {
                // Crisp tests usually read flags: keep to the range bounds.
                *flags.choose(&mut self.rng).unwrap()
            } else if tolerant == Some(var.as_str()) {
                sample(&mut self.rng, &band(&d), decl.range, |x| {
                    let p = d.evaluate(x);
                    p > 0.0 && p < 1.0
                })?
            } else {
                sample(&mut self.rng, &core(&d), decl.range, |x| {
                    d.evaluate(x) == 1.0
                })?
            };
            obs.insert(var.clone(), value);
        }
        Some(obs)
    }

    /// Completes `obs` with nominal values, or draws from the declared range.
    fn fill(&mut self, mut obs: Observation, decls: &[VariableDecl]) -> Observation {
        for decl in decls {
            if !obs.contains_key(&decl.name) {
                let value = match decl.nominal {
                    Some(v) => v,
                    None => {
                        let x = self.rng.gen_range(decl.range[0]..=decl.range[1]);
                        (x * 1000.0).round() / 1000.0
                    }
                };
                obs.insert(decl.name.clone(), value);
            }
        }
        obs
    }

    fn arc_feasible(&mut self, from: usize, to: usize) -> bool {
        let cv = self.model.transition(from, to);
        !cv.is_forbidden() && self.constrained(cv, self.inputs, None).is_some()
    }

    fn emission_feasible(&mut self, state: usize) -> bool {
        let cv = self.model.emission(state);
        self.constrained(cv, self.outputs, None).is_some()
    }

    fn state_path(&mut self, len: usize) -> Result<Vec<usize>> {
        let n = self.model.num_states();
        let labels = self.model.frame().labels().to_vec();
        let livable: Vec<usize> = (0..n).filter(|&s| self.emission_feasible(s)).collect();
        if let Some(s) = (0..n).find(|s| !livable.contains(s)) {
            return Err(CliError::Generation(format!(
                "state `{}` has an empty comfort zone within the declared output ranges",
                labels[s]
            )));
        }
        let mut next: Vec<Vec<usize>> = Vec::with_capacity(n);
        for from in 0..n {
            let targets: Vec<usize> = (0..n).filter(|&to| self.arc_feasible(from, to)).collect();
            next.push(targets);
        }
        let mut path = Vec::with_capacity(len + 1);
        let mut state = *livable.choose(&mut self.rng).unwrap();
        path.push(state);
        // One extra state so that the last record also gets its inputs.
        for _ in 0..len {
            let targets = &next[state];
            if targets.is_empty() {
                return Err(CliError::Generation(format!(
                    "no arc out of state `{}` can be taken within the declared input ranges",
                    labels[state]
                )));
            }
            state = if targets.contains(&state) && self.rng.gen_bool(STAY) {
                state
            } else {
                *targets.choose(&mut self.rng).unwrap()
            };
            path.push(state);
        }
        Ok(path)
    }

    fn comfort_outputs(&mut self, state: usize) -> Result<Observation> {
        let cv = self.model.emission(state);
        let obs = self.constrained(cv, self.outputs, None).ok_or_else(|| {
            CliError::Generation(format!("cannot sample outputs for state {state}"))
        })?;
        Ok(self.fill(obs, self.outputs))
    }

    fn tolerance_outputs(&mut self, state: usize) -> Result<Observation> {
        let cv = self.model.emission(state).clone();
        let mut vars: Vec<String> = cv
            .active()
            .filter(|e| !band(&e.distribution).is_empty())
            .filter_map(|e| e.variable.clone())
            .collect();
        vars.shuffle(&mut self.rng);
        for var in vars {
            if let Some(obs) = self.constrained(&cv, self.outputs, Some(&var)) {
                return Ok(self.fill(obs, self.outputs));
            }
        }
        Err(CliError::Generation(format!(
            "state `{}` has no tolerance zone within the declared output ranges",
            self.model.frame().labels()[state]
        )))
    }

    /// Outputs that every state's emission rates 0: one output variable is
    /// moved outside all viability zones, the others keep comfort values.
    fn breach_outputs(&mut self, state: usize) -> Result<Observation> {
        let base = self.comfort_outputs(state)?;
        let mut order: Vec<usize> = (0..self.outputs.len()).collect();
        order.shuffle(&mut self.rng);
        for i in order {
            let decl = &self.outputs[i];
            for _ in 0..BREACH_ATTEMPTS {
                let x = self.rng.gen_range(decl.range[0]..=decl.range[1]);
                let x = (x * 1000.0).round() / 1000.0;
                let mut obs = base.clone();
                obs.insert(decl.name.clone(), x);
                if self.model.emission_values(&obs)?.iter().all(|&p| p == 0.0) {
                    return Ok(obs);
                }
            }
        }
        Err(CliError::Generation(
            "no output value within the declared ranges lies outside every state's viability zone"
                .into(),
        ))
    }

    fn inputs_for(&mut self, from: usize, to: usize) -> Result<Observation> {
        let cv = self.model.transition(from, to);
        let obs = self.constrained(cv, self.inputs, None).ok_or_else(|| {
            CliError::Generation(format!("cannot sample inputs for arc {from} -> {to}"))
        })?;
        Ok(self.fill(obs, self.inputs))
    }
}

/// Zone class per record for a scenario.
fn zones<R: Rng>(rng: &mut R, scenario: Scenario, len: usize) -> Vec<Zone> {
    let mut zones = vec![Zone::Comfort; len];
    let mut mark = |start: usize, width: usize, zone: Zone| {
        let start = start.min(len - 1);
        for z in zones.iter_mut().skip(start).take(width.max(1)) {
            *z = zone;
        }
    };
    match scenario {
        Scenario::Comfort => {}
        Scenario::Tolerance => mark(len / 3, (len / 10).max(1), Zone::Tolerance),
        Scenario::Breach | Scenario::Mixed => {
            let count = if scenario == Scenario::Breach {
                (len / 100).max(1)
            } else {
                (len / 60).max(2)
            };
            let slot = len as f64 / count as f64;
            for k in 0..count {
                let width = rng.gen_range(1..=5usize).min(len);
                let center = ((k as f64 + 0.5) * slot) as usize;
                let zone = if scenario == Scenario::Mixed && k % 2 == 0 {
                    Zone::Tolerance
                } else {
                    Zone::Breach
                };
                mark(center.saturating_sub(width / 2), width, zone);
            }
        }
    }
    zones
}

pub fn generate(loaded: &LoadedModel, options: &GenerateOptions) -> Result<TraceFile> {
    if options.length == 0 {
        return Err(CliError::Generation("length must be at least 1".into()));
    }
    let doc = &loaded.document;
    let mut gen = Generator {
        model: &loaded.model,
        inputs: &doc.inputs,
        outputs: &doc.outputs,
        rng: ChaCha8Rng::seed_from_u64(options.seed),
    };
    let zones = zones(&mut gen.rng, options.scenario, options.length);
    let path = gen.state_path(options.length)?;

    let mut records = Vec::with_capacity(options.length);
    for (t, zone) in zones.iter().enumerate() {
        let outputs = match zone {
            Zone::Comfort => gen.comfort_outputs(path[t])?,
            Zone::Tolerance => gen.tolerance_outputs(path[t])?,
            Zone::Breach => gen.breach_outputs(path[t])?,
        };
        let inputs = gen.inputs_for(path[t], path[t + 1])?;
        records.push(TraceRecord::new(t as f64, inputs, outputs));
    }

    let manifest = Manifest {
        scenario: options.scenario.name().to_string(),
        seed: options.seed,
        zones,
    };
    let mut comments = vec![format!("model={}", doc.name), manifest.to_string()];
    comments.extend(options.notes.iter().cloned());
    Ok(TraceFile {
        comments,
        inputs: doc.inputs.iter().map(|d| d.name.clone()).collect(),
        outputs: doc.outputs.iter().map(|d| d.name.clone()).collect(),
        records,
    })
}
