//! Cost-difference goal recognition: every hypothesis `g` is scored by
//! `δ(g) = h_Ω(g) − h(g)`, and the answer is the set of hypotheses with the
//! smallest finite `δ`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use thiserror::Error;

use crate::heuristics::{heuristic, HeuristicError, ModelKind};
use crate::lp::{Arithmetic, SolverOptions, TOLERANCE};
use crate::observations::{NoiseSpec, ObservationSequence};
use crate::sas::{PartialState, SasError, Task};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecognitionError {
    #[error("no hypotheses given")]
    NoHypotheses,
    #[error("every hypothesis is infeasible under the observations")]
    AllInfeasible,
    #[error("hypotheses line {line}: {msg}")]
    Hypothesis { line: usize, msg: String },
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(transparent)]
    Task(#[from] SasError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum HeuristicKind {
    Base,
    #[default]
    Improved,
}

impl HeuristicKind {
    pub fn model_kind(self) -> ModelKind {
        match self {
            HeuristicKind::Base => ModelKind::Base,
            HeuristicKind::Improved => ModelKind::Improved,
        }
    }
}

impl fmt::Display for HeuristicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeuristicKind::Base => "base",
            HeuristicKind::Improved => "improved",
        })
    }
}

impl FromStr for HeuristicKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(HeuristicKind::Base),
            "improved" => Ok(HeuristicKind::Improved),
            _ => Err(format!("unknown heuristic `{s}` (expected base or improved)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecognitionOptions {
    pub heuristic: HeuristicKind,
    pub eps: NoiseSpec,
    pub solver: SolverOptions,
}

impl Default for RecognitionOptions {
    fn default() -> Self {
        Self { heuristic: HeuristicKind::Improved, eps: NoiseSpec::NONE, solver: SolverOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoalEstimate {
    /// `None` is infinity.
    pub h_omega: Option<f64>,
    pub h: Option<f64>,
    pub delta: Option<f64>,
    pub rows: usize,
    pub lp_time: Duration,
    exact_delta: Option<BigRational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    pub per_goal: Vec<GoalEstimate>,
    pub delta_min: f64,
    /// Indices into the hypothesis list.
    pub solution: BTreeSet<usize>,
    pub total_time: Duration,
}

/// Indices minimizing `delta` among finite entries, together with the
/// minimum; `None` when no entry is finite.
fn argmin_set<T: PartialOrd + Clone>(
    deltas: &[Option<T>],
    same: impl Fn(&T, &T) -> bool,
) -> Option<(T, BTreeSet<usize>)> {
    let min = deltas
        .iter()
        .flatten()
        .fold(None::<&T>, |acc, d| match acc {
            Some(m) if m <= d => Some(m),
            _ => Some(d),
        })?
        .clone();
    let set =
        deltas.iter().enumerate().filter(|(_, d)| d.as_ref().is_some_and(|d| same(d, &min))).map(|(i, _)| i).collect();
    Some((min, set))
}

/// `δ_min` and the solution set from per-hypothesis values, comparing
/// deltas within `tol`.
pub fn solution_set_from_values(
    h_omega: &[Option<f64>],
    h: &[Option<f64>],
    tol: f64,
) -> Option<(f64, BTreeSet<usize>)> {
    let deltas: Vec<Option<f64>> = h_omega
        .iter()
        .zip(h)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        })
        .collect();
    argmin_set(&deltas, |d, m| d - m <= tol)
}

pub fn recognize(
    task: &Task,
    hyps: &[PartialState],
    omega: &ObservationSequence,
    opts: &RecognitionOptions,
) -> Result<RecognitionResult, RecognitionError> {
    if hyps.is_empty() {
        return Err(RecognitionError::NoHypotheses);
    }
    let start = Instant::now();
    let s0 = task.initial_state();
    let mut per_goal = Vec::with_capacity(hyps.len());
    for g in hyps {
        let with_obs = heuristic(task, g, s0, omega, opts.eps, opts.heuristic.model_kind(), &opts.solver)?;
        let plain = heuristic(task, g, s0, &ObservationSequence::default(), opts.eps, ModelKind::Goal, &opts.solver)?;
        let finite = with_obs.value.is_some() && plain.value.is_some();
        let delta = finite.then(|| with_obs.value.unwrap_or_default() - plain.value.unwrap_or_default());
        let exact_delta = match (&with_obs.exact, &plain.exact) {
            (Some(a), Some(b)) if finite => Some(a - b),
            _ => None,
        };
        per_goal.push(GoalEstimate {
            h_omega: with_obs.value,
            h: plain.value,
            delta,
            rows: with_obs.rows,
            lp_time: with_obs.lp_time + plain.lp_time,
            exact_delta,
        });
    }
    let (delta_min, solution) = if opts.solver.arithmetic == Arithmetic::Exact {
        let deltas: Vec<Option<BigRational>> = per_goal.iter().map(|e| e.exact_delta.clone()).collect();
        argmin_set(&deltas, |d, m| d == m)
            .map(|(m, set)| (num_traits::ToPrimitive::to_f64(&m).unwrap_or(f64::NAN), set))
    } else {
        let deltas: Vec<Option<f64>> = per_goal.iter().map(|e| e.delta).collect();
        argmin_set(&deltas, |d, m| d - m <= TOLERANCE)
    }
    .ok_or(RecognitionError::AllInfeasible)?;
    Ok(RecognitionResult { per_goal, delta_min, solution, total_time: start.elapsed() })
}

/// Intersection over union; 1 when both sets are empty.
pub fn agreement_ratio<T: Ord>(reference: &BTreeSet<T>, answer: &BTreeSet<T>) -> f64 {
    let union = reference.union(answer).count();
    if union == 0 {
        return 1.0;
    }
    reference.intersection(answer).count() as f64 / union as f64
}

/// Splits at commas outside parentheses.
fn split_top_level(line: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in line.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&line[start..]);
    parts
}

/// Parses one hypothesis: comma-separated `var=value` atoms.
pub fn parse_hypothesis(task: &Task, line: &str) -> Result<PartialState, String> {
    let mut atoms = Vec::new();
    for part in split_top_level(line) {
        let part = part.trim();
        let (var, value) = part.split_once('=').ok_or_else(|| format!("atom `{part}` lacks `=`"))?;
        let (var, value) = (var.trim(), value.trim());
        let atom = task.atom_by_name(var, value).ok_or_else(|| format!("unknown atom `{var}={value}`"))?;
        atoms.push(atom);
    }
    PartialState::new(atoms).map_err(|e| e.to_string())
}

/// One hypothesis per non-empty line; lines starting with `;` are comments.
pub fn parse_hypotheses(task: &Task, text: &str) -> Result<Vec<PartialState>, RecognitionError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        out.push(parse_hypothesis(task, line).map_err(|msg| RecognitionError::Hypothesis { line: n + 1, msg })?);
    }
    Ok(out)
}

pub fn format_hypotheses(task: &Task, hyps: &[PartialState]) -> String {
    hyps.iter().map(|g| task.format_partial_state(g) + "\n").collect()
}
