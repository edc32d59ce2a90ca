//! Disjunctive action landmarks from delete-relaxation backchaining.
//!
//! For an atom `a` missing from the start state, the *first achievers* of
//! `a` are the operators adding `a` whose preconditions are relaxed-reachable
//! without ever adding `a`. Some first achiever is used the first time any
//! plan makes `a` true, so that set is a landmark. Atoms required by every
//! first achiever must be reached earlier, and are backchained on in turn.
//! An empty first-achiever set means `a` is unreachable; the empty landmark
//! then serves as an infeasibility marker.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::observations::ObservationSequence;
use crate::sas::{Atom, PartialState, State, Task};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LandmarkError {
    #[error("observation `{0}` is not an operator of the task")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    GoalDerived,
    /// Derived from the precondition of the observed operator `label`,
    /// first seen at `position` in the observation sequence.
    ObservationDerived {
        label: String,
        position: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Landmark {
    /// Operator indices into the task, sorted. Empty only for the
    /// infeasibility marker.
    pub operators: Vec<usize>,
    pub origin: Origin,
}

impl Landmark {
    pub fn is_infeasible_marker(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn labels<'t>(&self, task: &'t Task) -> Vec<&'t str> {
        self.operators.iter().map(|&i| task.operators()[i].label.as_str()).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LandmarkSet {
    landmarks: Vec<Landmark>,
}

impl LandmarkSet {
    pub fn landmarks(&self) -> &[Landmark] {
        &self.landmarks
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    /// Adds `lm` unless the same operator set with the same origin exists.
    pub fn push(&mut self, lm: Landmark) {
        if !self.landmarks.iter().any(|l| l.origin == lm.origin && l.operators == lm.operators) {
            self.landmarks.push(lm);
        }
    }

    pub fn extend(&mut self, other: LandmarkSet) {
        for lm in other.landmarks {
            self.push(lm);
        }
    }

    /// A goal-derived infeasibility marker is present.
    pub fn is_infeasible(&self) -> bool {
        self.landmarks.iter().any(|l| l.origin == Origin::GoalDerived && l.is_infeasible_marker())
    }

    /// One landmark per line: `{op1,op2,...} <- origin`.
    pub fn dump(&self, task: &Task) -> String {
        let mut out = String::new();
        for lm in &self.landmarks {
            let origin = match &lm.origin {
                Origin::GoalDerived => "goal".to_string(),
                Origin::ObservationDerived { label, position } => format!("obs {label} @{position}"),
            };
            let _ = writeln!(out, "{{{}}} <- {origin}", lm.labels(task).join(","));
        }
        out
    }
}

/// Relaxed reachability from `s`, ignoring operators for which `skip`
/// holds. Returns reached atoms as a per-variable bitmap.
fn relaxed_reach(task: &Task, s: &State, skip: impl Fn(usize) -> bool) -> Vec<Vec<bool>> {
    let mut reached: Vec<Vec<bool>> = task.variables().iter().map(|v| vec![false; v.domain_size()]).collect();
    for (var, &val) in s.values().iter().enumerate() {
        reached[var][val] = true;
    }
    let mut fired = vec![false; task.operators().len()];
    loop {
        let mut changed = false;
        for (i, op) in task.operators().iter().enumerate() {
            if fired[i] || skip(i) || !op.pre.atoms().iter().all(|a| reached[a.var][a.value]) {
                continue;
            }
            fired[i] = true;
            for a in op.eff.atoms() {
                if !reached[a.var][a.value] {
                    reached[a.var][a.value] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return reached;
        }
    }
}

/// Backchaining depth below the target atoms. Depth 0 yields only the
/// first-achiever landmarks of the target atoms themselves.
pub const DEFAULT_DEPTH: usize = 2;

pub fn extract_landmarks(task: &Task, target: &PartialState, s: &State) -> LandmarkSet {
    extract_landmarks_to_depth(task, target, s, DEFAULT_DEPTH, Origin::GoalDerived)
}

pub fn extract_landmarks_to_depth(
    task: &Task,
    target: &PartialState,
    s: &State,
    max_depth: usize,
    origin: Origin,
) -> LandmarkSet {
    let mut set = LandmarkSet::default();
    let mut visited: HashSet<Atom> = HashSet::new();
    let mut frontier: Vec<(Atom, usize)> =
        target.atoms().iter().filter(|&&a| !s.contains(a)).map(|&a| (a, 0)).collect();
    let mut next = 0;
    while next < frontier.len() {
        let (atom, depth) = frontier[next];
        next += 1;
        if !visited.insert(atom) {
            continue;
        }
        let reached = relaxed_reach(task, s, |i| task.operators()[i].achieves(atom));
        let first: Vec<usize> = task
            .operators()
            .iter()
            .enumerate()
            .filter(|(_, op)| op.achieves(atom) && op.pre.atoms().iter().all(|a| reached[a.var][a.value]))
            .map(|(i, _)| i)
            .collect();
        set.push(Landmark { operators: first.clone(), origin: origin.clone() });
        if first.is_empty() || depth >= max_depth {
            continue;
        }
        let mut shared: BTreeSet<Atom> = task.operators()[first[0]].pre.atoms().iter().copied().collect();
        for &i in &first[1..] {
            let pre = &task.operators()[i].pre;
            shared.retain(|a| pre.get(a.var) == Some(a.value));
        }
        for a in shared {
            if !s.contains(a) && !visited.contains(&a) {
                frontier.push((a, depth + 1));
            }
        }
    }
    set
}

/// For each distinct observed label, landmarks for reaching that
/// operator's precondition from `s`.
pub fn observation_landmarks(
    task: &Task,
    omega: &ObservationSequence,
    s: &State,
) -> Result<LandmarkSet, LandmarkError> {
    let mut set = LandmarkSet::default();
    let mut seen = HashSet::new();
    for (position, label) in omega.labels().iter().enumerate() {
        if !seen.insert(label.as_str()) {
            continue;
        }
        let op = task.operator(label).map_err(|_| LandmarkError::UnknownLabel(label.clone()))?;
        let origin = Origin::ObservationDerived { label: label.clone(), position };
        set.extend(extract_landmarks_to_depth(task, &op.pre, s, DEFAULT_DEPTH, origin));
    }
    Ok(set)
}

/// Independent check: `lm` is a landmark for reaching `target` from `s`
/// iff `target` is relaxed-unreachable once the operators of `lm` are
/// removed.
pub fn verify_landmark(task: &Task, target: &PartialState, s: &State, lm: &Landmark) -> bool {
    let removed: HashSet<usize> = lm.operators.iter().copied().collect();
    let reached = relaxed_reach(task, s, |i| removed.contains(&i));
    !target.atoms().iter().all(|a| reached[a.var][a.value])
}
