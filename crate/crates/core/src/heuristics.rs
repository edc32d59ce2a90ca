//! Operator-counting heuristics for goal recognition.
//!
//! Every model has one column `Y{i}` per operator `i` (its count in a
//! plan) and minimizes total cost. Constraint families are added by
//! [`ConstraintSource`]s:
//!
//! * goal landmarks: `Σ_{o∈L} Y_o ≥ 1` per landmark `L`;
//! * observation counting: a column `W{i}` per observed operator with
//!   `W_i ≤ occ(i)`, `W_i ≤ Y_i` and `Σ W ≥ |Ω| − ⌊|Ω|ε⌋`;
//! * observation landmarks: `Σ_{o∈L} Y_o − W_ō / occ(ō) ≥ 0` for every
//!   landmark `L` of the precondition of an observed operator `ō`.

use std::time::{Duration, Instant};

use num_rational::{BigRational, Rational64};
use thiserror::Error;

use crate::landmarks::{extract_landmarks, observation_landmarks, LandmarkError, LandmarkSet, Origin};
use crate::lp::{self, LinearModel, LpError, LpStatus, Row, SolveMode, SolverOptions};
use crate::observations::{max_ignorable, NoiseSpec, ObservationSequence};
use crate::sas::{PartialState, SasError, State, Task};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeuristicError {
    #[error("observation `{0}` is not an operator of the task")]
    UnknownLabel(String),
    #[error("no observation column for `{0}`")]
    MissingObservationColumn(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Task(#[from] SasError),
}

impl From<LandmarkError> for HeuristicError {
    fn from(e: LandmarkError) -> Self {
        match e {
            LandmarkError::UnknownLabel(l) => HeuristicError::UnknownLabel(l),
        }
    }
}

pub fn operator_column(i: usize) -> String {
    format!("Y{i}")
}

pub fn observation_column(i: usize) -> String {
    format!("W{i}")
}

fn int(v: i64) -> Rational64 {
    Rational64::from_integer(v)
}

/// A family of operator-counting constraints.
pub trait ConstraintSource {
    fn add_to(&self, task: &Task, model: &mut LinearModel) -> Result<(), HeuristicError>;
}

pub struct GoalLandmarks<'a>(pub &'a LandmarkSet);

pub struct ObservationCounting<'a> {
    pub omega: &'a ObservationSequence,
    pub eps: NoiseSpec,
}

pub struct ObservationLandmarks<'a> {
    pub landmarks: &'a LandmarkSet,
    pub omega: &'a ObservationSequence,
}

impl ConstraintSource for GoalLandmarks<'_> {
    fn add_to(&self, task: &Task, m: &mut LinearModel) -> Result<(), HeuristicError> {
        for (k, lm) in self.0.landmarks().iter().enumerate() {
            if lm.origin != Origin::GoalDerived {
                continue;
            }
            if lm.is_infeasible_marker() {
                m.infeasible = true;
            }
            let coefficients = lm
                .operators
                .iter()
                .map(|&i| column(m, &operator_column(i)).map(|c| (c, int(1))))
                .collect::<Result<Vec<_>, _>>()?;
            m.add_row(Row::at_least(format!("lm{k} {}", lm.labels(task).join("|")), coefficients, int(1)));
        }
        Ok(())
    }
}

fn column(m: &LinearModel, name: &str) -> Result<usize, HeuristicError> {
    m.column_index(name).ok_or_else(|| HeuristicError::MissingObservationColumn(name.to_string()))
}

impl ConstraintSource for ObservationCounting<'_> {
    fn add_to(&self, task: &Task, m: &mut LinearModel) -> Result<(), HeuristicError> {
        let mut observed = Vec::new();
        for (label, occ) in self.omega.occurrences() {
            let i = task.operator_index(label).ok_or_else(|| HeuristicError::UnknownLabel(label.to_string()))?;
            observed.push((i, label, occ));
        }
        observed.sort_by_key(|&(i, _, _)| i);
        let mut sum = Vec::new();
        for (i, label, occ) in observed {
            let y = column(m, &operator_column(i))?;
            let w = m.add_column(observation_column(i), int(0), None);
            m.add_row(Row::at_most(format!("occ {label}"), vec![(w, int(1))], int(occ as i64)));
            m.add_row(Row::at_most(format!("count {label}"), vec![(w, int(1)), (y, int(-1))], int(0)));
            sum.push((w, int(1)));
        }
        let need = self.omega.len() - max_ignorable(self.omega, self.eps);
        m.add_row(Row::at_least("observed", sum, int(need as i64)));
        Ok(())
    }
}

impl ConstraintSource for ObservationLandmarks<'_> {
    fn add_to(&self, task: &Task, m: &mut LinearModel) -> Result<(), HeuristicError> {
        for (k, lm) in self.landmarks.landmarks().iter().enumerate() {
            let Origin::ObservationDerived { label, .. } = &lm.origin else {
                continue;
            };
            let i = task.operator_index(label).ok_or_else(|| HeuristicError::UnknownLabel(label.clone()))?;
            let w = column(m, &observation_column(i))?;
            let occ = self.omega.occurrences_of(label);
            if occ == 0 {
                return Err(HeuristicError::MissingObservationColumn(label.clone()));
            }
            let mut coefficients = lm
                .operators
                .iter()
                .map(|&o| column(m, &operator_column(o)).map(|c| (c, int(1))))
                .collect::<Result<Vec<_>, _>>()?;
            coefficients.push((w, Rational64::new(-1, occ as i64)));
            m.add_row(Row::at_least(format!("olm{k} {label}"), coefficients, int(0)));
        }
        Ok(())
    }
}

/// A model with one count column per operator and no rows.
pub fn empty_model(task: &Task) -> LinearModel {
    let mut m = LinearModel::new();
    for (i, op) in task.operators().iter().enumerate() {
        m.add_column(operator_column(i), int(i64::from(op.cost)), None);
    }
    m
}

pub fn build_model(task: &Task, sources: &[&dyn ConstraintSource]) -> Result<LinearModel, HeuristicError> {
    let mut m = empty_model(task);
    for s in sources {
        s.add_to(task, &mut m)?;
    }
    Ok(m)
}

/// Count columns plus one row per goal-derived landmark. An infeasibility
/// marker flags the model infeasible.
pub fn build_base_model(task: &Task, lms: &LandmarkSet) -> LinearModel {
    build_model(task, &[&GoalLandmarks(lms)]).expect("landmark operators are task operators")
}

pub fn add_observation_constraints(
    task: &Task,
    m: &mut LinearModel,
    omega: &ObservationSequence,
    eps: NoiseSpec,
) -> Result<(), HeuristicError> {
    ObservationCounting { omega, eps }.add_to(task, m)
}

pub fn add_observation_landmark_constraints(
    task: &Task,
    m: &mut LinearModel,
    obs_lms: &LandmarkSet,
    omega: &ObservationSequence,
) -> Result<(), HeuristicError> {
    ObservationLandmarks { landmarks: obs_lms, omega }.add_to(task, m)
}

/// Which constraint families a model contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Goal landmarks only: the unrestricted estimate `h`.
    Goal,
    /// Goal landmarks and observation counting.
    Base,
    /// Base plus observation landmarks.
    Improved,
}

/// Builds the model of `kind` for reaching `g` from `s`.
pub fn model_for(
    task: &Task,
    g: &PartialState,
    s: &State,
    omega: &ObservationSequence,
    eps: NoiseSpec,
    kind: ModelKind,
) -> Result<LinearModel, HeuristicError> {
    task.check_partial_state(g)?;
    let goal_lms = extract_landmarks(task, g, s);
    let mut m = build_base_model(task, &goal_lms);
    if kind >= ModelKind::Base {
        add_observation_constraints(task, &mut m, omega, eps)?;
    }
    if kind == ModelKind::Improved {
        let obs_lms = observation_landmarks(task, omega, s)?;
        add_observation_landmark_constraints(task, &mut m, &obs_lms, omega)?;
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicReport {
    /// Raw objective; `None` is infinity.
    pub value: Option<f64>,
    /// Exact objective, in exact arithmetic only.
    pub exact: Option<BigRational>,
    pub rows: usize,
    pub lp_time: Duration,
    pub mode: SolveMode,
}

impl HeuristicReport {
    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }
}

pub fn solve_model(m: &LinearModel, solver: &SolverOptions) -> Result<HeuristicReport, HeuristicError> {
    let start = Instant::now();
    let out = lp::solve_with(m, solver)?;
    let lp_time = start.elapsed();
    let (value, exact) = match out.status {
        LpStatus::Optimal => (out.objective, out.exact_objective),
        LpStatus::Infeasible => (None, None),
        // costs are nonnegative, so this indicates a malformed model
        LpStatus::Unbounded => return Err(LpError::NumericalFailure("unbounded objective".into()).into()),
    };
    Ok(HeuristicReport { value, exact, rows: m.num_rows(), lp_time, mode: solver.mode })
}

pub fn heuristic(
    task: &Task,
    g: &PartialState,
    s: &State,
    omega: &ObservationSequence,
    eps: NoiseSpec,
    kind: ModelKind,
    solver: &SolverOptions,
) -> Result<HeuristicReport, HeuristicError> {
    solve_model(&model_for(task, g, s, omega, eps, kind)?, solver)
}

/// The landmark estimate of reaching `g` without observation constraints.
pub fn h_goal(
    task: &Task,
    g: &PartialState,
    s: &State,
    solver: &SolverOptions,
) -> Result<HeuristicReport, HeuristicError> {
    heuristic(task, g, s, &ObservationSequence::default(), NoiseSpec::NONE, ModelKind::Goal, solver)
}

pub fn h_base(
    task: &Task,
    g: &PartialState,
    s: &State,
    omega: &ObservationSequence,
    eps: NoiseSpec,
    solver: &SolverOptions,
) -> Result<HeuristicReport, HeuristicError> {
    heuristic(task, g, s, omega, eps, ModelKind::Base, solver)
}

pub fn h_improved(
    task: &Task,
    g: &PartialState,
    s: &State,
    omega: &ObservationSequence,
    eps: NoiseSpec,
    solver: &SolverOptions,
) -> Result<HeuristicReport, HeuristicError> {
    heuristic(task, g, s, omega, eps, ModelKind::Improved, solver)
}

/// Goal-landmark LP estimate for search: the LP optimum rounded up, or
/// `None` for dead ends.
pub struct GoalLandmarkHeuristic<'a> {
    task: &'a Task,
    goal: &'a PartialState,
    solver: SolverOptions,
}

impl<'a> GoalLandmarkHeuristic<'a> {
    pub fn new(task: &'a Task, goal: &'a PartialState) -> Self {
        Self { task, goal, solver: SolverOptions::new(SolveMode::Lp) }
    }

    pub fn estimate(&self, s: &State) -> Option<f64> {
        let m = build_base_model(self.task, &extract_landmarks(self.task, self.goal, s));
        match solve_model(&m, &self.solver) {
            Ok(r) => r.value.map(|v| (v - lp::TOLERANCE).ceil().max(0.0)),
            // a failed solve must not prune: fall back to blind search
            Err(_) => Some(0.0),
        }
    }
}
