//! Linear and integer programs over nonnegative columns.

mod branch;
pub mod external;
mod model;
pub mod mps;
pub mod simplex;

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

pub use model::{Column, LinearModel, Row};
use simplex::{minimize, Constraint, Scalar, Sense, SimplexOptions, SimplexResult, SimplexStatus};

/// Feasibility tolerance applied when checking float solutions.
pub const TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("solution violates {0} after restarting with Bland's rule")]
    NumericalFailure(String),
    #[error("iteration or node limit reached")]
    IterationLimit,
    #[error("external solver: {0}")]
    External(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolveMode {
    Lp,
    Ip,
}

impl fmt::Display for SolveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveMode::Lp => "lp",
            SolveMode::Ip => "ip",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Float,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub mode: SolveMode,
    pub arithmetic: Arithmetic,
    pub max_iterations: usize,
    pub max_nodes: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { mode: SolveMode::Lp, arithmetic: Arithmetic::Float, max_iterations: 100_000, max_nodes: 20_000 }
    }
}

impl SolverOptions {
    pub fn new(mode: SolveMode) -> Self {
        Self { mode, ..Self::default() }
    }

    pub fn exact(mut self) -> Self {
        self.arithmetic = Arithmetic::Exact;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Set when `status` is `Optimal`.
    pub objective: Option<f64>,
    /// The exact objective, in exact arithmetic only.
    pub exact_objective: Option<BigRational>,
    /// Column values by column index; empty unless optimal.
    pub values: Vec<f64>,
}

impl LpOutcome {
    fn without_solution(status: LpStatus) -> Self {
        Self { status, objective: None, exact_objective: None, values: Vec::new() }
    }

    /// Column values keyed by column name.
    pub fn named_values(&self, model: &LinearModel) -> BTreeMap<String, f64> {
        model.columns.iter().zip(&self.values).map(|(c, v)| (c.name.clone(), *v)).collect()
    }
}

fn to_constraints<T: Scalar>(model: &LinearModel) -> Vec<Constraint<T>> {
    let mut out = Vec::with_capacity(model.rows.len());
    for r in &model.rows {
        let coefficients: Vec<(usize, T)> = r.coefficients.iter().map(|(j, a)| (*j, T::from_rational(a))).collect();
        match (r.lower, r.upper) {
            (Some(l), Some(u)) if l == u => {
                out.push(Constraint { coefficients, sense: Sense::Eq, rhs: T::from_rational(&l) });
            }
            (l, u) => {
                if let Some(l) = l {
                    out.push(Constraint {
                        coefficients: coefficients.clone(),
                        sense: Sense::Ge,
                        rhs: T::from_rational(&l),
                    });
                }
                if let Some(u) = u {
                    out.push(Constraint { coefficients, sense: Sense::Le, rhs: T::from_rational(&u) });
                }
            }
        }
    }
    for (j, c) in model.columns.iter().enumerate() {
        if let Some(u) = c.upper {
            out.push(Constraint { coefficients: vec![(j, T::one())], sense: Sense::Le, rhs: T::from_rational(&u) });
        }
    }
    out
}

fn run<T: Scalar>(model: &LinearModel, opts: &SolverOptions, bland: bool) -> SimplexResult<T> {
    let n = model.num_columns();
    let objective: Vec<T> = model.columns.iter().map(|c| T::from_rational(&c.objective)).collect();
    let constraints = to_constraints::<T>(model);
    let sopts = SimplexOptions { max_iterations: opts.max_iterations, always_bland: bland, ..Default::default() };
    match opts.mode {
        SolveMode::Lp => minimize(n, &objective, &constraints, &sopts),
        SolveMode::Ip => {
            let integral = model.has_integral_objective();
            branch::branch_and_bound(n, &objective, &constraints, &sopts, opts.max_nodes, integral)
        }
    }
}

fn status_of<T>(r: &SimplexResult<T>) -> Result<Option<LpStatus>, LpError> {
    match r.status {
        SimplexStatus::Optimal => Ok(None),
        SimplexStatus::Infeasible => Ok(Some(LpStatus::Infeasible)),
        SimplexStatus::Unbounded => Ok(Some(LpStatus::Unbounded)),
        SimplexStatus::IterationLimit => Err(LpError::IterationLimit),
    }
}

pub fn solve(model: &LinearModel, mode: SolveMode) -> Result<LpOutcome, LpError> {
    solve_with(model, &SolverOptions::new(mode))
}

/// Minimizes the model. In float arithmetic an optimal point is checked
/// against every row at [`TOLERANCE`]; a violation triggers one restart
/// with Bland's rule before giving up.
pub fn solve_with(model: &LinearModel, opts: &SolverOptions) -> Result<LpOutcome, LpError> {
    if model.infeasible {
        return Ok(LpOutcome::without_solution(LpStatus::Infeasible));
    }
    match opts.arithmetic {
        Arithmetic::Exact => {
            let r = run::<BigRational>(model, opts, false);
            if let Some(status) = status_of(&r)? {
                return Ok(LpOutcome::without_solution(status));
            }
            Ok(LpOutcome {
                status: LpStatus::Optimal,
                objective: Some(r.objective.to_f64()),
                values: r.values.iter().map(Scalar::to_f64).collect(),
                exact_objective: Some(r.objective),
            })
        }
        Arithmetic::Float => {
            let mut last = String::new();
            for bland in [false, true] {
                let r = run::<f64>(model, opts, bland);
                if let Some(status) = status_of(&r)? {
                    return Ok(LpOutcome::without_solution(status));
                }
                let violations = model.violations(&r.values, TOLERANCE);
                if violations.is_empty() {
                    return Ok(LpOutcome {
                        status: LpStatus::Optimal,
                        objective: Some(r.objective),
                        exact_objective: None,
                        values: r.values,
                    });
                }
                log::debug!("simplex solution violates {violations:?} (bland = {bland})");
                last = violations.join(", ");
            }
            Err(LpError::NumericalFailure(last))
        }
    }
}
