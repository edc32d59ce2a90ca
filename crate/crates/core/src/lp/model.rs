use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

/// A nonnegative model column. Bounds and coefficients are kept as exact
/// rationals so the same model can be solved in floating point or exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub upper: Option<Rational64>,
    pub objective: Rational64,
}

/// `lower ≤ Σ coefficients·x ≤ upper`; a missing bound is infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coefficients: Vec<(usize, Rational64)>,
    pub lower: Option<Rational64>,
    pub upper: Option<Rational64>,
}

impl Row {
    pub fn at_least(name: impl Into<String>, coefficients: Vec<(usize, Rational64)>, rhs: Rational64) -> Self {
        Self { name: name.into(), coefficients, lower: Some(rhs), upper: None }
    }

    pub fn at_most(name: impl Into<String>, coefficients: Vec<(usize, Rational64)>, rhs: Rational64) -> Self {
        Self { name: name.into(), coefficients, lower: None, upper: Some(rhs) }
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.coefficients.iter().map(|(c, a)| a.to_f64().unwrap_or(f64::NAN) * values[*c]).sum()
    }
}

/// Minimization model over nonnegative columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearModel {
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    /// Set when model construction already proved infeasibility.
    pub infeasible: bool,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_column(&mut self, name: impl Into<String>, objective: Rational64, upper: Option<Rational64>) -> usize {
        self.columns.push(Column { name: name.into(), upper, objective });
        self.columns.len() - 1
    }

    pub fn add_row(&mut self, row: Row) -> usize {
        debug_assert!(row.coefficients.iter().all(|(c, _)| *c < self.columns.len()));
        self.rows.push(row);
        self.rows.len() - 1
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.columns.iter().zip(values).map(|(c, v)| c.objective.to_f64().unwrap_or(f64::NAN) * v).sum()
    }

    /// Names of rows or column bounds violated by `values` beyond `tol`.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            let v = values[j];
            if v < -tol || c.upper.is_some_and(|u| v > u.to_f64().unwrap_or(f64::NAN) + tol) {
                out.push(format!("bound {}", c.name));
            }
        }
        for r in &self.rows {
            let a = r.activity(values);
            let low = r.lower.is_some_and(|l| a < l.to_f64().unwrap_or(f64::NAN) - tol);
            let high = r.upper.is_some_and(|u| a > u.to_f64().unwrap_or(f64::NAN) + tol);
            if low || high {
                out.push(r.name.clone());
            }
        }
        out
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.columns.len() && self.violations(values, tol).is_empty()
    }

    /// Whether every integer point has an integer objective value.
    pub(crate) fn has_integral_objective(&self) -> bool {
        self.columns.iter().all(|c| c.objective.is_integer())
    }
}

impl fmt::Display for LinearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "min")?;
        for c in &self.columns {
            if !c.objective.is_zero() {
                write!(f, " + {}·{}", c.objective, c.name)?;
            }
        }
        writeln!(f)?;
        for r in &self.rows {
            let lhs: Vec<String> =
                r.coefficients.iter().map(|(c, a)| format!("{a}·{}", self.columns[*c].name)).collect();
            let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join(" + ") };
            match (r.lower, r.upper) {
                (Some(l), Some(u)) => writeln!(f, "{}: {l} <= {lhs} <= {u}", r.name)?,
                (Some(l), None) => writeln!(f, "{}: {lhs} >= {l}", r.name)?,
                (None, Some(u)) => writeln!(f, "{}: {lhs} <= {u}", r.name)?,
                (None, None) => writeln!(f, "{}: {lhs} free", r.name)?,
            }
        }
        Ok(())
    }
}
