//! Process-level adapter for cross-checking against an external solver.
//!
//! The model is written to a temporary MPS file and the command is run as
//! `<program> <args...> <file.mps> <lp|ip>`. The first non-empty line of
//! its standard output must be `optimal <objective>`, `infeasible` or
//! `unbounded`. `scripts/mps_solve.py` implements this protocol on top of
//! SciPy.

use std::process::Command;

use super::mps::write_mps;
use super::{LinearModel, LpError, LpOutcome, LpStatus, SolveMode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolver {
    pub program: String,
    pub args: Vec<String>,
}

impl ExternalSolver {
    pub fn new(program: impl Into<String>, args: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { program: program.into(), args: args.into_iter().map(Into::into).collect() }
    }

    pub fn solve(&self, model: &LinearModel, mode: SolveMode) -> Result<LpOutcome, LpError> {
        let dir = tempfile::tempdir().map_err(|e| LpError::External(e.to_string()))?;
        let path = dir.path().join("model.mps");
        std::fs::write(&path, write_mps(model, "GOALREC", mode == SolveMode::Ip))
            .map_err(|e| LpError::External(e.to_string()))?;
        let output = Command::new(&self.program)
            .args(&self.args)
            .arg(&path)
            .arg(mode.to_string())
            .output()
            .map_err(|e| LpError::External(format!("{}: {e}", self.program)))?;
        if !output.status.success() {
            return Err(LpError::External(format!(
                "{} exited with {}: {}",
                self.program,
                output.status,
                String::from_utf8_lossy(&output.stderr).trim()
            )));
        }
        parse_reply(&String::from_utf8_lossy(&output.stdout))
    }
}

pub fn parse_reply(stdout: &str) -> Result<LpOutcome, LpError> {
    let line = stdout.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    let mut words = line.split_whitespace();
    let outcome = |status| LpOutcome { status, objective: None, exact_objective: None, values: Vec::new() };
    match (words.next(), words.next(), words.next()) {
        (Some("optimal"), Some(v), None) => {
            let v: f64 = v.parse().map_err(|_| LpError::External(format!("bad objective `{v}`")))?;
            Ok(LpOutcome { objective: Some(v), ..outcome(LpStatus::Optimal) })
        }
        (Some("infeasible"), None, None) => Ok(outcome(LpStatus::Infeasible)),
        (Some("unbounded"), None, None) => Ok(outcome(LpStatus::Unbounded)),
        _ => Err(LpError::External(format!("unrecognized reply `{line}`"))),
    }
}
