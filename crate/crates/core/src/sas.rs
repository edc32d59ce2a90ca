//! SAS+ planning tasks: representation, execution semantics, and the
//! Fast Downward translator (version 3) text format.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SasError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unsupported feature: {0}")]
    Unsupported(String),
    #[error("invalid task: {0}")]
    Invalid(String),
    #[error("unknown operator label `{0}`")]
    UnknownLabel(String),
    #[error("operator `{0}` is not applicable")]
    NotApplicable(String),
    #[error("task already has a goal condition")]
    GoalAlreadySet,
    #[error("json task: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, SasError>;

/// Canonical form of an operator label: lowercase, single spaces, and one
/// pair of enclosing parentheses removed. Observation files and SAS operator
/// names are joined on this form.
pub fn normalize_label(raw: &str) -> String {
    let mut s = raw.trim();
    if s.starts_with('(') && s.ends_with(')') && s.len() >= 2 {
        s = &s[1..s.len() - 1];
    }
    s.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub values: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        Self { name: name.into(), values }
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.values.iter().position(|v| v == value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub var: usize,
    pub value: usize,
}

impl Atom {
    pub fn new(var: usize, value: usize) -> Self {
        Self { var, value }
    }
}

/// A set of atoms mentioning each variable at most once, kept sorted by
/// variable index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PartialState(Vec<Atom>);

impl PartialState {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort();
        atoms.dedup();
        if let Some(w) = atoms.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(SasError::Invalid(format!("variable {} assigned twice in partial state", w[0].var)));
        }
        Ok(Self(atoms))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.0.binary_search_by_key(&var, |a| a.var).ok().map(|i| self.0[i].value)
    }

    /// `self ⊆ s`.
    pub fn holds_in(&self, s: &State) -> bool {
        self.0.iter().all(|a| s.0[a.var] == a.value)
    }
}

/// A complete assignment, one value index per task variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub Vec<usize>);

impl State {
    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.0.get(atom.var) == Some(&atom.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operator {
    pub label: String,
    pub pre: PartialState,
    pub eff: PartialState,
    pub cost: u32,
}

impl Operator {
    pub fn new(label: &str, pre: PartialState, eff: PartialState) -> Self {
        Self { label: normalize_label(label), pre, eff, cost: 1 }
    }

    pub fn with_cost(mut self, cost: u32) -> Self {
        self.cost = cost;
        self
    }

    pub fn is_applicable(&self, s: &State) -> bool {
        self.pre.holds_in(s)
    }

    pub fn apply(&self, s: &State) -> Result<State> {
        if !self.is_applicable(s) {
            return Err(SasError::NotApplicable(self.label.clone()));
        }
        Ok(self.apply_unchecked(s))
    }

    pub(crate) fn apply_unchecked(&self, s: &State) -> State {
        let mut next = s.clone();
        for a in self.eff.atoms() {
            next.0[a.var] = a.value;
        }
        next
    }

    pub fn achieves(&self, atom: Atom) -> bool {
        self.eff.get(atom.var) == Some(atom.value)
    }
}

pub fn applicable(s: &State, o: &Operator) -> bool {
    o.is_applicable(s)
}

pub fn apply(s: &State, o: &Operator) -> Result<State> {
    o.apply(s)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub steps: Vec<String>,
}

impl Plan {
    pub fn new<S: AsRef<str>>(steps: impl IntoIterator<Item = S>) -> Self {
        Self { steps: steps.into_iter().map(|s| normalize_label(s.as_ref())).collect() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanValidation {
    pub valid: bool,
    pub cost: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Task {
    variables: Vec<Variable>,
    operators: Vec<Operator>,
    initial: State,
    goal: Option<PartialState>,
    by_label: HashMap<String, usize>,
}

impl PartialEq for Task {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.operators == other.operators
            && self.initial == other.initial
            && self.goal == other.goal
    }
}

impl Eq for Task {}

impl Task {
    pub fn new(
        variables: Vec<Variable>,
        operators: Vec<Operator>,
        initial: State,
        goal: Option<PartialState>,
    ) -> Result<Self> {
        let invalid = |m: String| Err(SasError::Invalid(m));
        if variables.is_empty() {
            return invalid("task has no variables".into());
        }
        for v in &variables {
            if v.values.is_empty() {
                return invalid(format!("variable `{}` has an empty domain", v.name));
            }
            let names = std::iter::once(&v.name).chain(v.values.iter());
            for n in names {
                if n.trim().is_empty() || n.contains('\n') || n.trim() != n {
                    return invalid(format!("bad name {n:?} in variable `{}`", v.name));
                }
            }
        }
        if initial.0.len() != variables.len() {
            return invalid(format!("initial state has {} values for {} variables", initial.0.len(), variables.len()));
        }
        for (i, &val) in initial.0.iter().enumerate() {
            if val >= variables[i].domain_size() {
                return invalid(format!("initial value {val} out of range for `{}`", variables[i].name));
            }
        }
        let check = |ps: &PartialState, what: &str| -> Result<()> {
            for a in ps.atoms() {
                if a.var >= variables.len() || a.value >= variables[a.var].domain_size() {
                    return Err(SasError::Invalid(format!("{what}: atom {a:?} outside the task domains")));
                }
            }
            Ok(())
        };
        if let Some(g) = &goal {
            check(g, "goal")?;
        }
        let mut by_label = HashMap::with_capacity(operators.len());
        for (i, op) in operators.iter().enumerate() {
            if op.label.is_empty() || op.label != normalize_label(&op.label) {
                return invalid(format!("operator label {:?} is not normalized", op.label));
            }
            if op.eff.is_empty() {
                return invalid(format!("operator `{}` has no effects", op.label));
            }
            check(&op.pre, &op.label)?;
            check(&op.eff, &op.label)?;
            if by_label.insert(op.label.clone(), i).is_some() {
                return invalid(format!("duplicate operator label `{}`", op.label));
            }
        }
        Ok(Self { variables, operators, initial, goal, by_label })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn operators(&self) -> &[Operator] {
        &self.operators
    }

    pub fn initial_state(&self) -> &State {
        &self.initial
    }

    pub fn goal(&self) -> Option<&PartialState> {
        self.goal.as_ref()
    }

    pub fn operator_index(&self, label: &str) -> Option<usize> {
        self.by_label.get(label).copied()
    }

    pub fn operator(&self, label: &str) -> Result<&Operator> {
        self.operator_index(label).map(|i| &self.operators[i]).ok_or_else(|| SasError::UnknownLabel(label.to_string()))
    }

    pub fn is_unit_cost(&self) -> bool {
        self.operators.iter().all(|o| o.cost == 1)
    }

    /// The same task with its goal condition removed.
    pub fn without_goal(mut self) -> Self {
        self.goal = None;
        self
    }

    pub fn with_goal(&self, goal: PartialState) -> Result<Self> {
        if self.goal.is_some() {
            return Err(SasError::GoalAlreadySet);
        }
        Self::new(self.variables.clone(), self.operators.clone(), self.initial.clone(), Some(goal))
    }

    pub fn check_partial_state(&self, ps: &PartialState) -> Result<()> {
        for a in ps.atoms() {
            if a.var >= self.variables.len() || a.value >= self.variables[a.var].domain_size() {
                return Err(SasError::Invalid(format!("atom {a:?} outside the task domains")));
            }
        }
        Ok(())
    }

    pub fn resolve_plan(&self, plan: &Plan) -> Result<Vec<usize>> {
        plan.steps.iter().map(|l| self.operator_index(l).ok_or_else(|| SasError::UnknownLabel(l.clone()))).collect()
    }

    pub fn validate_plan(&self, goal: &PartialState, plan: &Plan) -> Result<PlanValidation> {
        let ops = self.resolve_plan(plan)?;
        let mut s = self.initial.clone();
        let mut cost = 0u64;
        for i in ops {
            let op = &self.operators[i];
            if !op.is_applicable(&s) {
                return Ok(PlanValidation { valid: false, cost: None });
            }
            s = op.apply_unchecked(&s);
            cost += u64::from(op.cost);
        }
        if goal.holds_in(&s) {
            Ok(PlanValidation { valid: true, cost: Some(cost) })
        } else {
            Ok(PlanValidation { valid: false, cost: None })
        }
    }

    /// Looks up `var_name=value_name`.
    pub fn atom_by_name(&self, var: &str, value: &str) -> Option<Atom> {
        let vi = self.variables.iter().position(|v| v.name == var)?;
        let val = self.variables[vi].value_index(value)?;
        Some(Atom::new(vi, val))
    }

    pub fn atom_name(&self, a: Atom) -> String {
        let v = &self.variables[a.var];
        format!("{}={}", v.name, v.values[a.value])
    }

    pub fn format_partial_state(&self, ps: &PartialState) -> String {
        ps.atoms().iter().map(|&a| self.atom_name(a)).collect::<Vec<_>>().join(",")
    }

    /// Number of complete states, saturating at `u64::MAX`.
    pub fn state_space_size(&self) -> u64 {
        self.variables.iter().fold(1u64, |acc, v| acc.saturating_mul(v.domain_size() as u64))
    }
}

pub fn validate_plan(task: &Task, goal: &PartialState, plan: &Plan) -> Result<PlanValidation> {
    task.validate_plan(goal, plan)
}

pub fn with_goal(task: &Task, goal: PartialState) -> Result<Task> {
    task.with_goal(goal)
}

// ---------------------------------------------------------------------------
// SAS text format

#[derive(Debug, Clone, Copy)]
pub struct ParseOptions {
    /// Reject operators whose cost is not 1.
    pub strict_unit_cost: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self { strict_unit_cost: true }
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate().peekable(), last: 0 }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.inner.peek() {
            if l.trim().is_empty() {
                self.inner.next();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<&'a str> {
        self.skip_blank();
        self.inner.peek().map(|(_, l)| l.trim())
    }

    fn next(&mut self) -> Result<&'a str> {
        self.skip_blank();
        match self.inner.next() {
            Some((n, l)) => {
                self.last = n + 1;
                Ok(l.trim())
            }
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> SasError {
        SasError::Syntax { line: self.last, msg: msg.into() }
    }

    fn expect(&mut self, keyword: &str) -> Result<()> {
        let l = self.next()?;
        if l == keyword {
            Ok(())
        } else {
            Err(self.err(format!("expected `{keyword}`, found `{l}`")))
        }
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T> {
        let l = self.next()?;
        l.parse().map_err(|_| self.err(format!("expected a number, found `{l}`")))
    }

    fn ints(&mut self, n: usize) -> Result<Vec<i64>> {
        let l = self.next()?;
        let v: Vec<i64> = l
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("expected integers, found `{l}`")))?;
        if v.len() != n {
            return Err(self.err(format!("expected {n} integers, found {}", v.len())));
        }
        Ok(v)
    }

    /// Reads a `var value` pair and checks it against the variable domains.
    fn atom(&mut self, vars: &[Variable]) -> Result<Atom> {
        let v = self.ints(2)?;
        self.check_atom(vars, v[0], v[1])
    }

    fn check_atom(&self, vars: &[Variable], var: i64, value: i64) -> Result<Atom> {
        let var = usize::try_from(var).map_err(|_| self.err("negative variable index"))?;
        let value = usize::try_from(value).map_err(|_| self.err("negative value index"))?;
        match vars.get(var) {
            Some(v) if value < v.domain_size() => Ok(Atom::new(var, value)),
            Some(v) => Err(self.err(format!("value {value} outside domain of `{}`", v.name))),
            None => Err(self.err(format!("unknown variable index {var}"))),
        }
    }

    fn count(&mut self, limit: usize) -> Result<usize> {
        let n: usize = self.number()?;
        if n > limit {
            return Err(self.err(format!("count {n} exceeds the input size")));
        }
        Ok(n)
    }
}

fn partial(lines: &Lines<'_>, atoms: Vec<Atom>) -> Result<PartialState> {
    PartialState::new(atoms).map_err(|_| lines.err("variable mentioned twice in one condition"))
}

pub fn parse_sas(text: &str) -> Result<Task> {
    parse_sas_with(text, ParseOptions::default())
}

pub fn parse_sas_with(text: &str, opts: ParseOptions) -> Result<Task> {
    // Counts can never exceed the number of lines; this bounds allocations
    // on hostile input.
    let limit = text.lines().count();
    let mut lines = Lines::new(text);

    lines.expect("begin_version")?;
    let version: u32 = lines.number()?;
    if version != 3 {
        return Err(lines.err(format!("unsupported SAS version {version}")));
    }
    lines.expect("end_version")?;

    lines.expect("begin_metric")?;
    let metric: u32 = lines.number()?;
    if metric > 1 {
        return Err(lines.err("metric must be 0 or 1"));
    }
    lines.expect("end_metric")?;

    let nvars = lines.count(limit)?;
    let mut variables = Vec::with_capacity(nvars);
    for _ in 0..nvars {
        lines.expect("begin_variable")?;
        let name = lines.next()?.to_string();
        let layer: i64 = lines.number()?;
        if layer != -1 {
            return Err(SasError::Unsupported(format!("derived variable `{name}` (axiom layer {layer})")));
        }
        let size = lines.count(limit)?;
        if size == 0 {
            return Err(lines.err(format!("variable `{name}` has an empty domain")));
        }
        let mut values = Vec::with_capacity(size);
        for _ in 0..size {
            values.push(lines.next()?.to_string());
        }
        lines.expect("end_variable")?;
        variables.push(Variable { name, values });
    }

    let nmutex = lines.count(limit)?;
    for _ in 0..nmutex {
        lines.expect("begin_mutex_group")?;
        let n = lines.count(limit)?;
        for _ in 0..n {
            lines.atom(&variables)?;
        }
        lines.expect("end_mutex_group")?;
    }

    lines.expect("begin_state")?;
    let mut init = Vec::with_capacity(nvars);
    for var in 0..nvars {
        let v: i64 = lines.number()?;
        init.push(lines.check_atom(&variables, var as i64, v)?.value);
    }
    lines.expect("end_state")?;

    let goal = if lines.peek() == Some("begin_goal") {
        lines.next()?;
        let n = lines.count(limit)?;
        let mut atoms = Vec::with_capacity(n);
        for _ in 0..n {
            atoms.push(lines.atom(&variables)?);
        }
        lines.expect("end_goal")?;
        Some(partial(&lines, atoms)?)
    } else {
        None
    };

    let nops = lines.count(limit)?;
    let mut operators = Vec::with_capacity(nops);
    for _ in 0..nops {
        lines.expect("begin_operator")?;
        let label = normalize_label(lines.next()?);
        let nprevail = lines.count(limit)?;
        let mut pre = Vec::with_capacity(nprevail);
        for _ in 0..nprevail {
            pre.push(lines.atom(&variables)?);
        }
        let neff = lines.count(limit)?;
        let mut eff = Vec::with_capacity(neff);
        for _ in 0..neff {
            let l = lines.next()?;
            let toks: Vec<i64> = l
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| lines.err(format!("malformed effect `{l}`")))?;
            match toks.first() {
                Some(0) if toks.len() == 4 => {}
                Some(&n) if n > 0 => {
                    return Err(SasError::Unsupported(format!("conditional effect in operator `{label}`")))
                }
                _ => return Err(lines.err(format!("malformed effect `{l}`"))),
            }
            if toks[2] != -1 {
                pre.push(lines.check_atom(&variables, toks[1], toks[2])?);
            }
            eff.push(lines.check_atom(&variables, toks[1], toks[3])?);
        }
        let raw_cost: i64 = lines.number()?;
        lines.expect("end_operator")?;
        let cost = if metric == 0 {
            1
        } else {
            u32::try_from(raw_cost).map_err(|_| lines.err(format!("bad operator cost {raw_cost}")))?
        };
        if opts.strict_unit_cost && cost != 1 {
            return Err(SasError::Unsupported(format!("operator `{label}` has non-unit cost {cost}")));
        }
        let pre = partial(&lines, pre)?;
        let eff = partial(&lines, eff)?;
        operators.push(Operator { label, pre, eff, cost });
    }

    let naxioms: usize = lines.number()?;
    if naxioms > 0 || lines.peek() == Some("begin_rule") {
        return Err(SasError::Unsupported("axioms".into()));
    }
    if let Some(extra) = lines.peek() {
        return Err(SasError::Syntax { line: lines.last + 1, msg: format!("trailing content `{extra}`") });
    }

    Task::new(variables, operators, State(init), goal)
}

/// Writes the task in SAS version 3 format. The goal section is omitted
/// for tasks without a goal.
pub fn to_sas(task: &Task) -> String {
    let mut out = String::new();
    let unit = task.is_unit_cost();
    let _ = writeln!(out, "begin_version\n3\nend_version");
    let _ = writeln!(out, "begin_metric\n{}\nend_metric", if unit { 0 } else { 1 });
    let _ = writeln!(out, "{}", task.variables.len());
    for v in &task.variables {
        let _ = writeln!(out, "begin_variable\n{}\n-1\n{}", v.name, v.values.len());
        for val in &v.values {
            let _ = writeln!(out, "{val}");
        }
        let _ = writeln!(out, "end_variable");
    }
    let _ = writeln!(out, "0");
    let _ = writeln!(out, "begin_state");
    for v in &task.initial.0 {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(out, "end_state");
    if let Some(g) = &task.goal {
        let _ = writeln!(out, "begin_goal\n{}", g.len());
        for a in g.atoms() {
            let _ = writeln!(out, "{} {}", a.var, a.value);
        }
        let _ = writeln!(out, "end_goal");
    }
    let _ = writeln!(out, "{}", task.operators.len());
    for op in &task.operators {
        let prevail: Vec<&Atom> = op.pre.atoms().iter().filter(|a| op.eff.get(a.var).is_none()).collect();
        let _ = writeln!(out, "begin_operator\n{}\n{}", op.label, prevail.len());
        for a in prevail {
            let _ = writeln!(out, "{} {}", a.var, a.value);
        }
        let _ = writeln!(out, "{}", op.eff.len());
        for a in op.eff.atoms() {
            let pre = op.pre.get(a.var).map_or(-1, |v| v as i64);
            let _ = writeln!(out, "0 {} {} {}", a.var, pre, a.value);
        }
        let _ = writeln!(out, "{}\nend_operator", op.cost);
    }
    let _ = writeln!(out, "0");
    out
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_sas(self))
    }
}

// ---------------------------------------------------------------------------
// JSON task format (hand-written fixtures)

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonTask {
    variables: Vec<Variable>,
    initial: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goal: Option<BTreeMap<String, String>>,
    operators: Vec<JsonOperator>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonOperator {
    name: String,
    #[serde(default)]
    pre: BTreeMap<String, String>,
    eff: BTreeMap<String, String>,
    #[serde(default = "unit_cost")]
    cost: u32,
}

fn unit_cost() -> u32 {
    1
}

fn json_partial(vars: &[Variable], map: &BTreeMap<String, String>) -> Result<PartialState> {
    let mut atoms = Vec::with_capacity(map.len());
    for (var, value) in map {
        let vi = vars
            .iter()
            .position(|v| &v.name == var)
            .ok_or_else(|| SasError::Json(format!("unknown variable `{var}`")))?;
        let val = vars[vi]
            .value_index(value)
            .ok_or_else(|| SasError::Json(format!("unknown value `{value}` for `{var}`")))?;
        atoms.push(Atom::new(vi, val));
    }
    PartialState::new(atoms)
}

fn json_map(vars: &[Variable], ps: &PartialState) -> BTreeMap<String, String> {
    ps.atoms().iter().map(|a| (vars[a.var].name.clone(), vars[a.var].values[a.value].clone())).collect()
}

pub fn parse_task_json(text: &str) -> Result<Task> {
    parse_task_json_with(text, ParseOptions::default())
}

pub fn parse_task_json_with(text: &str, opts: ParseOptions) -> Result<Task> {
    let raw: JsonTask = serde_json::from_str(text).map_err(|e| SasError::Json(e.to_string()))?;
    let vars = raw.variables;
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].iter().any(|w| w.name == v.name) {
            return Err(SasError::Json(format!("duplicate variable `{}`", v.name)));
        }
    }
    let mut init = Vec::with_capacity(vars.len());
    for v in &vars {
        let value =
            raw.initial.get(&v.name).ok_or_else(|| SasError::Json(format!("initial state misses `{}`", v.name)))?;
        init.push(
            v.value_index(value).ok_or_else(|| SasError::Json(format!("unknown value `{value}` for `{}`", v.name)))?,
        );
    }
    if raw.initial.len() != vars.len() {
        return Err(SasError::Json("initial state mentions unknown variables".into()));
    }
    let goal = raw.goal.as_ref().map(|g| json_partial(&vars, g)).transpose()?;
    let mut operators = Vec::with_capacity(raw.operators.len());
    for op in &raw.operators {
        if opts.strict_unit_cost && op.cost != 1 {
            return Err(SasError::Unsupported(format!("operator `{}` has non-unit cost {}", op.name, op.cost)));
        }
        let pre = json_partial(&vars, &op.pre)?;
        let eff = json_partial(&vars, &op.eff)?;
        operators.push(Operator::new(&op.name, pre, eff).with_cost(op.cost));
    }
    Task::new(vars, operators, State(init), goal)
}

pub fn to_task_json(task: &Task) -> String {
    let vars = &task.variables;
    let raw = JsonTask {
        variables: vars.clone(),
        initial: task
            .initial
            .0
            .iter()
            .enumerate()
            .map(|(i, &v)| (vars[i].name.clone(), vars[i].values[v].clone()))
            .collect(),
        goal: task.goal.as_ref().map(|g| json_map(vars, g)),
        operators: task
            .operators
            .iter()
            .map(|o| JsonOperator {
                name: o.label.clone(),
                pre: json_map(vars, &o.pre),
                eff: json_map(vars, &o.eff),
                cost: o.cost,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&raw).expect("task serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "begin_version\n3\nend_version\nbegin_metric\n0\nend_metric\n1\n\
begin_variable\nvar0\n-1\n2\nAtom on\nNegatedAtom on\nend_variable\n0\nbegin_state\n1\nend_state\n\
begin_goal\n1\n0 0\nend_goal\n1\nbegin_operator\nswitch-on\n0\n1\n0 0 -1 0\n1\nend_operator\n0\n";

    #[test]
    fn minimal_task() {
        let t = parse_sas(MINIMAL).unwrap();
        assert_eq!(t.variables().len(), 1);
        assert_eq!(t.operators().len(), 1);
        assert_eq!(t.operators()[0].label, "switch-on");
        assert_eq!(t.goal().unwrap().atoms(), &[Atom::new(0, 0)]);
    }

    #[test]
    fn axioms_rejected() {
        let text = MINIMAL.trim_end().trim_end_matches('0').to_string() + "1\nbegin_rule\n0\n0 1 0\nend_rule\n";
        assert!(matches!(parse_sas(&text), Err(SasError::Unsupported(_))));
    }

    #[test]
    fn derived_variables_rejected() {
        let text = MINIMAL.replace("var0\n-1\n", "var0\n0\n");
        assert!(matches!(parse_sas(&text), Err(SasError::Unsupported(_))));
    }

    #[test]
    fn conditional_effects_rejected() {
        let text = MINIMAL.replace("0 0 -1 0\n", "1 0 1 0 -1 0\n");
        assert!(matches!(parse_sas(&text), Err(SasError::Unsupported(_))));
    }

    #[test]
    fn non_unit_cost_strictness() {
        let text = MINIMAL.replace("begin_metric\n0", "begin_metric\n1").replace("0 0 -1 0\n1\n", "0 0 -1 0\n5\n");
        assert!(matches!(parse_sas(&text), Err(SasError::Unsupported(_))));
        let t = parse_sas_with(&text, ParseOptions { strict_unit_cost: false }).unwrap();
        assert_eq!(t.operators()[0].cost, 5);
        // metric 0 means unit costs regardless of the cost field
        let unit = MINIMAL.replace("0 0 -1 0\n1\n", "0 0 -1 0\n5\n");
        assert_eq!(parse_sas(&unit).unwrap().operators()[0].cost, 1);
    }

    #[test]
    fn syntax_errors_report_lines() {
        let text = MINIMAL.replace("end_state", "end_stat");
        match parse_sas(&text) {
            Err(SasError::Syntax { line, .. }) => assert_eq!(line, 18),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_sas(""), Err(SasError::Syntax { .. })));
        assert!(matches!(
            parse_sas(&MINIMAL.replace("begin_version\n3", "begin_version\n2")),
            Err(SasError::Syntax { .. })
        ));
    }

    #[test]
    fn out_of_domain_atoms_rejected() {
        let text = MINIMAL.replace("0 0 -1 0\n", "0 0 -1 7\n");
        assert!(matches!(parse_sas(&text), Err(SasError::Syntax { .. })));
    }

    #[test]
    fn missing_goal_section() {
        let text = MINIMAL.replace("begin_goal\n1\n0 0\nend_goal\n", "");
        let t = parse_sas(&text).unwrap();
        assert!(t.goal().is_none());
        assert_eq!(parse_sas(&to_sas(&t)).unwrap(), t);
    }

    #[test]
    fn labels_normalize() {
        assert_eq!(normalize_label("  (Move  C0   c1) "), "move c0 c1");
        assert_eq!(normalize_label("pick-up a"), "pick-up a");
    }

    #[test]
    fn apply_and_applicable() {
        let t = parse_sas(MINIMAL).unwrap();
        let op = &t.operators()[0];
        let s0 = t.initial_state().clone();
        assert!(applicable(&s0, op));
        let s1 = apply(&s0, op).unwrap();
        assert_eq!(s1.values(), &[0]);
        // effect equal to the current assignment is a fixed point
        assert_eq!(apply(&s1, op).unwrap(), s1);

        let guarded = Operator::new(
            "guarded",
            PartialState::new(vec![Atom::new(0, 0)]).unwrap(),
            PartialState::new(vec![Atom::new(0, 1)]).unwrap(),
        );
        assert!(!applicable(&s0, &guarded));
        assert_eq!(apply(&s0, &guarded), Err(SasError::NotApplicable("guarded".into())));
    }

    #[test]
    fn plan_validation_basics() {
        let t = parse_sas(MINIMAL).unwrap();
        let g = t.goal().unwrap().clone();
        assert_eq!(t.validate_plan(&g, &Plan::default()).unwrap(), PlanValidation { valid: false, cost: None });
        assert_eq!(
            t.validate_plan(&PartialState::empty(), &Plan::default()).unwrap(),
            PlanValidation { valid: true, cost: Some(0) }
        );
        assert_eq!(
            t.validate_plan(&g, &Plan::new(["switch-on"])).unwrap(),
            PlanValidation { valid: true, cost: Some(1) }
        );
        assert!(matches!(t.validate_plan(&g, &Plan::new(["nope"])), Err(SasError::UnknownLabel(_))));
    }

    #[test]
    fn goal_can_be_set_once() {
        let t = parse_sas(MINIMAL).unwrap().without_goal();
        let g = t.with_goal(PartialState::empty()).unwrap();
        assert!(g.goal().unwrap().holds_in(g.initial_state()));
        assert_eq!(g.with_goal(PartialState::empty()).unwrap_err(), SasError::GoalAlreadySet);
        let bad = PartialState::new(vec![Atom::new(0, 9)]).unwrap();
        assert!(matches!(t.with_goal(bad), Err(SasError::Invalid(_))));
    }

    #[test]
    fn partial_state_rejects_duplicate_variables() {
        assert!(PartialState::new(vec![Atom::new(0, 0), Atom::new(0, 1)]).is_err());
        let ps = PartialState::new(vec![Atom::new(2, 1), Atom::new(0, 0), Atom::new(2, 1)]).unwrap();
        assert_eq!(ps.atoms(), &[Atom::new(0, 0), Atom::new(2, 1)]);
    }

    #[test]
    fn json_round_trip() {
        let t = parse_sas(MINIMAL).unwrap();
        let json = to_task_json(&t);
        assert_eq!(parse_task_json(&json).unwrap(), t);
        assert!(matches!(parse_task_json("{}"), Err(SasError::Json(_))));
    }
}
