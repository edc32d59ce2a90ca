//! Exact and bounded-suboptimal state-space search.
//!
//! These are the oracles the LP heuristics are checked against: optimal
//! plan costs, optimal costs of plans complying with an observation
//! sequence (via a matched-prefix product search), and the exact reference
//! and cost-difference solution sets built from them.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::hash::Hash;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::observations::ObservationSequence;
use crate::sas::{PartialState, Plan, SasError, State, Task};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("search budget exhausted after {expanded} expansions")]
    ResourceLimit { expanded: u64 },
    #[error("no plan exists")]
    Unsolvable,
    #[error("weight {0} must be at least 1")]
    BadWeight(f64),
    #[error(transparent)]
    Task(#[from] SasError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_expansions: u64,
    pub max_time: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { max_expansions: 1_000_000, max_time: Duration::from_secs(60) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    /// `None` encodes an infinite cost: no plan exists.
    pub cost: Option<u64>,
    pub plan: Option<Plan>,
    pub expanded: u64,
    pub generated: u64,
}

impl SearchResult {
    pub fn is_solved(&self) -> bool {
        self.cost.is_some()
    }
}

/// A node of the compliance product search: a task state plus the number
/// of observations already matched.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompiledComplianceState {
    pub base: State,
    pub matched: usize,
}

#[derive(Clone, Copy)]
struct Key(f64);

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Open-list entry ordered as a min-heap on (f, insertion order).
#[derive(PartialEq, Eq)]
struct OpenEntry {
    f: Key,
    seq: u64,
    node: usize,
    g: u64,
}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.f.cmp(&self.f).then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct NodeInfo<N> {
    node: N,
    g: u64,
    parent: Option<(usize, usize)>,
}

/// Best-first search with `f = g + w·h`, reopening nodes whose `g`
/// improves. `succ` must push successors as `(operator index, node)`.
/// `h` returns `None` for recognized dead ends.
fn best_first<N, S, G, H>(
    task: &Task,
    start: N,
    mut succ: S,
    is_goal: G,
    mut h: H,
    weight: f64,
    budget: SearchBudget,
) -> Result<SearchResult, SearchError>
where
    N: Clone + Eq + Hash,
    S: FnMut(&N, &mut Vec<(usize, N)>),
    G: Fn(&N) -> bool,
    H: FnMut(&N) -> Option<f64>,
{
    let started = Instant::now();
    let mut nodes: Vec<NodeInfo<N>> = Vec::new();
    let mut index: HashMap<N, usize> = HashMap::new();
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    let (mut expanded, mut generated) = (0u64, 1u64);

    let Some(h0) = h(&start) else {
        return Ok(SearchResult { cost: None, plan: None, expanded, generated });
    };
    index.insert(start.clone(), 0);
    nodes.push(NodeInfo { node: start, g: 0, parent: None });
    open.push(OpenEntry { f: Key(weight * h0), seq, node: 0, g: 0 });
    let mut buf = Vec::new();

    while let Some(OpenEntry { node: id, g, .. }) = open.pop() {
        if g > nodes[id].g {
            continue;
        }
        if is_goal(&nodes[id].node) {
            let mut steps = Vec::new();
            let mut cur = id;
            while let Some((p, op)) = nodes[cur].parent {
                steps.push(task.operators()[op].label.clone());
                cur = p;
            }
            steps.reverse();
            return Ok(SearchResult { cost: Some(g), plan: Some(Plan { steps }), expanded, generated });
        }
        expanded += 1;
        if expanded > budget.max_expansions || (expanded % 1024 == 0 && started.elapsed() > budget.max_time) {
            return Err(SearchError::ResourceLimit { expanded });
        }
        buf.clear();
        succ(&nodes[id].node, &mut buf);
        for (op, child) in buf.drain(..) {
            generated += 1;
            let cg = g + u64::from(task.operators()[op].cost);
            let cid = match index.entry(child) {
                Entry::Occupied(e) => {
                    let cid = *e.get();
                    if cg >= nodes[cid].g {
                        continue;
                    }
                    nodes[cid].g = cg;
                    nodes[cid].parent = Some((id, op));
                    cid
                }
                Entry::Vacant(e) => {
                    let cid = nodes.len();
                    nodes.push(NodeInfo { node: e.key().clone(), g: cg, parent: Some((id, op)) });
                    e.insert(cid);
                    cid
                }
            };
            let Some(hv) = h(&nodes[cid].node) else { continue };
            seq += 1;
            open.push(OpenEntry { f: Key(cg as f64 + weight * hv), seq, node: cid, g: cg });
        }
    }
    Ok(SearchResult { cost: None, plan: None, expanded, generated })
}

/// Operator indices sorted by label; successor generation follows this
/// order so searches are deterministic.
fn label_order(task: &Task) -> Vec<usize> {
    let mut order: Vec<usize> = (0..task.operators().len()).collect();
    order.sort_by(|&a, &b| task.operators()[a].label.cmp(&task.operators()[b].label));
    order
}

pub fn optimal_cost(task: &Task, goal: &PartialState) -> Result<SearchResult, SearchError> {
    optimal_cost_with(task, goal, SearchBudget::default())
}

/// Uniform-cost search from the initial state to `goal`.
pub fn optimal_cost_with(task: &Task, goal: &PartialState, budget: SearchBudget) -> Result<SearchResult, SearchError> {
    task.check_partial_state(goal)?;
    let order = label_order(task);
    best_first(
        task,
        task.initial_state().clone(),
        |s: &State, out| {
            for &i in &order {
                let op = &task.operators()[i];
                if op.is_applicable(s) {
                    out.push((i, op.apply_unchecked(s)));
                }
            }
        },
        |s| goal.holds_in(s),
        |_| Some(0.0),
        1.0,
        budget,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplianceOptions {
    /// Generate only the consuming transition when an operator matches the
    /// next observation. The non-strict variant also keeps the skipping
    /// transition; both give the same optimal cost.
    pub strict_matching: bool,
    pub budget: SearchBudget,
}

impl Default for ComplianceOptions {
    fn default() -> Self {
        Self { strict_matching: true, budget: SearchBudget::default() }
    }
}

pub fn optimal_complying_cost(
    task: &Task,
    goal: &PartialState,
    omega: &ObservationSequence,
) -> Result<SearchResult, SearchError> {
    optimal_complying_cost_with(task, goal, omega, ComplianceOptions::default())
}

/// Optimal cost over plans reaching `goal` that contain `omega` as a
/// subsequence. Searches pairs (state, matched prefix length).
pub fn optimal_complying_cost_with(
    task: &Task,
    goal: &PartialState,
    omega: &ObservationSequence,
    opts: ComplianceOptions,
) -> Result<SearchResult, SearchError> {
    task.check_partial_state(goal)?;
    if !omega.unknown_labels(task).is_empty() {
        return Ok(SearchResult { cost: None, plan: None, expanded: 0, generated: 0 });
    }
    let expected: Vec<usize> = omega.labels().iter().map(|l| task.operator_index(l).expect("checked above")).collect();
    let m = expected.len();
    let order = label_order(task);
    let start = CompiledComplianceState { base: task.initial_state().clone(), matched: 0 };
    best_first(
        task,
        start,
        |n: &CompiledComplianceState, out| {
            for &i in &order {
                let op = &task.operators()[i];
                if !op.is_applicable(&n.base) {
                    continue;
                }
                let next = op.apply_unchecked(&n.base);
                let consumes = n.matched < m && expected[n.matched] == i;
                if consumes {
                    if !opts.strict_matching {
                        out.push((i, CompiledComplianceState { base: next.clone(), matched: n.matched }));
                    }
                    out.push((i, CompiledComplianceState { base: next, matched: n.matched + 1 }));
                } else {
                    out.push((i, CompiledComplianceState { base: next, matched: n.matched }));
                }
            }
        },
        |n| n.matched == m && goal.holds_in(&n.base),
        |_| Some(0.0),
        1.0,
        opts.budget,
    )
}

/// Weighted A* guided by the goal-landmark LP heuristic (rounded up).
/// The returned cost is at most `w` times optimal.
pub fn weighted_plan(task: &Task, goal: &PartialState, w: f64) -> Result<SearchResult, SearchError> {
    weighted_plan_with(task, goal, w, SearchBudget::default())
}

pub fn weighted_plan_with(
    task: &Task,
    goal: &PartialState,
    w: f64,
    budget: SearchBudget,
) -> Result<SearchResult, SearchError> {
    let heuristic = crate::heuristics::GoalLandmarkHeuristic::new(task, goal);
    weighted_plan_by(task, goal, w, budget, |s| heuristic.estimate(s))
}

/// Weighted A* with a caller-supplied heuristic; `h` returning `None`
/// prunes the state.
pub fn weighted_plan_by<H>(
    task: &Task,
    goal: &PartialState,
    w: f64,
    budget: SearchBudget,
    h: H,
) -> Result<SearchResult, SearchError>
where
    H: FnMut(&State) -> Option<f64>,
{
    if w.is_nan() || w < 1.0 || w.is_infinite() {
        return Err(SearchError::BadWeight(w));
    }
    task.check_partial_state(goal)?;
    let order = label_order(task);
    let result = best_first(
        task,
        task.initial_state().clone(),
        |s: &State, out| {
            for &i in &order {
                let op = &task.operators()[i];
                if op.is_applicable(s) {
                    out.push((i, op.apply_unchecked(s)));
                }
            }
        },
        |s| goal.holds_in(s),
        h,
        w,
        budget,
    )?;
    if result.is_solved() {
        Ok(result)
    } else {
        Err(SearchError::Unsolvable)
    }
}

/// A cost ratio `num/den`; `None` is infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostRatio(Option<(u64, u64)>);

impl CostRatio {
    /// `complying / optimal` with `0/0 = 1` and `x/0 = ∞` for `x > 0`.
    pub fn of(complying: Option<u64>, optimal: Option<u64>) -> Self {
        match (complying, optimal) {
            (Some(c), Some(o)) if o > 0 => Self(Some((c, o))),
            (Some(0), Some(0)) => Self(Some((1, 1))),
            _ => Self(None),
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_none()
    }

    pub fn as_f64(self) -> f64 {
        self.0.map_or(f64::INFINITY, |(n, d)| n as f64 / d as f64)
    }
}

impl PartialOrd for CostRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CostRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0, other.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some((a, b)), Some((c, d))) => (u128::from(a) * u128::from(d)).cmp(&(u128::from(c) * u128::from(b))),
        }
    }
}

/// Exact costs for one hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisCosts {
    pub optimal: Option<u64>,
    pub complying: Option<u64>,
    pub expanded: u64,
}

pub fn hypothesis_costs(
    task: &Task,
    goal: &PartialState,
    omega: &ObservationSequence,
    budget: SearchBudget,
) -> Result<HypothesisCosts, SearchError> {
    let opt = optimal_cost_with(task, goal, budget)?;
    let comp = optimal_complying_cost_with(task, goal, omega, ComplianceOptions { budget, ..Default::default() })?;
    Ok(HypothesisCosts { optimal: opt.cost, complying: comp.cost, expanded: opt.expanded + comp.expanded })
}

/// Hypotheses whose complying/optimal cost ratio does not exceed the
/// observed agent's `cost(π)/h*(g_R)`. `omega` must already have noisy
/// labels removed. Returns indices into `hyps`.
pub fn reference_solution_set(
    task: &Task,
    hyps: &[PartialState],
    omega: &ObservationSequence,
    reference_plan: &Plan,
    reference_goal: &PartialState,
) -> Result<BTreeSet<usize>, SearchError> {
    reference_solution_set_with(task, hyps, omega, reference_plan, reference_goal, SearchBudget::default())
}

pub fn reference_solution_set_with(
    task: &Task,
    hyps: &[PartialState],
    omega: &ObservationSequence,
    reference_plan: &Plan,
    reference_goal: &PartialState,
    budget: SearchBudget,
) -> Result<BTreeSet<usize>, SearchError> {
    let validation = task.validate_plan(reference_goal, reference_plan)?;
    let plan_cost =
        validation.cost.ok_or_else(|| SasError::Invalid("reference plan does not reach the reference goal".into()))?;
    let reference_opt = optimal_cost_with(task, reference_goal, budget)?.cost;
    let bound = CostRatio::of(Some(plan_cost), reference_opt);
    let costs = hyps.iter().map(|g| hypothesis_costs(task, g, omega, budget)).collect::<Result<Vec<_>, _>>()?;
    Ok(reference_set_from_costs(&costs, bound))
}

pub fn reference_set_from_costs(costs: &[HypothesisCosts], bound: CostRatio) -> BTreeSet<usize> {
    costs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.complying.is_some() && CostRatio::of(c.complying, c.optimal) <= bound)
        .map(|(i, _)| i)
        .collect()
}

/// Hypotheses minimizing `h*_Ω(g) − h*(g)` among those with a complying
/// plan.
pub fn exact_cost_diff_solution_set(
    task: &Task,
    hyps: &[PartialState],
    omega: &ObservationSequence,
) -> Result<BTreeSet<usize>, SearchError> {
    let costs = hyps
        .iter()
        .map(|g| hypothesis_costs(task, g, omega, SearchBudget::default()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(cost_diff_set_from_costs(&costs))
}

pub fn cost_diff_set_from_costs(costs: &[HypothesisCosts]) -> BTreeSet<usize> {
    let diffs: Vec<Option<u64>> = costs
        .iter()
        .map(|c| match (c.complying, c.optimal) {
            (Some(a), Some(b)) => Some(a - b),
            _ => None,
        })
        .collect();
    let Some(min) = diffs.iter().flatten().min().copied() else {
        return BTreeSet::new();
    };
    diffs.iter().enumerate().filter(|(_, d)| **d == Some(min)).map(|(i, _)| i).collect()
}
