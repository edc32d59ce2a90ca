#![allow(dead_code)]

use goalrec::domains::{random_reachable_goal, random_task, reachable_states, RandomTaskParams};
use goalrec::sas::{Atom, Operator, PartialState, State, Task, Variable};
use goalrec::search::optimal_cost;
use goalrec::Plan;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One move of a single-agent graph task: `from -> to`, optionally
/// requiring and/or setting `door=open`.
pub struct Edge<'a> {
    pub label: &'a str,
    pub from: &'a str,
    pub to: &'a str,
    pub needs_door: bool,
    pub opens_door: bool,
}

const fn e<'a>(label: &'a str, from: &'a str, to: &'a str) -> Edge<'a> {
    Edge { label, from, to, needs_door: false, opens_door: false }
}

/// A task over `pos` (values `cells`) and `door` (closed/open), starting at
/// `cells[0]` with the door closed.
pub fn graph_task(cells: &[&str], edges: &[Edge]) -> Task {
    let pos = Variable::new("pos", cells.iter().map(|c| c.to_string()).collect());
    let door = Variable::new("door", vec!["closed".into(), "open".into()]);
    let cell = |c: &str| cells.iter().position(|x| *x == c).unwrap_or_else(|| panic!("unknown cell {c}"));
    let ops = edges
        .iter()
        .map(|ed| {
            let mut pre = vec![Atom::new(0, cell(ed.from))];
            if ed.needs_door {
                pre.push(Atom::new(1, 1));
            }
            let mut eff = vec![Atom::new(0, cell(ed.to))];
            if ed.opens_door {
                eff.push(Atom::new(1, 1));
            }
            Operator::new(ed.label, PartialState::new(pre).unwrap(), PartialState::new(eff).unwrap())
        })
        .collect();
    Task::new(vec![pos, door], ops, State(vec![0, 0]), None).unwrap()
}

pub fn at(task: &Task, cell: &str) -> PartialState {
    PartialState::new(vec![task.atom_by_name("pos", cell).unwrap()]).unwrap()
}

/// The two-goal running example. Both goals cost 3 from A; the observed
/// detour o4..o10 loops A-D-E-F-A before heading to G1, opening the door
/// on the way, which makes G2 reachable through G1 at cost 9. o11 is a
/// sensor error (a move from E to a dead end).
pub fn running_example() -> (Task, Vec<PartialState>) {
    let cells = ["A", "B", "C", "G1", "D", "E", "F", "X1", "Y", "G2", "Z"];
    let edges = [
        e("o1", "A", "B"),
        e("o2", "B", "C"),
        e("o3", "C", "G1"),
        e("o4", "A", "D"),
        Edge { opens_door: true, ..e("o5", "D", "E") },
        e("o6", "E", "F"),
        e("o7", "F", "A"),
        e("o8", "A", "B"),
        e("o9", "B", "C"),
        e("o10", "C", "G1"),
        e("o11", "E", "Z"),
        Edge { needs_door: true, ..e("u", "G1", "X1") },
        Edge { opens_door: true, ..e("oa", "A", "Y") },
        Edge { needs_door: true, ..e("v", "Y", "X1") },
        e("w", "X1", "G2"),
    ];
    let t = graph_task(&cells, &edges);
    let hyps = vec![at(&t, "G1"), at(&t, "G2")];
    (t, hyps)
}

pub const RUNNING_OMEGA: [&str; 7] = ["o4", "o5", "o6", "o7", "o8", "o9", "o10"];
pub const RUNNING_NOISY_OMEGA: [&str; 8] = ["o4", "o5", "o11", "o6", "o7", "o8", "o9", "o10"];

/// Observation landmarks in the improved-heuristic example: `o1` needs
/// `s1`, first achieved by any of o2, o3, o4; `o5` needs `s2`, first
/// achieved by o6 or o7. Both observations lie on cheap routes to `g`.
pub fn landmark_example() -> (Task, PartialState) {
    let cells = ["s0", "s1", "X", "g", "v", "p1", "s2", "p2", "q1", "q2", "q3", "q4"];
    let edges = [
        e("o2", "s0", "s1"),
        e("o4", "s0", "s1"),
        e("a", "s0", "v"),
        e("o3", "v", "s1"),
        e("o1", "s1", "X"),
        e("b", "X", "g"),
        e("c", "s0", "p1"),
        e("o6", "p1", "s2"),
        e("d", "p1", "p2"),
        e("o7", "p2", "s2"),
        e("o5", "s2", "q1"),
        e("e1", "q1", "q2"),
        e("e2", "q2", "q3"),
        e("e3", "q3", "q4"),
        e("e4", "q4", "g"),
    ];
    let t = graph_task(&cells, &edges);
    let g = at(&t, "g");
    (t, g)
}

/// A random task with a handful of hypotheses; the first is the real goal
/// and comes with an optimal plan of length at least one.
pub struct RandomInstance {
    pub task: Task,
    pub hyps: Vec<PartialState>,
    pub plan: Plan,
}

pub fn random_instance(seed: u64, params: &RandomTaskParams, max_states: usize) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let task = random_task(&mut rng, params);
        let reachable: Vec<State> = reachable_states(&task).into_iter().collect();
        if reachable.len() < 3 || reachable.len() > max_states {
            continue;
        }
        let real = random_reachable_goal(&mut rng, &reachable, 2);
        if real.holds_in(task.initial_state()) {
            continue;
        }
        let plan = optimal_cost(&task, &real).unwrap().plan.unwrap();
        let mut hyps = vec![real];
        let extra = rng.gen_range(1..=3);
        for _ in 0..extra {
            // hypotheses need not be reachable
            if rng.gen_bool(0.8) {
                hyps.push(random_reachable_goal(&mut rng, &reachable, 2));
            } else {
                let v = rng.gen_range(0..task.variables().len());
                let d = task.variables()[v].domain_size();
                hyps.push(PartialState::new(vec![Atom::new(v, rng.gen_range(0..d))]).unwrap());
            }
        }
        return RandomInstance { task, hyps, plan };
    }
}
