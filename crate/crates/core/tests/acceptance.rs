//! Acceptance checks. Prints one PASS/FAIL line per criterion. Correctness
//! criteria gate the exit status; the benchmark trend (7) is an empirical
//! observation about the mini-benchmark and is reported without gating.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use common::*;
use goalrec::bench::{run_benchmark, BenchOptions};
use goalrec::dataset::{generate_dataset, DatasetOptions};
use goalrec::domains::{random_task, reachable_states, sample_tasks, RandomTaskParams};
use goalrec::landmarks::{extract_landmarks, observation_landmarks, verify_landmark, Origin};
use goalrec::lp::{SolveMode, SolverOptions, TOLERANCE};
use goalrec::observations::{inject_noise, inject_noise_count, max_ignorable, sample_observations};
use goalrec::recognition::solution_set_from_values;
use goalrec::sas::{State, Task};
use goalrec::search::{optimal_complying_cost, optimal_cost, reference_solution_set};
use goalrec::RecognitionOptions;
use goalrec::{
    h_base, h_goal, h_improved, recognize, HeuristicKind, NoiseSpec, ObservationSequence, PartialState, Plan,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TREND: u32 = 7;
const LEVELS: [u32; 5] = [10, 30, 50, 70, 100];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

struct Case {
    name: String,
    task: Task,
    hyps: Vec<PartialState>,
    plan: Plan,
}

fn suite() -> Vec<Case> {
    let mut out = Vec::new();
    for st in sample_tasks() {
        for (k, g) in st.hyps.iter().enumerate() {
            let plan = optimal_cost(&st.task, g).unwrap().plan.unwrap();
            out.push(Case { name: format!("{}/goal{k}", st.name), task: st.task.clone(), hyps: st.hyps.clone(), plan });
        }
    }
    let (t, hyps) = running_example();
    for (k, g) in hyps.iter().enumerate() {
        let plan = optimal_cost(&t, g).unwrap().plan.unwrap();
        out.push(Case { name: format!("running/goal{k}"), task: t.clone(), hyps: hyps.clone(), plan });
    }
    let (t, g) = landmark_example();
    let plan = optimal_cost(&t, &g).unwrap().plan.unwrap();
    out.push(Case { name: "landmark-example".into(), task: t, hyps: vec![g], plan });
    for seed in 0..30 {
        let r = random_instance(1000 + seed, &RandomTaskParams::default(), 10_000);
        out.push(Case { name: format!("random{seed}"), task: r.task, hyps: r.hyps, plan: r.plan });
    }
    out
}

/// `h ≤ oracle` where `None` is infinity on both sides.
fn below(h: Option<f64>, oracle: Option<u64>) -> bool {
    match (h, oracle) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(h), Some(c)) => h <= c as f64 + TOLERANCE,
    }
}

fn at_least(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => a >= b - TOLERANCE,
    }
}

#[derive(Default)]
struct BoundStats {
    checks: usize,
    c1: Vec<String>,
    c2: Vec<String>,
    /// Violations on sequences with more noise than `⌊|Ω|ε⌋`, where the
    /// bound is not claimed.
    c2_outside: usize,
    c2_checks: usize,
    c2_premise_fails: usize,
    c3: Vec<String>,
}

fn bounds() -> BoundStats {
    let mut st = BoundStats::default();
    let solvers = [SolverOptions::new(SolveMode::Lp), SolverOptions::new(SolveMode::Ip)];
    let eps = NoiseSpec::new(0.2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in suite() {
        let t = &case.task;
        let s0 = t.initial_state();
        for level in LEVELS {
            let omega = sample_observations(&case.plan, f64::from(level) / 100.0, &mut rng).unwrap();
            // The benchmark rule first; when it exceeds ⌊|Ω|ε⌋ also the largest
            // noise count that stays within it.
            let mut noisy: Vec<(ObservationSequence, bool)> = Vec::new();
            if let Ok(n) = inject_noise(&omega, t, &case.plan, &mut rng) {
                let premise = n.len() - omega.len() <= max_ignorable(&n, eps);
                if !premise {
                    st.c2_premise_fails += 1;
                    let k = (1..=omega.len())
                        .rev()
                        .find(|&k| k <= ((omega.len() + k) as f64 * 0.2 + 1e-9).floor() as usize);
                    if let Some(k) = k {
                        noisy.push((inject_noise_count(&omega, t, &case.plan, k, &mut rng).unwrap(), true));
                    }
                }
                noisy.push((n, premise));
            }
            for (k, g) in case.hyps.iter().enumerate() {
                let tag = format!("{} obs{level} hyp{k}", case.name);
                let oracle = optimal_complying_cost(t, g, &omega).unwrap().cost;
                let h = h_goal(t, g, s0, &solvers[0]).unwrap().value;
                for solver in &solvers {
                    st.checks += 1;
                    let hb = h_base(t, g, s0, &omega, NoiseSpec::NONE, solver).unwrap().value;
                    let hi = h_improved(t, g, s0, &omega, NoiseSpec::NONE, solver).unwrap().value;
                    if !below(hb, oracle) || !below(hi, oracle) {
                        st.c1.push(format!("{tag} {}: base {hb:?} improved {hi:?} oracle {oracle:?}", solver.mode));
                    }
                    if !at_least(hi, hb) {
                        st.c3.push(format!("{tag} {}: improved {hi:?} < base {hb:?}", solver.mode));
                    }
                    if solver.mode == SolveMode::Lp && !(at_least(hb, h) && at_least(hi, hb)) {
                        st.c3.push(format!("{tag}: chain {h:?} {hb:?} {hi:?}"));
                    }
                    for (noisy, premise) in &noisy {
                        let clean = noisy.denoised(&case.plan);
                        let oracle = optimal_complying_cost(t, g, &clean).unwrap().cost;
                        let hb = h_base(t, g, s0, noisy, eps, solver).unwrap().value;
                        let hi = h_improved(t, g, s0, noisy, eps, solver).unwrap().value;
                        let violated = !below(hb, oracle) || !below(hi, oracle);
                        if !premise {
                            st.c2_outside += usize::from(violated);
                        } else {
                            st.c2_checks += 1;
                            if violated {
                                st.c2.push(format!(
                                    "{tag} {} |Ω|={} noise={}: base {hb:?} improved {hi:?} oracle {oracle:?}",
                                    solver.mode,
                                    noisy.len(),
                                    noisy.len() - clean.len()
                                ));
                            }
                        }
                        if !at_least(hi, hb) {
                            st.c3.push(format!("{tag} {} noisy: improved {hi:?} < base {hb:?}", solver.mode));
                        }
                    }
                }
            }
        }
    }
    st
}

fn summarize(bad: &[String], checks: usize) -> Outcome {
    let mut detail = format!("{} violations in {checks} checks", bad.len());
    if let Some(first) = bad.first() {
        detail += &format!("; first: {first}");
    }
    outcome(bad.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();
    let (dmin, set) = solution_set_from_values(&[Some(13.0), Some(11.0)], &[Some(3.0), Some(3.0)], 0.0).unwrap();
    if dmin != 8.0 || set != [1].into() {
        failures.push(format!("(a) δ_min {dmin} Γ {set:?}"));
    }
    let (t, hyps) = running_example();
    let noisy = ObservationSequence::new(RUNNING_NOISY_OMEGA);
    let eps = NoiseSpec::new(0.2).unwrap();
    for heuristic in [HeuristicKind::Base, HeuristicKind::Improved] {
        let solver = SolverOptions::new(SolveMode::Ip).exact();
        let r = recognize(&t, &hyps, &noisy, &RecognitionOptions { heuristic, eps, solver }).unwrap();
        let h_omega: Vec<_> = r.per_goal.iter().map(|e| e.h_omega).collect();
        let h: Vec<_> = r.per_goal.iter().map(|e| e.h).collect();
        if h_omega != [Some(7.0), Some(9.0)]
            || h != [Some(3.0), Some(3.0)]
            || r.delta_min != 4.0
            || r.solution != [0].into()
        {
            failures.push(format!("(b) {heuristic}: h_Ω {h_omega:?} h {h:?} δ_min {} Γ {:?}", r.delta_min, r.solution));
        }
    }
    let clean = ObservationSequence::new(RUNNING_OMEGA);
    let reference = reference_solution_set(&t, &hyps, &clean, &Plan::new(RUNNING_OMEGA), &hyps[0]).unwrap();
    if reference != [0].into() {
        failures.push(format!("(c) Γ* {reference:?}"));
    }
    let (t, g) = landmark_example();
    let v = h_improved(
        &t,
        &g,
        t.initial_state(),
        &ObservationSequence::new(["o1", "o5"]),
        NoiseSpec::new(0.5).unwrap(),
        &SolverOptions::new(SolveMode::Ip).exact(),
    )
    .unwrap();
    if v.exact.as_ref().map(ToString::to_string).as_deref() != Some("3") {
        failures.push(format!("(d) IP value {:?}", v.value));
    }
    let detail = if failures.is_empty() { "(a)-(d) match".to_string() } else { failures.join("; ") };
    outcome(failures.is_empty(), detail)
}

/// Cheapest plan of cost at most `limit` reaching `goal` with `omega` as a
/// subsequence, by exhaustive depth-first enumeration. A table of the
/// cheapest cost seen per (state, matched prefix) cuts repeated subtrees.
fn brute_force(task: &Task, goal: &PartialState, omega: &[usize], limit: u64) -> Option<u64> {
    #[allow(clippy::too_many_arguments)]
    fn go(
        task: &Task,
        goal: &PartialState,
        omega: &[usize],
        s: &State,
        matched: usize,
        cost: u64,
        limit: u64,
        seen: &mut HashMap<(State, usize), u64>,
        best: &mut Option<u64>,
    ) {
        if let Some(&c) = seen.get(&(s.clone(), matched)) {
            if c <= cost {
                return;
            }
        }
        seen.insert((s.clone(), matched), cost);
        if matched == omega.len() && goal.holds_in(s) {
            *best = Some(best.map_or(cost, |b| b.min(cost)));
        }
        for (i, op) in task.operators().iter().enumerate() {
            let c = cost + u64::from(op.cost);
            if c > limit || !op.is_applicable(s) {
                continue;
            }
            let next = op.apply(s).unwrap();
            let m = if matched < omega.len() && omega[matched] == i { matched + 1 } else { matched };
            go(task, goal, omega, &next, m, c, limit, seen, best);
        }
    }
    let mut best = None;
    go(task, goal, omega, task.initial_state(), 0, 0, limit, &mut HashMap::new(), &mut best);
    best
}

fn criterion_5() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..20 {
        let inst = random_instance(2000 + seed, &RandomTaskParams::default(), 500);
        let t = &inst.task;
        let mut sequences =
            vec![sample_observations(&inst.plan, 0.5, &mut rng).unwrap(), ObservationSequence::default()];
        // an arbitrary sequence, often not embeddable in any short plan
        let labels: Vec<String> = (0..rng.gen_range(1..=3))
            .map(|_| t.operators()[rng.gen_range(0..t.operators().len())].label.clone())
            .collect();
        sequences.push(ObservationSequence::new(labels));
        for omega in &sequences {
            let idx: Vec<usize> = omega.labels().iter().map(|l| t.operator_index(l).unwrap()).collect();
            for g in &inst.hyps {
                checks += 1;
                let oracle = optimal_complying_cost(t, g, omega).unwrap().cost.filter(|&c| c <= 8);
                let brute = brute_force(t, g, &idx, 8);
                if oracle != brute {
                    bad.push(format!("seed {seed} Ω {:?}: oracle {oracle:?} brute force {brute:?}", omega.labels()));
                }
            }
        }
    }
    summarize(&bad, checks)
}

fn criterion_6() -> Outcome {
    let mut tasks: Vec<(String, Task, Vec<PartialState>, Vec<ObservationSequence>)> = Vec::new();
    let everything = |t: &Task| ObservationSequence::new(t.operators().iter().map(|o| o.label.clone()));
    for st in sample_tasks() {
        let all = everything(&st.task);
        tasks.push((st.name, st.task, st.hyps, vec![all]));
    }
    let (t, hyps) = running_example();
    tasks.push(("running".into(), t.clone(), hyps, vec![everything(&t)]));
    let (t, g) = landmark_example();
    tasks.push(("landmark-example".into(), t.clone(), vec![g], vec![everything(&t)]));
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..100u64 {
        let t = random_task(&mut rng, &RandomTaskParams::default());
        let reachable: Vec<State> = reachable_states(&t).into_iter().collect();
        let hyps = (0..3).map(|_| goalrec::domains::random_reachable_goal(&mut rng, &reachable, 3)).collect();
        let all = everything(&t);
        tasks.push((format!("random{seed}"), t, hyps, vec![all]));
    }
    let (mut checked, mut bad) = (0usize, Vec::new());
    for (name, t, hyps, seqs) in &tasks {
        let s0 = t.initial_state();
        for g in hyps {
            for lm in extract_landmarks(t, g, s0).landmarks() {
                checked += 1;
                if !verify_landmark(t, g, s0, lm) {
                    bad.push(format!("{name}: goal landmark {:?}", lm.labels(t)));
                }
            }
        }
        for omega in seqs {
            for lm in observation_landmarks(t, omega, s0).unwrap().landmarks() {
                let Origin::ObservationDerived { label, .. } = &lm.origin else { unreachable!() };
                checked += 1;
                if !verify_landmark(t, &t.operator(label).unwrap().pre, s0, lm) {
                    bad.push(format!("{name}: landmark {:?} for `{label}`", lm.labels(t)));
                }
            }
        }
    }
    summarize(&bad, checked)
}

fn bench_opts(heuristic: HeuristicKind, noisy: bool) -> BenchOptions {
    let eps = if noisy { NoiseSpec::new(0.2).unwrap() } else { NoiseSpec::NONE };
    BenchOptions { heuristic, eps, noisy, ..Default::default() }
}

fn criterion_7(dir: &std::path::Path) -> Outcome {
    let opts = DatasetOptions { noise: true, seed: 1, ..Default::default() };
    generate_dataset(&sample_tasks(), dir, &opts).unwrap();
    let base = run_benchmark(dir, &bench_opts(HeuristicKind::Base, true)).unwrap().mean_agr();
    let improved = run_benchmark(dir, &bench_opts(HeuristicKind::Improved, true)).unwrap().mean_agr();
    let mut detail = format!("noisy mean Agr base {base:.4} improved {improved:.4}");
    let mut pass = improved >= base - 1e-12;
    for heuristic in [HeuristicKind::Base, HeuristicKind::Improved] {
        let by_level: BTreeMap<u32, f64> = run_benchmark(dir, &bench_opts(heuristic, false)).unwrap().agr_by_level();
        let from30: Vec<(u32, f64)> = by_level.into_iter().filter(|(l, _)| *l >= 30).collect();
        let monotone = from30.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12);
        pass &= monotone;
        let levels: Vec<String> = from30.iter().map(|(l, a)| format!("{l}:{a:.3}")).collect();
        detail += &format!("; clean {heuristic} {}", levels.join(" "));
    }
    outcome(pass, detail)
}

fn criterion_8(dir: &std::path::Path) -> Outcome {
    let run = |threads| {
        let opts = BenchOptions { threads: Some(threads), ..bench_opts(HeuristicKind::Improved, true) };
        run_benchmark(dir, &opts).unwrap().to_csv()
    };
    let (a, b, c) = (run(1), run(1), run(4));
    outcome(
        a == b && a == c,
        format!("{} CSV bytes, identical across runs and thread counts: {}", a.len(), a == b && a == c),
    )
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    let st = bounds();
    results.push((1, summarize(&st.c1, st.checks)));
    let mut c2 = summarize(&st.c2, st.c2_checks);
    c2.detail += &format!(
        "; {} noisy sequences exceed ⌊|Ω|ε⌋ and are outside the bound ({} violations there)",
        st.c2_premise_fails, st.c2_outside
    );
    results.push((2, c2));
    results.push((3, summarize(&st.c3, st.checks)));
    results.push((4, criterion_4()));
    results.push((5, criterion_5()));
    results.push((6, criterion_6()));
    let dir = tempfile::tempdir().unwrap();
    results.push((7, criterion_7(dir.path())));
    results.push((8, criterion_8(dir.path())));
    results.sort_by_key(|(n, _)| *n);
    let (mut failed, mut gating) = (0, 0);
    for (n, o) in &results {
        let note = if *n == TREND { " (not gating)" } else { "" };
        println!("criterion {n}: {}{note} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
        gating += usize::from(!o.pass && *n != TREND);
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if gating > 0 {
        std::process::exit(1);
    }
}
