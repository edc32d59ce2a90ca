use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use goalrec::bench::{run_benchmark, BenchError, BenchOptions};
use goalrec::dataset::{generate_dataset, load_domain_dir, write_domain_dir, DatasetOptions, Optimality};
use goalrec::domains::sample_tasks;
use goalrec::heuristics::{model_for, HeuristicError};
use goalrec::lp::mps::write_mps;
use goalrec::lp::{LpError, SolveMode, SolverOptions};
use goalrec::recognition::{parse_hypotheses, recognize, HeuristicKind, RecognitionError, RecognitionOptions};
use goalrec::sas::{parse_sas, parse_task_json, Plan, Task};
use goalrec::search::{
    cost_diff_set_from_costs, hypothesis_costs, reference_set_from_costs, CostRatio, SearchBudget, SearchError,
};
use goalrec::{NoiseSpec, ObservationSequence};

const SCHEMA_VERSION: u32 = 1;

/// Goal recognition with operator-counting heuristics.
#[derive(Parser)]
#[command(name = "goalrec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank goal hypotheses against an observation sequence.
    Recognize(RecognizeArgs),
    /// Generate a recognition dataset from a domain directory.
    Generate(GenerateArgs),
    /// Run the recognizer over a dataset and write a per-level report.
    Bench(BenchArgs),
    /// Exact costs and solution sets by state-space search.
    Oracle(OracleArgs),
    /// Write the built-in grid and blocks tasks as a domain directory.
    SampleDomains {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Heuristic {
    Base,
    Improved,
}

impl From<Heuristic> for HeuristicKind {
    fn from(h: Heuristic) -> Self {
        match h {
            Heuristic::Base => HeuristicKind::Base,
            Heuristic::Improved => HeuristicKind::Improved,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Lp,
    Ip,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "lp")]
    mode: Mode,
    /// Solve in exact rational arithmetic.
    #[arg(long)]
    exact: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        let mode = match self.mode {
            Mode::Lp => SolveMode::Lp,
            Mode::Ip => SolveMode::Ip,
        };
        let o = SolverOptions::new(mode);
        if self.exact {
            o.exact()
        } else {
            o
        }
    }
}

#[derive(Args)]
struct RecognizeArgs {
    /// Task in SAS (`.sas`) or JSON (`.json`) form.
    #[arg(long)]
    task: PathBuf,
    #[arg(long)]
    hyps: PathBuf,
    #[arg(long)]
    obs: PathBuf,
    /// Fraction of observations that may be noise.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, value_enum, default_value = "improved")]
    heuristic: Heuristic,
    #[command(flatten)]
    solver: SolverArgs,
    /// Result JSON; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write each hypothesis model as `<dir>/goal<k>.mps`.
    #[arg(long)]
    dump_mps: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    domain_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Generate plans with weighted A* (w = 2) instead of optimally.
    #[arg(long)]
    suboptimal: bool,
    /// Also write `obs_noisy.txt` with ⌈0.2·|Ω|⌉ inserted labels.
    #[arg(long)]
    noise: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Observability levels in percent.
    #[arg(long, value_delimiter = ',', default_value = "10,30,50,70,100")]
    levels: Vec<u32>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 1_000_000)]
    max_expansions: u64,
    #[arg(long, default_value_t = 60)]
    max_seconds: u64,
}

impl BudgetArgs {
    fn budget(&self) -> SearchBudget {
        SearchBudget { max_expansions: self.max_expansions, max_time: Duration::from_secs(self.max_seconds) }
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum, default_value = "improved")]
    heuristic: Heuristic,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Recognize from `obs_noisy.txt`.
    #[arg(long)]
    noisy: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV report.
    #[arg(long)]
    out: PathBuf,
    /// Full JSON report including timings.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    task: PathBuf,
    #[arg(long)]
    hyps: PathBuf,
    #[arg(long)]
    obs: PathBuf,
    /// Observed agent's plan; with `--real-goal` enables the reference set.
    #[arg(long, requires = "real_goal")]
    plan: Option<PathBuf>,
    /// Index of the real goal in the hypothesis file.
    #[arg(long, requires = "plan")]
    real_goal: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
}

/// Exit status classes.
enum Failure {
    Input(anyhow::Error),
    Resource(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Resource(_) => 3,
            Failure::Internal(_) => 1,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Resource(e) | Failure::Internal(e) => e,
        }
    }
}

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn from_lp(e: LpError) -> Failure {
    match e {
        LpError::IterationLimit => Failure::Resource(e.into()),
        e => Failure::Internal(e.into()),
    }
}

fn from_recognition(e: RecognitionError) -> Failure {
    match e {
        RecognitionError::Heuristic(HeuristicError::Lp(e)) => from_lp(e),
        e => input(e),
    }
}

fn from_search(e: SearchError) -> Failure {
    match e {
        SearchError::ResourceLimit { .. } => Failure::Resource(e.into()),
        e => input(e),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(input)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display())).map_err(input)?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(input)
}

fn load_task(path: &Path) -> Result<Task, Failure> {
    let text = read(path)?;
    let task = if path.extension().is_some_and(|e| e == "json") { parse_task_json(&text) } else { parse_sas(&text) };
    task.with_context(|| format!("parsing {}", path.display())).map_err(input)
}

fn load_observations(task: &Task, path: &Path) -> Result<ObservationSequence, Failure> {
    let obs = ObservationSequence::parse(&read(path)?);
    if let Some(l) = obs.unknown_labels(task).first() {
        return Err(input(anyhow!("{}: `{l}` is not an operator of the task", path.display())));
    }
    Ok(obs)
}

fn number(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |v| json!(v))
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn cmd_recognize(a: &RecognizeArgs) -> Result<(), Failure> {
    let task = load_task(&a.task)?;
    let hyps = parse_hypotheses(&task, &read(&a.hyps)?)
        .with_context(|| format!("parsing {}", a.hyps.display()))
        .map_err(input)?;
    let obs = load_observations(&task, &a.obs)?;
    let eps = NoiseSpec::new(a.eps).map_err(input)?;
    let opts = RecognitionOptions { heuristic: a.heuristic.into(), eps, solver: a.solver.options() };
    if let Some(dir) = &a.dump_mps {
        for (k, g) in hyps.iter().enumerate() {
            let m = model_for(&task, g, task.initial_state(), &obs, eps, opts.heuristic.model_kind())
                .map_err(|e| from_recognition(e.into()))?;
            let ip = opts.solver.mode == SolveMode::Ip;
            write(&dir.join(format!("goal{k}.mps")), &write_mps(&m, &format!("GOAL{k}"), ip))?;
        }
    }
    let r = recognize(&task, &hyps, &obs, &opts).map_err(from_recognition)?;
    let goals: Vec<Value> = r
        .per_goal
        .iter()
        .zip(&hyps)
        .enumerate()
        .map(|(k, (e, g))| {
            json!({
                "id": k,
                "goal": task.format_partial_state(g),
                "h_omega": number(e.h_omega),
                "h": number(e.h),
                "delta": number(e.delta),
                "rows": e.rows,
                "lp_time_ms": millis(e.lp_time),
            })
        })
        .collect();
    let out = json!({
        "version": SCHEMA_VERSION,
        "heuristic": opts.heuristic.to_string(),
        "mode": opts.solver.mode.to_string(),
        "epsilon": a.eps,
        "observations": obs.len(),
        "goals": goals,
        "delta_min": r.delta_min,
        "solution": r.solution,
        "total_time_ms": millis(r.total_time),
    });
    let text = serde_json::to_string_pretty(&out).expect("json") + "\n";
    match &a.out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(a: &GenerateArgs) -> Result<(), Failure> {
    let tasks = load_domain_dir(&a.domain_dir).map_err(input)?;
    let opts = DatasetOptions {
        optimality: if a.suboptimal { Optimality::Suboptimal } else { Optimality::Optimal },
        noise: a.noise,
        seed: a.seed,
        levels: a.levels.clone(),
        budget: a.budget.budget(),
        ..Default::default()
    };
    if opts.levels.iter().any(|&l| l == 0 || l > 100) {
        return Err(input(anyhow!("observability levels must be in 1..=100")));
    }
    let m = generate_dataset(&tasks, &a.out, &opts).map_err(input)?;
    eprintln!("{} instances written, {} skipped (see manifest.json)", m.instances.len(), m.skipped.len());
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<(), Failure> {
    let opts = BenchOptions {
        heuristic: a.heuristic.into(),
        eps: NoiseSpec::new(a.eps).map_err(input)?,
        solver: a.solver.options(),
        noisy: a.noisy,
        threads: a.threads,
    };
    let report = run_benchmark(&a.dataset, &opts).map_err(|e| match e {
        BenchError::Recognition { path, source } => match from_recognition(source) {
            Failure::Input(e) => Failure::Input(e.context(path)),
            Failure::Resource(e) => Failure::Resource(e.context(path)),
            Failure::Internal(e) => Failure::Internal(e.context(path)),
        },
        e => input(e),
    })?;
    write(&a.out, &report.to_csv())?;
    if let Some(p) = &a.json {
        write(p, &report.to_json())?;
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs) -> Result<(), Failure> {
    let task = load_task(&a.task)?;
    let hyps = parse_hypotheses(&task, &read(&a.hyps)?)
        .with_context(|| format!("parsing {}", a.hyps.display()))
        .map_err(input)?;
    let obs = load_observations(&task, &a.obs)?;
    let budget = a.budget.budget();
    let costs = hyps
        .iter()
        .map(|g| hypothesis_costs(&task, g, &obs, budget))
        .collect::<Result<Vec<_>, _>>()
        .map_err(from_search)?;
    let goals: Vec<Value> = costs
        .iter()
        .zip(&hyps)
        .enumerate()
        .map(|(k, (c, g))| {
            json!({
                "id": k,
                "goal": task.format_partial_state(g),
                "optimal": c.optimal,
                "complying": c.complying,
                "ratio": number(Some(CostRatio::of(c.complying, c.optimal).as_f64()).filter(|v| v.is_finite())),
                "expanded": c.expanded,
            })
        })
        .collect();
    let mut out = json!({
        "version": SCHEMA_VERSION,
        "goals": goals,
        "cost_diff_solution": cost_diff_set_from_costs(&costs),
    });
    if let (Some(plan_path), Some(real)) = (&a.plan, a.real_goal) {
        let plan = Plan::new(ObservationSequence::parse(&read(plan_path)?).labels());
        let goal = hyps.get(real).ok_or_else(|| input(anyhow!("--real-goal {real} is out of range")))?;
        let cost = task
            .validate_plan(goal, &plan)
            .map_err(input)?
            .cost
            .ok_or_else(|| input(anyhow!("{} does not reach the real goal", plan_path.display())))?;
        let bound = CostRatio::of(Some(cost), costs[real].optimal);
        out["reference_solution"] = json!(reference_set_from_costs(&costs, bound));
    }
    print!("{}", serde_json::to_string_pretty(&out).expect("json") + "\n");
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Recognize(a) => cmd_recognize(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::SampleDomains { out } => write_domain_dir(&out, &sample_tasks()).map_err(input),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
