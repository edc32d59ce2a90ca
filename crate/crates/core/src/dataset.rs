//! Recognition benchmark generation and loading.
//!
//! A *domain directory* holds `<domain>/<task>.sas` files, each with a
//! sibling `<task>.hyps` listing the candidate goals. Every hypothesis in
//! turn acts as the real goal: a plan for it is computed (optimally, or by
//! weighted A* with weight 2), and observation sequences are sampled from
//! the plan at each observability level.
//!
//! Output layout, one directory per recognition instance:
//!
//! ```text
//! OUT/manifest.json
//! OUT/<domain>/<task>/goal<k>/obs<level>-<n>/
//!     task.sas  hyps.txt  real_goal.txt  plan.txt
//!     obs.txt   obs_noisy.txt (with noise)  solution.txt
//! ```
//!
//! `solution.txt` lists the reference solution set (same syntax as
//! `hyps.txt`), computed from the noise-free observations.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domains::SampleTask;
use crate::observations::{inject_noise, sample_observations, ObservationSequence};
use crate::recognition::{format_hypotheses, parse_hypotheses};
use crate::sas::{parse_sas, to_sas, PartialState, Plan, SasError, Task};
use crate::search::{
    optimal_complying_cost_with, optimal_cost_with, reference_set_from_costs, weighted_plan_with, ComplianceOptions,
    CostRatio, HypothesisCosts, SearchBudget, SearchError,
};

pub const MANIFEST_VERSION: u32 = 1;
pub const DEFAULT_LEVELS: [u32; 5] = [10, 30, 50, 70, 100];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |e| DatasetError::Io { path: path.to_path_buf(), msg: e.to_string() }
}

fn format_err(path: &Path, msg: impl ToString) -> DatasetError {
    DatasetError::Format { path: path.to_path_buf(), msg: msg.to_string() }
}

fn read(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, text: &str) -> Result<(), DatasetError> {
    fs::write(path, text).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimality {
    Optimal,
    /// Weighted A* with weight 2.
    Suboptimal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetOptions {
    pub optimality: Optimality,
    pub noise: bool,
    pub seed: u64,
    pub levels: Vec<u32>,
    /// Sequences per level below 100%; full observability gets one.
    pub sequences_per_level: usize,
    pub budget: SearchBudget,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            optimality: Optimality::Optimal,
            noise: false,
            seed: 0,
            levels: DEFAULT_LEVELS.to_vec(),
            sequences_per_level: 3,
            budget: SearchBudget::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceInfo {
    pub path: String,
    pub domain: String,
    pub task: String,
    pub goal: usize,
    pub observability: u32,
    pub plan_cost: u64,
    pub observations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub seed: u64,
    pub optimality: Optimality,
    pub noise: bool,
    pub levels: Vec<u32>,
    pub instances: Vec<InstanceInfo>,
    pub skipped: Vec<Skipped>,
}

/// Writes tasks (without goals) and their hypotheses as a domain directory.
pub fn write_domain_dir(dir: &Path, tasks: &[SampleTask]) -> Result<(), DatasetError> {
    for t in tasks {
        let d = dir.join(&t.domain);
        fs::create_dir_all(&d).map_err(io_err(&d))?;
        write(&d.join(format!("{}.sas", t.name)), &to_sas(&t.task.clone().without_goal()))?;
        write(&d.join(format!("{}.hyps", t.name)), &format_hypotheses(&t.task, &t.hyps))?;
    }
    Ok(())
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>, DatasetError> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io_err(dir))?;
    out.sort();
    Ok(out)
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn load_domain_dir(dir: &Path) -> Result<Vec<SampleTask>, DatasetError> {
    let mut out = Vec::new();
    for d in sorted_entries(dir)?.into_iter().filter(|p| p.is_dir()) {
        for f in sorted_entries(&d)? {
            if f.extension().and_then(|e| e.to_str()) != Some("sas") {
                continue;
            }
            let task = parse_sas(&read(&f)?).map_err(|e| format_err(&f, e))?.without_goal();
            let hyps_path = f.with_extension("hyps");
            let hyps = parse_hypotheses(&task, &read(&hyps_path)?).map_err(|e| format_err(&hyps_path, e))?;
            if hyps.is_empty() {
                return Err(format_err(&hyps_path, "no hypotheses"));
            }
            out.push(SampleTask { domain: file_name(&d), name: file_stem(&f), task, hyps });
        }
    }
    if out.is_empty() {
        return Err(format_err(dir, "no <domain>/<task>.sas files found"));
    }
    Ok(out)
}

fn instance_seed(seed: u64, ordinal: u64) -> u64 {
    seed ^ ordinal.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn reference_plan(task: &Task, goal: &PartialState, opts: &DatasetOptions) -> Result<(Plan, u64), String> {
    let result = match opts.optimality {
        Optimality::Optimal => optimal_cost_with(task, goal, opts.budget),
        Optimality::Suboptimal => weighted_plan_with(task, goal, 2.0, opts.budget),
    }
    .map_err(|e| e.to_string())?;
    match (result.plan, result.cost) {
        (Some(plan), Some(cost)) if !plan.is_empty() => Ok((plan, cost)),
        (Some(_), Some(_)) => Err("goal holds initially".into()),
        _ => Err("goal is unreachable".into()),
    }
}

/// Generates the dataset under `out` and writes `manifest.json`. Instances
/// whose plan or reference set cannot be computed within the budget are
/// listed as skipped.
pub fn generate_dataset(tasks: &[SampleTask], out: &Path, opts: &DatasetOptions) -> Result<Manifest, DatasetError> {
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut manifest = Manifest {
        version: MANIFEST_VERSION,
        seed: opts.seed,
        optimality: opts.optimality,
        noise: opts.noise,
        levels: opts.levels.clone(),
        instances: Vec::new(),
        skipped: Vec::new(),
    };
    let mut ordinal = 0u64;
    for t in tasks {
        let optimal: Vec<Result<Option<u64>, SearchError>> =
            t.hyps.iter().map(|g| optimal_cost_with(&t.task, g, opts.budget).map(|r| r.cost)).collect();
        let hyps_text = format_hypotheses(&t.task, &t.hyps);
        let task_text = to_sas(&t.task.clone().without_goal());
        for (k, goal) in t.hyps.iter().enumerate() {
            let goal_dir = format!("{}/{}/goal{k}", t.domain, t.name);
            let plan = reference_plan(&t.task, goal, opts);
            for &level in &opts.levels {
                let reps = if level >= 100 { 1 } else { opts.sequences_per_level };
                for rep in 0..reps {
                    ordinal += 1;
                    let rel = format!("{goal_dir}/obs{level:03}-{rep}");
                    let mut skip = |reason: String| {
                        log::warn!("skipping {rel}: {reason}");
                        manifest.skipped.push(Skipped { path: rel.clone(), reason });
                    };
                    let (plan, cost) = match &plan {
                        Ok(p) => p,
                        Err(e) => {
                            skip(e.clone());
                            continue;
                        }
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(opts.seed, ordinal));
                    let obs = if level >= 100 {
                        ObservationSequence::new(&plan.steps)
                    } else {
                        sample_observations(plan, f64::from(level) / 100.0, &mut rng).map_err(|e| format_err(out, e))?
                    };
                    let noisy = if opts.noise {
                        match inject_noise(&obs, &t.task, plan, &mut rng) {
                            Ok(n) => Some(n),
                            Err(e) => {
                                skip(e.to_string());
                                continue;
                            }
                        }
                    } else {
                        None
                    };
                    let costs = t
                        .hyps
                        .iter()
                        .zip(&optimal)
                        .map(|(g, opt)| -> Result<HypothesisCosts, SearchError> {
                            let comp = optimal_complying_cost_with(
                                &t.task,
                                g,
                                &obs,
                                ComplianceOptions { budget: opts.budget, ..Default::default() },
                            )?;
                            Ok(HypothesisCosts { optimal: opt.clone()?, complying: comp.cost, expanded: comp.expanded })
                        })
                        .collect::<Result<Vec<_>, _>>();
                    let costs = match costs {
                        Ok(c) => c,
                        Err(e) => {
                            skip(e.to_string());
                            continue;
                        }
                    };
                    let bound = CostRatio::of(Some(*cost), costs[k].optimal);
                    let solution: Vec<PartialState> =
                        reference_set_from_costs(&costs, bound).into_iter().map(|i| t.hyps[i].clone()).collect();

                    let dir = out.join(&rel);
                    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
                    write(&dir.join("task.sas"), &task_text)?;
                    write(&dir.join("hyps.txt"), &hyps_text)?;
                    write(&dir.join("real_goal.txt"), &format_hypotheses(&t.task, std::slice::from_ref(goal)))?;
                    write(&dir.join("plan.txt"), &ObservationSequence::new(&plan.steps).to_text())?;
                    write(&dir.join("obs.txt"), &obs.to_text())?;
                    if let Some(n) = &noisy {
                        write(&dir.join("obs_noisy.txt"), &n.to_text())?;
                    }
                    write(&dir.join("solution.txt"), &format_hypotheses(&t.task, &solution))?;
                    manifest.instances.push(InstanceInfo {
                        path: rel,
                        domain: t.domain.clone(),
                        task: t.name.clone(),
                        goal: k,
                        observability: level,
                        plan_cost: *cost,
                        observations: obs.len(),
                    });
                }
            }
        }
    }
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&out.join("manifest.json"), &(text + "\n"))?;
    Ok(manifest)
}

/// One loaded recognition instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub info: InstanceInfo,
    pub task: Task,
    pub hyps: Vec<PartialState>,
    pub real_goal: usize,
    pub plan: Plan,
    pub obs: ObservationSequence,
    pub obs_noisy: Option<ObservationSequence>,
    /// Indices into `hyps`.
    pub solution: BTreeSet<usize>,
}

fn index_of(hyps: &[PartialState], g: &PartialState, path: &Path) -> Result<usize, DatasetError> {
    hyps.iter().position(|h| h == g).ok_or_else(|| format_err(path, "goal is not among the hypotheses"))
}

pub fn load_instance(dir: &Path, info: InstanceInfo) -> Result<Instance, DatasetError> {
    let task_path = dir.join("task.sas");
    let task = parse_sas(&read(&task_path)?).map_err(|e: SasError| format_err(&task_path, e))?;
    let hyps_path = dir.join("hyps.txt");
    let hyps = parse_hypotheses(&task, &read(&hyps_path)?).map_err(|e| format_err(&hyps_path, e))?;
    let real_path = dir.join("real_goal.txt");
    let real = parse_hypotheses(&task, &read(&real_path)?).map_err(|e| format_err(&real_path, e))?;
    let [real] = real.as_slice() else {
        return Err(format_err(&real_path, "expected exactly one goal"));
    };
    let real_goal = index_of(&hyps, real, &real_path)?;
    let sol_path = dir.join("solution.txt");
    let solution = parse_hypotheses(&task, &read(&sol_path)?)
        .map_err(|e| format_err(&sol_path, e))?
        .iter()
        .map(|g| index_of(&hyps, g, &sol_path))
        .collect::<Result<BTreeSet<_>, _>>()?;
    let plan = Plan::new(ObservationSequence::parse(&read(&dir.join("plan.txt"))?).labels());
    let obs = ObservationSequence::parse(&read(&dir.join("obs.txt"))?);
    let noisy_path = dir.join("obs_noisy.txt");
    let obs_noisy = if noisy_path.exists() { Some(ObservationSequence::parse(&read(&noisy_path)?)) } else { None };
    for seq in std::iter::once(&obs).chain(&obs_noisy) {
        if let Some(l) = seq.unknown_labels(&task).first() {
            return Err(format_err(dir, format!("unknown observation `{l}`")));
        }
    }
    Ok(Instance { info, task, hyps, real_goal, plan, obs, obs_noisy, solution })
}

pub fn load_manifest(dir: &Path) -> Result<Manifest, DatasetError> {
    let path = dir.join("manifest.json");
    let manifest: Manifest = serde_json::from_str(&read(&path)?).map_err(|e| format_err(&path, e))?;
    if manifest.version != MANIFEST_VERSION {
        return Err(format_err(&path, format!("unsupported manifest version {}", manifest.version)));
    }
    Ok(manifest)
}

pub fn load_dataset(dir: &Path) -> Result<(Manifest, Vec<Instance>), DatasetError> {
    let manifest = load_manifest(dir)?;
    let instances = manifest
        .instances
        .iter()
        .map(|info| load_instance(&dir.join(&info.path), info.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((manifest, instances))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{grid, grid_goal};

    fn corridor() -> Vec<SampleTask> {
        vec![SampleTask {
            domain: "grid".into(),
            name: "g3x3".into(),
            task: grid(3, 3, &[], (0, 0)),
            hyps: vec![grid_goal(8), grid_goal(2), grid_goal(6), grid_goal(0)],
        }]
    }

    #[test]
    fn instance_counts_and_skips() {
        let dir = tempfile::tempdir().unwrap();
        let m = generate_dataset(&corridor(), dir.path(), &DatasetOptions::default()).unwrap();
        // goal c0 holds initially: its 13 sequences are skipped
        assert_eq!(m.instances.len(), 3 * 13);
        assert_eq!(m.skipped.len(), 13);
        let (_, instances) = load_dataset(dir.path()).unwrap();
        for inst in &instances {
            assert!(inst.solution.contains(&inst.real_goal));
            if inst.info.observability == 100 {
                assert_eq!(inst.obs.labels(), inst.plan.steps.as_slice());
            }
        }
    }

    #[test]
    fn domain_dir_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        write_domain_dir(dir.path(), &corridor()).unwrap();
        let loaded = load_domain_dir(dir.path()).unwrap();
        assert_eq!(loaded.len(), 1);
        assert_eq!(loaded[0].hyps, corridor()[0].hyps);
        assert_eq!(loaded[0].task, corridor()[0].task);
    }

    #[test]
    fn noisy_generation_is_seeded() {
        let opts = DatasetOptions { noise: true, seed: 7, levels: vec![50], ..Default::default() };
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        generate_dataset(&corridor(), a.path(), &opts).unwrap();
        generate_dataset(&corridor(), b.path(), &opts).unwrap();
        let p = "grid/g3x3/goal0/obs050-1/obs_noisy.txt";
        assert_eq!(fs::read_to_string(a.path().join(p)).unwrap(), fs::read_to_string(b.path().join(p)).unwrap());
    }

    #[test]
    fn missing_hyps_file_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        write_domain_dir(dir.path(), &corridor()).unwrap();
        fs::remove_file(dir.path().join("grid/g3x3.hyps")).unwrap();
        assert!(load_domain_dir(dir.path()).is_err());
    }
}
