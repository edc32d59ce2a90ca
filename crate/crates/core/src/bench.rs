//! Benchmark runner: recognizes every instance of a dataset and aggregates
//! agreement with the reference solution sets per domain and observability.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dataset::{load_dataset, DatasetError, Instance};
use crate::lp::SolverOptions;
use crate::observations::NoiseSpec;
use crate::recognition::{agreement_ratio, recognize, HeuristicKind, RecognitionError, RecognitionOptions};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Recognition { path: String, source: RecognitionError },
    #[error("{0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchOptions {
    pub heuristic: HeuristicKind,
    pub eps: NoiseSpec,
    pub solver: SolverOptions,
    /// Recognize from `obs_noisy.txt` instead of `obs.txt`.
    pub noisy: bool,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            heuristic: HeuristicKind::Improved,
            eps: NoiseSpec::NONE,
            solver: SolverOptions::default(),
            noisy: false,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceResult {
    pub path: String,
    pub domain: String,
    pub observability: u32,
    pub agr: f64,
    /// `h_Ω` of the real goal; `None` is infinity.
    pub h_omega_real: Option<f64>,
    /// Mean constraint count over hypotheses.
    pub rows: f64,
    pub reference: BTreeSet<usize>,
    pub answer: BTreeSet<usize>,
    #[serde(serialize_with = "as_millis")]
    pub total_time: Duration,
    #[serde(serialize_with = "as_millis")]
    pub lp_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub domain: String,
    pub observability: u32,
    pub instances: usize,
    pub agr: f64,
    /// Mean over instances with a finite value.
    pub avg_h_omega: Option<f64>,
    pub avg_rows: f64,
    #[serde(serialize_with = "as_millis")]
    pub total_time: Duration,
    #[serde(serialize_with = "as_millis")]
    pub lp_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub version: u32,
    pub heuristic: String,
    pub mode: String,
    pub epsilon: f64,
    pub noisy: bool,
    pub rows: Vec<LevelRow>,
    pub instances: Vec<InstanceResult>,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

fn run_instance(inst: &Instance, opts: &BenchOptions) -> Result<InstanceResult, BenchError> {
    let start = Instant::now();
    let obs = if opts.noisy { inst.obs_noisy.as_ref().unwrap_or(&inst.obs) } else { &inst.obs };
    let ropts = RecognitionOptions { heuristic: opts.heuristic, eps: opts.eps, solver: opts.solver };
    let (answer, h_omega_real, rows, lp_time) = match recognize(&inst.task, &inst.hyps, obs, &ropts) {
        Ok(r) => {
            let rows = r.per_goal.iter().map(|g| g.rows as f64).sum::<f64>() / r.per_goal.len() as f64;
            let lp = r.per_goal.iter().map(|g| g.lp_time).sum();
            (r.solution, r.per_goal[inst.real_goal].h_omega, rows, lp)
        }
        Err(RecognitionError::AllInfeasible) => (BTreeSet::new(), None, 0.0, Duration::ZERO),
        Err(source) => return Err(BenchError::Recognition { path: inst.info.path.clone(), source }),
    };
    Ok(InstanceResult {
        path: inst.info.path.clone(),
        domain: inst.info.domain.clone(),
        observability: inst.info.observability,
        agr: agreement_ratio(&inst.solution, &answer),
        h_omega_real,
        rows,
        reference: inst.solution.clone(),
        answer,
        total_time: start.elapsed(),
        lp_time,
    })
}

/// Aggregates per (domain, observability). Instances are sorted by path
/// first, so the result does not depend on input order.
pub fn aggregate(results: &[InstanceResult]) -> Vec<LevelRow> {
    let mut sorted: Vec<&InstanceResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.path.cmp(&b.path));
    let mut groups: BTreeMap<(&str, u32), Vec<&InstanceResult>> = BTreeMap::new();
    for r in sorted {
        groups.entry((r.domain.as_str(), r.observability)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((domain, observability), rs)| {
            let n = rs.len() as f64;
            let finite: Vec<f64> = rs.iter().filter_map(|r| r.h_omega_real).collect();
            LevelRow {
                domain: domain.to_string(),
                observability,
                instances: rs.len(),
                agr: rs.iter().map(|r| r.agr).sum::<f64>() / n,
                avg_h_omega: (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64),
                avg_rows: rs.iter().map(|r| r.rows).sum::<f64>() / n,
                total_time: rs.iter().map(|r| r.total_time).sum(),
                lp_time: rs.iter().map(|r| r.lp_time).sum(),
            }
        })
        .collect()
}

pub fn run_instances(instances: &[Instance], opts: &BenchOptions) -> Result<BenchmarkReport, BenchError> {
    let work = || instances.par_iter().map(|i| run_instance(i, opts)).collect::<Result<Vec<_>, _>>();
    let results = match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BenchError::Pool(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    Ok(BenchmarkReport {
        version: 1,
        heuristic: opts.heuristic.to_string(),
        mode: opts.solver.mode.to_string(),
        epsilon: opts.eps.epsilon(),
        noisy: opts.noisy,
        rows: aggregate(&results),
        instances: results,
    })
}

pub fn run_benchmark(dataset: &Path, opts: &BenchOptions) -> Result<BenchmarkReport, BenchError> {
    let (_, instances) = load_dataset(dataset)?;
    run_instances(&instances, opts)
}

fn fixed(v: f64) -> String {
    format!("{v:.4}")
}

impl BenchmarkReport {
    /// Per-level CSV without timing columns, so equal inputs give equal
    /// bytes. Timings are in the JSON form.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["domain", "observability", "instances", "agr", "avg_h_omega", "avg_rows"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.domain.clone(),
                r.observability.to_string(),
                r.instances.to_string(),
                fixed(r.agr),
                r.avg_h_omega.map_or_else(|| "inf".to_string(), fixed),
                fixed(r.avg_rows),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// Mean agreement over all instances.
    pub fn mean_agr(&self) -> f64 {
        if self.instances.is_empty() {
            return 0.0;
        }
        self.instances.iter().map(|r| r.agr).sum::<f64>() / self.instances.len() as f64
    }

    /// Mean agreement per observability level, over all domains.
    pub fn agr_by_level(&self) -> BTreeMap<u32, f64> {
        let mut acc: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
        for r in &self.instances {
            let e = acc.entry(r.observability).or_default();
            e.0 += r.agr;
            e.1 += 1;
        }
        acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(path: &str, obs: u32, agr: f64) -> InstanceResult {
        InstanceResult {
            path: path.into(),
            domain: "d".into(),
            observability: obs,
            agr,
            h_omega_real: Some(agr * 2.0),
            rows: 3.0,
            reference: BTreeSet::new(),
            answer: BTreeSet::new(),
            total_time: Duration::from_millis(1),
            lp_time: Duration::ZERO,
        }
    }

    #[test]
    fn aggregation_ignores_order() {
        let mut rs = vec![result("a", 10, 0.5), result("b", 10, 1.0), result("c", 30, 0.1), result("d", 10, 0.3)];
        let a = aggregate(&rs);
        rs.reverse();
        assert_eq!(a, aggregate(&rs));
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].instances, 3);
        assert!((a[0].agr - 0.6).abs() < 1e-12);
    }

    #[test]
    fn csv_has_fixed_precision() {
        let report = BenchmarkReport {
            version: 1,
            heuristic: "improved".into(),
            mode: "lp".into(),
            epsilon: 0.0,
            noisy: false,
            rows: aggregate(&[result("a", 10, 1.0 / 3.0)]),
            instances: vec![],
        };
        assert_eq!(
            report.to_csv(),
            "domain,observability,instances,agr,avg_h_omega,avg_rows\nd,10,1,0.3333,0.6667,3.0000\n"
        );
    }
}
