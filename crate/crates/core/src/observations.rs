//! Observation sequences: compliance, sampling at an observability level,
//! and noise injection.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::sas::{normalize_label, Plan, Task};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservationError {
    #[error("cannot sample observations from an empty plan")]
    EmptyPlan,
    #[error("observability ratio {0} outside (0, 1]")]
    BadRatio(f64),
    #[error("every operator occurs in the plan; no noise candidates")]
    NoNoiseCandidates,
    #[error("noise level {0} outside [0, 1]")]
    BadEpsilon(f64),
}

/// An ordered sequence of observed operator labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ObservationSequence {
    labels: Vec<String>,
}

impl ObservationSequence {
    pub fn new<S: AsRef<str>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self { labels: labels.into_iter().map(|l| normalize_label(l.as_ref())).collect() }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn occurrences(&self) -> BTreeMap<&str, usize> {
        let mut m = BTreeMap::new();
        for l in &self.labels {
            *m.entry(l.as_str()).or_insert(0) += 1;
        }
        m
    }

    pub fn occurrences_of(&self, label: &str) -> usize {
        self.labels.iter().filter(|l| *l == label).count()
    }

    /// Drops every label that does not occur in `plan`. Applied to a
    /// sequence produced by [`inject_noise`] this recovers the original.
    pub fn denoised(&self, plan: &Plan) -> Self {
        let keep: BTreeSet<&str> = plan.steps.iter().map(String::as_str).collect();
        Self { labels: self.labels.iter().filter(|l| keep.contains(l.as_str())).cloned().collect() }
    }

    /// Parses the observation file format: one label per line, `;` comment
    /// lines and blank lines ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with(';')))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for l in &self.labels {
            out.push('(');
            out.push_str(l);
            out.push_str(")\n");
        }
        out
    }

    /// Labels that are not operators of `task`.
    pub fn unknown_labels<'a>(&'a self, task: &Task) -> Vec<&'a str> {
        self.labels.iter().filter(|l| task.operator_index(l).is_none()).map(String::as_str).collect()
    }
}

/// Sensor unreliability: the fraction of observations the recognizer may
/// leave unexplained.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseSpec {
    epsilon: f64,
}

impl NoiseSpec {
    pub fn new(epsilon: f64) -> Result<Self, ObservationError> {
        if (0.0..=1.0).contains(&epsilon) {
            Ok(Self { epsilon })
        } else {
            Err(ObservationError::BadEpsilon(epsilon))
        }
    }

    pub const NONE: NoiseSpec = NoiseSpec { epsilon: 0.0 };

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }
}

/// `⌊|Ω|·ε⌋`. The product is nudged before flooring so decimal inputs such
/// as 0.29·100 are not truncated by binary rounding.
pub fn max_ignorable(omega: &ObservationSequence, eps: NoiseSpec) -> usize {
    (omega.len() as f64 * eps.epsilon + 1e-9).floor() as usize
}

/// Whether `plan` embeds `omega` as a subsequence (strictly increasing index
/// map). Greedy leftmost matching decides this exactly.
pub fn complies(plan: &Plan, omega: &ObservationSequence) -> bool {
    let mut steps = plan.steps.iter();
    omega.labels.iter().all(|o| steps.any(|s| s == o))
}

/// `⌊x + 1/2⌋` for the observation count, never below one.
fn observed_count(ratio: f64, len: usize) -> usize {
    ((ratio * len as f64 + 0.5 + 1e-9).floor() as usize).clamp(1, len)
}

/// Keeps `round(ratio·|π|)` plan steps (at least one) chosen uniformly,
/// preserving order. A ratio of 1 returns the whole plan.
pub fn sample_observations<R: Rng + ?Sized>(
    plan: &Plan,
    ratio: f64,
    rng: &mut R,
) -> Result<ObservationSequence, ObservationError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(ObservationError::BadRatio(ratio));
    }
    if plan.is_empty() {
        return Err(ObservationError::EmptyPlan);
    }
    let n = plan.len();
    let k = observed_count(ratio, n);
    let mut idx = sample(rng, n, k).into_vec();
    idx.sort_unstable();
    Ok(ObservationSequence { labels: idx.into_iter().map(|i| plan.steps[i].clone()).collect() })
}

/// Number of noisy labels the benchmark adds: `⌈0.2·|Ω|⌉`.
pub fn default_noise_count(omega: &ObservationSequence) -> usize {
    // integer form of ceil(len / 5)
    omega.len().div_ceil(5)
}

/// Inserts `⌈0.2·|Ω|⌉` labels drawn uniformly from the operators not in
/// `plan`, each at a uniformly random position (both ends included).
pub fn inject_noise<R: Rng + ?Sized>(
    omega: &ObservationSequence,
    task: &Task,
    plan: &Plan,
    rng: &mut R,
) -> Result<ObservationSequence, ObservationError> {
    inject_noise_count(omega, task, plan, default_noise_count(omega), rng)
}

pub fn inject_noise_count<R: Rng + ?Sized>(
    omega: &ObservationSequence,
    task: &Task,
    plan: &Plan,
    count: usize,
    rng: &mut R,
) -> Result<ObservationSequence, ObservationError> {
    if count == 0 {
        return Ok(omega.clone());
    }
    let used: BTreeSet<&str> = plan.steps.iter().map(String::as_str).collect();
    let mut candidates: Vec<&str> =
        task.operators().iter().map(|o| o.label.as_str()).filter(|l| !used.contains(l)).collect();
    candidates.sort_unstable();
    if candidates.is_empty() {
        return Err(ObservationError::NoNoiseCandidates);
    }
    let mut labels = omega.labels.clone();
    for _ in 0..count {
        let label = candidates[rng.gen_range(0..candidates.len())];
        let pos = rng.gen_range(0..=labels.len());
        labels.insert(pos, label.to_string());
    }
    Ok(ObservationSequence { labels })
}
