//! Goal recognition as planning with operator-counting heuristics.
//!
//! A recognizer scores each candidate goal by how much the observed actions
//! raise an admissible LP estimate of its plan cost, and returns the goals
//! with the smallest increase. Around that core the crate provides a SAS+
//! task model, search-based oracles for the exact quantities the LP
//! approximates, landmark extraction, an in-process simplex and
//! branch-and-bound solver, and a dataset generator and benchmark runner.

pub mod bench;
pub mod dataset;
pub mod domains;
pub mod heuristics;
pub mod landmarks;
pub mod lp;
pub mod observations;
pub mod recognition;
pub mod sas;
pub mod search;

pub use heuristics::{h_base, h_goal, h_improved, HeuristicReport};
pub use observations::{NoiseSpec, ObservationSequence};
pub use recognition::{agreement_ratio, recognize, HeuristicKind, RecognitionOptions, RecognitionResult};
pub use sas::{parse_sas, PartialState, Plan, State, Task};
