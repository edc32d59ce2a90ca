//! Best-first branch-and-bound over the simplex relaxation. Every column is
//! integral; branching bounds are appended as extra rows.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::simplex::{minimize, Constraint, Scalar, Sense, SimplexOptions, SimplexResult, SimplexStatus};

struct Node<T> {
    key: f64,
    seq: u64,
    extra: Vec<Constraint<T>>,
    result: SimplexResult<T>,
}

impl<T> PartialEq for Node<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for Node<T> {}
impl<T> PartialOrd for Node<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Node<T> {
    // reversed: BinaryHeap pops the smallest bound, oldest first
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.total_cmp(&self.key).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// `integral_objective` enables pruning against `ceil(bound)`.
pub(crate) fn branch_and_bound<T: Scalar>(
    num_vars: usize,
    objective: &[T],
    base: &[Constraint<T>],
    opts: &SimplexOptions,
    max_nodes: usize,
    integral_objective: bool,
) -> SimplexResult<T> {
    let solve = |extra: &[Constraint<T>]| {
        let mut all = base.to_vec();
        all.extend_from_slice(extra);
        minimize(num_vars, objective, &all, opts)
    };
    let root = solve(&[]);
    if root.status != SimplexStatus::Optimal {
        return root;
    }
    let mut nodes = 1usize;
    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    heap.push(Node { key: root.objective.to_f64(), seq, extra: Vec::new(), result: root });
    let mut incumbent: Option<SimplexResult<T>> = None;
    let dominated = |bound: &T, inc: &Option<SimplexResult<T>>| match inc {
        None => false,
        Some(best) => {
            let b = if integral_objective { bound.ceil() } else { bound.clone() };
            b >= best.objective
        }
    };

    while let Some(node) = heap.pop() {
        if dominated(&node.result.objective, &incumbent) {
            continue;
        }
        let fractional = node.result.values.iter().position(|v| !v.is_integral());
        let Some(j) = fractional else {
            incumbent = Some(node.result);
            continue;
        };
        let v = node.result.values[j].clone();
        for (sense, rhs) in [(Sense::Le, v.floor()), (Sense::Ge, v.ceil())] {
            if nodes >= max_nodes {
                let mut r = node.result.clone();
                r.status = SimplexStatus::IterationLimit;
                log::debug!("branch-and-bound stopped after {nodes} nodes");
                return r;
            }
            let mut extra = node.extra.clone();
            extra.push(Constraint { coefficients: vec![(j, T::one())], sense, rhs });
            let child = solve(&extra);
            nodes += 1;
            match child.status {
                SimplexStatus::Optimal if !dominated(&child.objective, &incumbent) => {
                    seq += 1;
                    heap.push(Node { key: child.objective.to_f64(), seq, extra, result: child });
                }
                SimplexStatus::IterationLimit => return child,
                _ => {}
            }
        }
    }
    log::debug!("branch-and-bound explored {nodes} nodes");
    incumbent.unwrap_or(SimplexResult {
        status: SimplexStatus::Infeasible,
        values: vec![T::zero(); num_vars],
        objective: T::zero(),
        iterations: 0,
    })
}
