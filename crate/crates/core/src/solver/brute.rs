use std::collections::HashMap;
use std::time::Instant;

use num_traits::Zero;
use thiserror::Error;

use super::graph::Problem;
use super::{fixed_times, schedule_from_distances, SolveReport, SolveStatus};
use crate::instance::{Instance, ScenarioConstraint, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteLimits {
    pub max_leaves: u128,
}

impl Default for BruteLimits {
    fn default() -> Self {
        BruteLimits { max_leaves: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteError {
    /// `leaves` is exact, or the assignment count when that alone exceeds the limit.
    #[error("enumeration needs at least {leaves} leaves, limit is {limit}")]
    TooLarge { leaves: u128, limit: u128 },
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, v| acc.saturating_mul(v))
}

/// Number of (assignment, per-machine order) leaves, `Σ_assignments Π_k load_k!`.
///
/// Returns `Err(lower bound)` when the assignment count alone exceeds `cap`.
pub fn enumeration_size(instance: &Instance, cap: u128) -> Result<u128, u128> {
    let assignments = instance
        .subtasks()
        .fold(1u128, |acc, (_, _, s)| acc.saturating_mul(s.options.len() as u128));
    if assignments > cap {
        return Err(assignments);
    }
    let mut states: HashMap<Vec<u16>, u128> = HashMap::from([(vec![0; instance.machine_count], 1)]);
    for (_, _, sub) in instance.subtasks() {
        let mut next: HashMap<Vec<u16>, u128> = HashMap::new();
        for (loads, count) in &states {
            for o in &sub.options {
                let mut l = loads.clone();
                l[o.machine] += 1;
                let e = next.entry(l).or_insert(0);
                *e = e.saturating_add(*count);
            }
        }
        states = next;
    }
    Ok(states.iter().fold(0u128, |acc, (loads, count)| {
        let orders = loads.iter().fold(1u128, |a, &l| a.saturating_mul(factorial(l as usize)));
        acc.saturating_add(count.saturating_mul(orders))
    }))
}

/// Advances `seq` to its next lexicographic permutation; on the last one it
/// resets to ascending order and returns false.
fn next_permutation(seq: &mut [usize]) -> bool {
    let Some(i) = (1..seq.len()).rev().find(|&i| seq[i - 1] < seq[i]) else {
        seq.reverse();
        return false;
    };
    let j = (i..seq.len()).rev().find(|&j| seq[j] > seq[i - 1]).expect("pivot successor");
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// Enumerates every machine assignment and every per-machine order and
/// keeps the first strictly better earliest schedule.
///
/// Assignments are visited lexicographically by machine index, so among
/// equal makespans the smallest assignment vector wins.
pub fn brute_force(
    instance: &Instance,
    cs: &[ScenarioConstraint],
    limits: BruteLimits,
) -> Result<SolveReport, BruteError> {
    let started = Instant::now();
    let leaves = enumeration_size(instance, limits.max_leaves)
        .map_err(|leaves| BruteError::TooLarge { leaves, limit: limits.max_leaves })?;
    if leaves > limits.max_leaves {
        return Err(BruteError::TooLarge { leaves, limit: limits.max_leaves });
    }

    let problem = Problem::new(instance, cs);
    let n = problem.ops.len();
    let mut choice = vec![0usize; n];
    let mut visited = 0u64;
    let mut best: Option<(i64, Vec<usize>, Vec<i64>)> = None;

    loop {
        let machine_of: Vec<usize> = (0..n).map(|o| problem.ops[o].options[choice[o]].0).collect();
        let times = fixed_times(&problem, &machine_of);
        let mut sequences = vec![Vec::new(); instance.machine_count];
        for (o, &k) in machine_of.iter().enumerate() {
            sequences[k].push(o);
        }
        loop {
            visited += 1;
            if let Ok(dist) = problem.graph(&times, &sequences).longest_paths() {
                let makespan = (0..problem.job_count()).map(|i| dist[problem.completion_node(i)]).max().unwrap_or(0);
                if best.as_ref().is_none_or(|(b, _, _)| makespan < *b) {
                    best = Some((makespan, machine_of.clone(), dist));
                }
            }
            if !sequences.iter_mut().rev().any(|s| next_permutation(s)) {
                break;
            }
        }
        // odometer over assignments, last op fastest
        let advanced = (0..n).rev().any(|o| {
            choice[o] += 1;
            if choice[o] < problem.ops[o].options.len() {
                true
            } else {
                choice[o] = 0;
                false
            }
        });
        if !advanced {
            break;
        }
    }

    let wall_time = started.elapsed();
    Ok(match best {
        Some((makespan, machine_of, dist)) => SolveReport {
            status: SolveStatus::Optimal,
            best: Some(schedule_from_distances(&problem, &machine_of, &dist)),
            lower_bound: Time::from_integer(makespan),
            nodes: visited,
            wall_time,
            witness: Vec::new(),
        },
        None => SolveReport {
            status: SolveStatus::Infeasible,
            best: None,
            lower_bound: Time::zero(),
            nodes: visited,
            wall_time,
            witness: Vec::new(),
        },
    })
}
