//! Exact solving.
//!
//! - [`evaluate_fixed`]: earliest schedule for fixed machine assignments and sequences
//! - [`brute_force`]: full enumeration, the reference oracle
//! - [`branch_and_bound`]: the production search
//! - [`verify_schedule`]: independent feasibility check of any schedule

mod bnb;
mod brute;
pub(crate) mod graph;
mod verify;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::instance::{Instance, ScenarioConstraint, Schedule, ScheduledOp, Time};
use graph::Problem;

pub use bnb::{branch_and_bound, SolveOptions};
pub use brute::{brute_force, enumeration_size, BruteError, BruteLimits};
pub use verify::{verify_schedule, verify_schedule_structure, ScheduleViolation};

/// Machine per subtask plus a processing order per machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedDecisions {
    /// `assignment[i][j]` is the machine of subtask (i,j).
    pub assignment: Vec<Vec<usize>>,
    /// `sequences[k]` lists `(job, subtask)` on machine k in processing order.
    pub sequences: Vec<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    /// The fixed decisions admit no start times. `witness` names the constraints on one positive cycle.
    #[error("infeasible: {}", witness.join(", "))]
    Infeasible { witness: Vec<String> },
    #[error("fixed decisions do not match the instance: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::Feasible => "Feasible",
            SolveStatus::Infeasible => "Infeasible",
            SolveStatus::TimeLimit => "TimeLimit",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub best: Option<Schedule>,
    pub lower_bound: Time,
    pub nodes: u64,
    pub wall_time: Duration,
    /// Constraint names proving infeasibility, when one cycle suffices.
    pub witness: Vec<String>,
}

impl SolveReport {
    pub fn makespan(&self) -> Option<Time> {
        self.best.as_ref().map(|s| s.makespan)
    }
}

fn consistency(instance: &Instance, fixed: &FixedDecisions) -> Result<(), String> {
    if fixed.assignment.len() != instance.jobs.len() {
        return Err("assignment has wrong job count".into());
    }
    let mut seen = vec![Vec::new(); instance.jobs.len()];
    for (i, job) in instance.jobs.iter().enumerate() {
        if fixed.assignment[i].len() != job.subtasks.len() {
            return Err(format!("job {} has wrong subtask count", i + 1));
        }
        seen[i] = vec![false; job.subtasks.len()];
        for (j, &k) in fixed.assignment[i].iter().enumerate() {
            if job.subtasks[j].time_on(k).is_none() {
                return Err(format!("subtask {}.{} is not eligible on machine {}", i + 1, j + 1, k + 1));
            }
        }
    }
    if fixed.sequences.len() > instance.machine_count {
        return Err("more sequences than machines".into());
    }
    for (k, seq) in fixed.sequences.iter().enumerate() {
        for &(i, j) in seq {
            let slot = seen.get_mut(i).and_then(|s| s.get_mut(j)).ok_or_else(|| {
                format!("sequence of machine {} names unknown subtask {}.{}", k + 1, i + 1, j + 1)
            })?;
            if *slot {
                return Err(format!("subtask {}.{} sequenced twice", i + 1, j + 1));
            }
            if fixed.assignment[i][j] != k {
                return Err(format!("subtask {}.{} sequenced on machine {} but assigned elsewhere", i + 1, j + 1, k + 1));
            }
            *slot = true;
        }
    }
    if let Some((i, j)) = seen
        .iter()
        .enumerate()
        .find_map(|(i, s)| s.iter().position(|v| !v).map(|j| (i, j)))
    {
        return Err(format!("subtask {}.{} is not sequenced", i + 1, j + 1));
    }
    Ok(())
}

/// Durations and op-index sequences for a complete decision set on `problem`.
pub(crate) fn fixed_times(problem: &Problem<'_>, machine_of: &[usize]) -> Vec<(i64, i64)> {
    problem
        .ops
        .iter()
        .zip(machine_of)
        .map(|(op, &k)| {
            let t = op.options.iter().find(|(m, _)| *m == k).expect("eligible").1;
            (t, t)
        })
        .collect()
}

/// Earliest schedule from longest-path distances of a complete graph.
pub(crate) fn schedule_from_distances(problem: &Problem<'_>, machine_of: &[usize], dist: &[i64]) -> Schedule {
    let times = fixed_times(problem, machine_of);
    let ops: Vec<ScheduledOp> = problem
        .ops
        .iter()
        .enumerate()
        .map(|(o, op)| ScheduledOp {
            job: op.job,
            subtask: op.pos,
            machine: machine_of[o],
            start: Time::from_integer(dist[o + 1]),
            end: Time::from_integer(dist[o + 1] + times[o].0),
        })
        .collect();
    let makespan = (0..problem.job_count())
        .map(|i| Time::from_integer(dist[problem.completion_node(i)]))
        .max()
        .unwrap_or_default();
    debug_assert!(ops.iter().all(|o| o.end <= makespan));
    Schedule { ops, makespan }
}

/// Earliest start times for fixed assignments and machine sequences.
///
/// The result is the componentwise-least feasible start vector, so its
/// makespan is minimal for these decisions.
pub fn evaluate_fixed(
    instance: &Instance,
    cs: &[ScenarioConstraint],
    fixed: &FixedDecisions,
) -> Result<Schedule, EvalError> {
    consistency(instance, fixed).map_err(EvalError::Inconsistent)?;
    let problem = Problem::new(instance, cs);
    let machine_of: Vec<usize> = fixed.assignment.iter().flatten().copied().collect();
    let sequences: Vec<Vec<usize>> = fixed
        .sequences
        .iter()
        .map(|seq| seq.iter().map(|&(i, j)| problem.op_index(i, j)).collect())
        .collect();
    evaluate_ops(&problem, &machine_of, &sequences)
}

pub(crate) fn evaluate_ops(
    problem: &Problem<'_>,
    machine_of: &[usize],
    sequences: &[Vec<usize>],
) -> Result<Schedule, EvalError> {
    let times = fixed_times(problem, machine_of);
    match problem.graph(&times, sequences).longest_paths() {
        Ok(dist) => Ok(schedule_from_distances(problem, machine_of, &dist)),
        Err(cycle) => Err(EvalError::Infeasible {
            witness: cycle.0.iter().map(|e| problem.edge_name(e)).collect(),
        }),
    }
}
