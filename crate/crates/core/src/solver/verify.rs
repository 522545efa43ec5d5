//! Schedule checks written directly against the problem statement, without
//! the constraint graph used by the search.

use std::fmt;

use num_traits::Zero;

use crate::instance::{Instance, ScenarioConstraint, Schedule, ScheduledOp, Time};

/// Indices are 0-based and printed 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    MissingOp { job: usize, subtask: usize },
    DuplicateOp { job: usize, subtask: usize },
    UnknownOp { job: usize, subtask: usize },
    IneligibleMachine { job: usize, subtask: usize, machine: usize },
    DurationMismatch { job: usize, subtask: usize },
    NonPositiveDuration { job: usize, subtask: usize },
    NegativeStart { job: usize, subtask: usize },
    MachineOverlap { machine: usize, first: (usize, usize), second: (usize, usize) },
    PrecedenceViolated { job: usize, subtask: usize },
    MinGapViolated { job: usize, subtask: usize },
    MaxGapViolated { job: usize, subtask: usize },
    ReleaseViolated { job: usize },
    DeadlineViolated { job: usize },
    WindowViolated { job: usize },
    SyncViolated { first: usize, second: usize },
    MakespanMismatch { expected: Time, found: Time },
}

impl ScheduleViolation {
    pub fn code(&self) -> &'static str {
        match self {
            ScheduleViolation::MissingOp { .. } => "MissingOp",
            ScheduleViolation::DuplicateOp { .. } => "DuplicateOp",
            ScheduleViolation::UnknownOp { .. } => "UnknownOp",
            ScheduleViolation::IneligibleMachine { .. } => "IneligibleMachine",
            ScheduleViolation::DurationMismatch { .. } => "DurationMismatch",
            ScheduleViolation::NonPositiveDuration { .. } => "NonPositiveDuration",
            ScheduleViolation::NegativeStart { .. } => "NegativeStart",
            ScheduleViolation::MachineOverlap { .. } => "MachineOverlap",
            ScheduleViolation::PrecedenceViolated { .. } => "PrecedenceViolated",
            ScheduleViolation::MinGapViolated { .. } => "MinGapViolated",
            ScheduleViolation::MaxGapViolated { .. } => "MaxGapViolated",
            ScheduleViolation::ReleaseViolated { .. } => "ReleaseViolated",
            ScheduleViolation::DeadlineViolated { .. } => "DeadlineViolated",
            ScheduleViolation::WindowViolated { .. } => "WindowViolated",
            ScheduleViolation::SyncViolated { .. } => "SyncViolated",
            ScheduleViolation::MakespanMismatch { .. } => "MakespanMismatch",
        }
    }
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match *self {
            ScheduleViolation::MissingOp { job, subtask } => write!(f, "subtask {}.{} is not scheduled", job + 1, subtask + 1),
            ScheduleViolation::DuplicateOp { job, subtask } => write!(f, "subtask {}.{} is scheduled twice", job + 1, subtask + 1),
            ScheduleViolation::UnknownOp { job, subtask } => write!(f, "subtask {}.{} does not exist", job + 1, subtask + 1),
            ScheduleViolation::IneligibleMachine { job, subtask, machine } => {
                write!(f, "subtask {}.{} cannot run on machine {}", job + 1, subtask + 1, machine + 1)
            }
            ScheduleViolation::DurationMismatch { job, subtask } => {
                write!(f, "subtask {}.{} end differs from start plus processing time", job + 1, subtask + 1)
            }
            ScheduleViolation::NonPositiveDuration { job, subtask } => {
                write!(f, "subtask {}.{} does not end after it starts", job + 1, subtask + 1)
            }
            ScheduleViolation::NegativeStart { job, subtask } => write!(f, "subtask {}.{} starts before 0", job + 1, subtask + 1),
            ScheduleViolation::MachineOverlap { machine, first, second } => write!(
                f,
                "subtasks {}.{} and {}.{} overlap on machine {}",
                first.0 + 1,
                first.1 + 1,
                second.0 + 1,
                second.1 + 1,
                machine + 1
            ),
            ScheduleViolation::PrecedenceViolated { job, subtask } => {
                write!(f, "subtask {}.{} starts before {}.{} ends", job + 1, subtask + 2, job + 1, subtask + 1)
            }
            ScheduleViolation::MinGapViolated { job, subtask } => {
                write!(f, "minimum gap after subtask {}.{} not respected", job + 1, subtask + 1)
            }
            ScheduleViolation::MaxGapViolated { job, subtask } => {
                write!(f, "maximum gap after subtask {}.{} exceeded", job + 1, subtask + 1)
            }
            ScheduleViolation::ReleaseViolated { job } => write!(f, "job {} starts before its release time", job + 1),
            ScheduleViolation::DeadlineViolated { job } => write!(f, "job {} ends after its deadline", job + 1),
            ScheduleViolation::WindowViolated { job } => write!(f, "job {} starts outside its window", job + 1),
            ScheduleViolation::SyncViolated { first, second } => {
                write!(f, "jobs {} and {} do not complete together", first + 1, second + 1)
            }
            ScheduleViolation::MakespanMismatch { expected, found } => {
                write!(f, "makespan is {found} but the latest end is {expected}")
            }
        }
    }
}

/// Checks that need no instance: positive durations, non-negative starts,
/// no overlap per machine, and makespan equal to the latest end.
pub fn verify_schedule_structure(schedule: &Schedule) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    for op in &schedule.ops {
        if op.start < Time::zero() {
            out.push(ScheduleViolation::NegativeStart { job: op.job, subtask: op.subtask });
        }
        if op.end <= op.start {
            out.push(ScheduleViolation::NonPositiveDuration { job: op.job, subtask: op.subtask });
        }
    }
    for (n, a) in schedule.ops.iter().enumerate() {
        for b in &schedule.ops[n + 1..] {
            if a.machine == b.machine && a.start < b.end && b.start < a.end {
                out.push(ScheduleViolation::MachineOverlap {
                    machine: a.machine,
                    first: (a.job, a.subtask),
                    second: (b.job, b.subtask),
                });
            }
        }
    }
    let latest = schedule.ops.iter().map(|o| o.end).max().unwrap_or_else(Time::zero);
    if latest != schedule.makespan {
        out.push(ScheduleViolation::MakespanMismatch { expected: latest, found: schedule.makespan });
    }
    out
}

/// Full feasibility check of `schedule` against the instance and constraints.
pub fn verify_schedule(instance: &Instance, cs: &[ScenarioConstraint], schedule: &Schedule) -> Vec<ScheduleViolation> {
    let mut out = Vec::new();
    let mut slots: Vec<Vec<Option<&ScheduledOp>>> =
        instance.jobs.iter().map(|j| vec![None; j.subtasks.len()]).collect();
    for op in &schedule.ops {
        match slots.get_mut(op.job).and_then(|s| s.get_mut(op.subtask)) {
            None => out.push(ScheduleViolation::UnknownOp { job: op.job, subtask: op.subtask }),
            Some(Some(_)) => out.push(ScheduleViolation::DuplicateOp { job: op.job, subtask: op.subtask }),
            Some(slot) => *slot = Some(op),
        }
    }
    for (i, row) in slots.iter().enumerate() {
        for (j, slot) in row.iter().enumerate() {
            let Some(op) = slot else {
                out.push(ScheduleViolation::MissingOp { job: i, subtask: j });
                continue;
            };
            match instance.subtask(i, j).time_on(op.machine) {
                None => out.push(ScheduleViolation::IneligibleMachine { job: i, subtask: j, machine: op.machine }),
                Some(pt) if op.end - op.start != Time::from_integer(pt) => {
                    out.push(ScheduleViolation::DurationMismatch { job: i, subtask: j })
                }
                Some(_) => {}
            }
        }
    }
    out.extend(verify_schedule_structure(schedule));
    if out.iter().any(|v| {
        matches!(
            v,
            ScheduleViolation::MissingOp { .. } | ScheduleViolation::UnknownOp { .. } | ScheduleViolation::DuplicateOp { .. }
        )
    }) {
        return out;
    }

    let op = |i: usize, j: usize| slots[i][j].expect("checked present");
    let first = |i: usize| op(i, 0);
    let last = |i: usize| op(i, instance.jobs[i].subtasks.len() - 1);
    let min_gap = |i: usize, j: usize| {
        cs.iter()
            .filter_map(|c| match *c {
                ScenarioConstraint::MinGap { job, subtask, t } if job == i && subtask == j => Some(t),
                _ => None,
            })
            .max()
    };
    for (i, job) in instance.jobs.iter().enumerate() {
        for j in 0..job.subtasks.len().saturating_sub(1) {
            let (a, b) = (op(i, j), op(i, j + 1));
            if b.start < a.end {
                out.push(ScheduleViolation::PrecedenceViolated { job: i, subtask: j });
            } else if let Some(t) = min_gap(i, j) {
                if b.start < a.end + Time::from_integer(t) {
                    out.push(ScheduleViolation::MinGapViolated { job: i, subtask: j });
                }
            }
        }
    }
    for c in cs {
        match *c {
            ScenarioConstraint::Release { job, t } => {
                if first(job).start < Time::from_integer(t) {
                    out.push(ScheduleViolation::ReleaseViolated { job });
                }
            }
            ScenarioConstraint::Deadline { job, t } => {
                if last(job).end > Time::from_integer(t) {
                    out.push(ScheduleViolation::DeadlineViolated { job });
                }
            }
            ScenarioConstraint::Window { job, t1, t2 } => {
                let s = first(job).start;
                if s < Time::from_integer(t1) || s > Time::from_integer(t2) {
                    out.push(ScheduleViolation::WindowViolated { job });
                }
            }
            ScenarioConstraint::MinGap { .. } => {}
            ScenarioConstraint::MaxGap { job, subtask, t } => {
                if op(job, subtask + 1).start > op(job, subtask).end + Time::from_integer(t) {
                    out.push(ScheduleViolation::MaxGapViolated { job, subtask });
                }
            }
            ScenarioConstraint::Sync { first, second } => {
                if last(first).end != last(second).end {
                    out.push(ScheduleViolation::SyncViolated { first, second });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Job, Subtask};

    fn t(v: i64) -> Time {
        Time::from_integer(v)
    }

    fn op(job: usize, subtask: usize, machine: usize, start: i64, end: i64) -> ScheduledOp {
        ScheduledOp { job, subtask, machine, start: t(start), end: t(end) }
    }

    fn two_jobs() -> Instance {
        Instance::new(
            1,
            vec![Job { subtasks: vec![Subtask::new([(0, 3)])] }, Job { subtasks: vec![Subtask::new([(0, 2)])] }],
        )
    }

    #[test]
    fn feasible_schedule_passes() {
        let s = Schedule { ops: vec![op(0, 0, 0, 0, 3), op(1, 0, 0, 3, 5)], makespan: t(5) };
        assert!(verify_schedule(&two_jobs(), &[], &s).is_empty());
    }

    #[test]
    fn overlap_detected() {
        let s = Schedule { ops: vec![op(0, 0, 0, 0, 3), op(1, 0, 0, 2, 4)], makespan: t(4) };
        let v = verify_schedule(&two_jobs(), &[], &s);
        assert_eq!(v, vec![ScheduleViolation::MachineOverlap { machine: 0, first: (0, 0), second: (1, 0) }]);
    }

    #[test]
    fn release_detected() {
        let inst = Instance::new(1, vec![Job { subtasks: vec![Subtask::new([(0, 3)])] }]);
        let s = Schedule { ops: vec![op(0, 0, 0, 9, 12)], makespan: t(12) };
        let v = verify_schedule(&inst, &[ScenarioConstraint::Release { job: 0, t: 10 }], &s);
        assert_eq!(v, vec![ScheduleViolation::ReleaseViolated { job: 0 }]);
    }

    #[test]
    fn structural_errors() {
        let s = Schedule { ops: vec![op(0, 0, 0, 0, 4), op(1, 0, 0, 4, 6)], makespan: t(7) };
        let v = verify_schedule(&two_jobs(), &[], &s);
        let codes: Vec<_> = v.iter().map(|v| v.code()).collect();
        assert_eq!(codes, vec!["DurationMismatch", "MakespanMismatch"]);

        let s = Schedule { ops: vec![op(0, 0, 0, 0, 3)], makespan: t(3) };
        assert_eq!(verify_schedule(&two_jobs(), &[], &s), vec![ScheduleViolation::MissingOp { job: 1, subtask: 0 }]);
    }

    #[test]
    fn gap_checks() {
        let inst = Instance::new(1, vec![Job { subtasks: vec![Subtask::new([(0, 2)]), Subtask::new([(0, 2)])] }]);
        let s = Schedule { ops: vec![op(0, 0, 0, 0, 2), op(0, 1, 0, 3, 5)], makespan: t(5) };
        let cs = [
            ScenarioConstraint::MinGap { job: 0, subtask: 0, t: 2 },
            ScenarioConstraint::MaxGap { job: 0, subtask: 0, t: 0 },
        ];
        let codes: Vec<_> = verify_schedule(&inst, &cs, &s).iter().map(|v| v.code()).collect();
        assert_eq!(codes, vec!["MinGapViolated", "MaxGapViolated"]);
    }
}
