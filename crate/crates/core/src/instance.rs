//! Domain types for flexible job-shop instances and scenario constraints.
//!
//! All indices are 0-based in memory. Every external format and every
//! human-readable message is 1-based.

use std::fmt;

use num_rational::Rational64;

/// Exact time value used for start/end times and model coefficients.
pub type Time = Rational64;

/// One eligible (machine, processing time) pair of a subtask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineOption {
    pub machine: usize,
    pub time: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Subtask {
    pub options: Vec<MachineOption>,
}

impl Subtask {
    pub fn new(options: impl IntoIterator<Item = (usize, i64)>) -> Self {
        Subtask {
            options: options
                .into_iter()
                .map(|(machine, time)| MachineOption { machine, time })
                .collect(),
        }
    }

    /// Processing time on `machine`, if eligible.
    pub fn time_on(&self, machine: usize) -> Option<i64> {
        self.options
            .iter()
            .find(|o| o.machine == machine)
            .map(|o| o.time)
    }

    pub fn min_time(&self) -> i64 {
        self.options.iter().map(|o| o.time).min().unwrap_or(0)
    }

    pub fn max_time(&self) -> i64 {
        self.options.iter().map(|o| o.time).max().unwrap_or(0)
    }

    /// Eligible machines in ascending index order.
    pub fn machines(&self) -> Vec<usize> {
        let mut ms: Vec<usize> = self.options.iter().map(|o| o.machine).collect();
        ms.sort_unstable();
        ms
    }

    pub fn shares_machine(&self, other: &Subtask) -> bool {
        self.options.iter().any(|o| other.time_on(o.machine).is_some())
    }
}

/// A job: subtasks in mandatory processing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Job {
    pub subtasks: Vec<Subtask>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub machine_count: usize,
}

impl Instance {
    pub fn new(machine_count: usize, jobs: Vec<Job>) -> Self {
        Instance { jobs, machine_count }
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn subtask(&self, job: usize, pos: usize) -> &Subtask {
        &self.jobs[job].subtasks[pos]
    }

    pub fn subtask_count(&self) -> usize {
        self.jobs.iter().map(|j| j.subtasks.len()).sum()
    }

    /// Iterates `(job, position, subtask)` in ascending order.
    pub fn subtasks(&self) -> impl Iterator<Item = (usize, usize, &Subtask)> {
        self.jobs.iter().enumerate().flat_map(|(i, job)| {
            job.subtasks
                .iter()
                .enumerate()
                .map(move |(j, s)| (i, j, s))
        })
    }
}

/// The six scenario constraint families. Job and subtask indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioConstraint {
    /// Job may not start before `t`.
    Release { job: usize, t: i64 },
    /// Job must complete by `t`.
    Deadline { job: usize, t: i64 },
    /// Job must start within `[t1, t2]`.
    Window { job: usize, t1: i64, t2: i64 },
    /// At least `t` idle units between completion of `subtask` and start of the next.
    MinGap { job: usize, subtask: usize, t: i64 },
    /// The next subtask starts at most `t` units after `subtask` completes.
    MaxGap { job: usize, subtask: usize, t: i64 },
    /// Both jobs complete at the same time.
    Sync { first: usize, second: usize },
}

impl ScenarioConstraint {
    pub fn keyword(&self) -> &'static str {
        match self {
            ScenarioConstraint::Release { .. } => "release",
            ScenarioConstraint::Deadline { .. } => "deadline",
            ScenarioConstraint::Window { .. } => "window",
            ScenarioConstraint::MinGap { .. } => "min_gap",
            ScenarioConstraint::MaxGap { .. } => "max_gap",
            ScenarioConstraint::Sync { .. } => "sync",
        }
    }
}

/// Start/end of one subtask in a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScheduledOp {
    pub job: usize,
    pub subtask: usize,
    pub machine: usize,
    pub start: Time,
    pub end: Time,
}

/// A complete schedule; `ops` is ordered by (job, subtask).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub ops: Vec<ScheduledOp>,
    pub makespan: Time,
}

impl Schedule {
    pub fn get(&self, job: usize, subtask: usize) -> Option<&ScheduledOp> {
        self.ops
            .iter()
            .find(|o| o.job == job && o.subtask == subtask)
    }

    /// Machine index per op in (job, subtask) order.
    pub fn assignment_vector(&self) -> Vec<usize> {
        self.ops.iter().map(|o| o.machine).collect()
    }
}

/// An invariant violation found by [`validate_instance`] or [`validate_constraints`].
///
/// Indices are stored 0-based and printed 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoMachines,
    NoJobs,
    EmptyJob { job: usize },
    EmptyEligibleSet { job: usize, subtask: usize },
    MachineOutOfRange { job: usize, subtask: usize, option: usize, machine: usize },
    DuplicateMachine { job: usize, subtask: usize, machine: usize },
    NonPositiveTime { job: usize, subtask: usize, option: usize },
    /// Constraint number `index` names a job that does not exist.
    UnknownJob { index: usize, job: usize },
    UnknownSubtask { index: usize, job: usize, subtask: usize },
    NoNextSubtask { index: usize, job: usize, subtask: usize },
    NegativeTime { index: usize },
    NonPositiveDeadline { index: usize },
    WindowReversed { index: usize },
    SyncSameJob { index: usize },
}

impl Violation {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NoMachines => "NoMachines",
            Violation::NoJobs => "NoJobs",
            Violation::EmptyJob { .. } => "EmptyJob",
            Violation::EmptyEligibleSet { .. } => "EmptyEligibleSet",
            Violation::MachineOutOfRange { .. } => "MachineOutOfRange",
            Violation::DuplicateMachine { .. } => "DuplicateMachine",
            Violation::NonPositiveTime { .. } => "NonPositiveTime",
            Violation::UnknownJob { .. } => "UnknownJob",
            Violation::UnknownSubtask { .. } => "UnknownSubtask",
            Violation::NoNextSubtask { .. } => "NoNextSubtask",
            Violation::NegativeTime { .. } => "NegativeTime",
            Violation::NonPositiveDeadline { .. } => "NonPositiveDeadline",
            Violation::WindowReversed { .. } => "WindowReversed",
            Violation::SyncSameJob { .. } => "SyncSameJob",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match *self {
            Violation::NoMachines => write!(f, "machine count must be at least 1"),
            Violation::NoJobs => write!(f, "instance has no jobs"),
            Violation::EmptyJob { job } => write!(f, "job {} has no subtasks", job + 1),
            Violation::EmptyEligibleSet { job, subtask } => {
                write!(f, "subtask {}.{} has no eligible machine", job + 1, subtask + 1)
            }
            Violation::MachineOutOfRange { job, subtask, option, machine } => write!(
                f,
                "subtask {}.{} option {} names machine {} outside the machine range",
                job + 1,
                subtask + 1,
                option + 1,
                machine + 1
            ),
            Violation::DuplicateMachine { job, subtask, machine } => write!(
                f,
                "subtask {}.{} lists machine {} more than once",
                job + 1,
                subtask + 1,
                machine + 1
            ),
            Violation::NonPositiveTime { job, subtask, option } => write!(
                f,
                "subtask {}.{} option {} has a non-positive processing time",
                job + 1,
                subtask + 1,
                option + 1
            ),
            Violation::UnknownJob { index, job } => {
                write!(f, "constraint {} refers to unknown job {}", index + 1, job + 1)
            }
            Violation::UnknownSubtask { index, job, subtask } => write!(
                f,
                "constraint {} refers to unknown subtask {}.{}",
                index + 1,
                job + 1,
                subtask + 1
            ),
            Violation::NoNextSubtask { index, job, subtask } => write!(
                f,
                "constraint {}: subtask {}.{} has no next subtask",
                index + 1,
                job + 1,
                subtask + 1
            ),
            Violation::NegativeTime { index } => {
                write!(f, "constraint {} has a negative time parameter", index + 1)
            }
            Violation::NonPositiveDeadline { index } => {
                write!(f, "constraint {}: deadline must be positive", index + 1)
            }
            Violation::WindowReversed { index } => {
                write!(f, "constraint {}: window start exceeds window end", index + 1)
            }
            Violation::SyncSameJob { index } => {
                write!(f, "constraint {}: sync requires two distinct jobs", index + 1)
            }
        }
    }
}

pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    if instance.machine_count == 0 {
        out.push(Violation::NoMachines);
    }
    if instance.jobs.is_empty() {
        out.push(Violation::NoJobs);
    }
    for (i, job) in instance.jobs.iter().enumerate() {
        if job.subtasks.is_empty() {
            out.push(Violation::EmptyJob { job: i });
        }
        for (j, sub) in job.subtasks.iter().enumerate() {
            if sub.options.is_empty() {
                out.push(Violation::EmptyEligibleSet { job: i, subtask: j });
            }
            for (k, opt) in sub.options.iter().enumerate() {
                if opt.machine >= instance.machine_count {
                    out.push(Violation::MachineOutOfRange {
                        job: i,
                        subtask: j,
                        option: k,
                        machine: opt.machine,
                    });
                }
                if sub.options[..k].iter().any(|o| o.machine == opt.machine) {
                    out.push(Violation::DuplicateMachine {
                        job: i,
                        subtask: j,
                        machine: opt.machine,
                    });
                }
                if opt.time <= 0 {
                    out.push(Violation::NonPositiveTime { job: i, subtask: j, option: k });
                }
            }
        }
    }
    out
}

pub fn validate_constraints(instance: &Instance, cs: &[ScenarioConstraint]) -> Vec<Violation> {
    let mut out = Vec::new();
    let job_ok = |index: usize, job: usize, out: &mut Vec<Violation>| {
        let ok = job < instance.jobs.len();
        if !ok {
            out.push(Violation::UnknownJob { index, job });
        }
        ok
    };
    for (index, c) in cs.iter().enumerate() {
        match *c {
            ScenarioConstraint::Release { job, t } => {
                job_ok(index, job, &mut out);
                if t < 0 {
                    out.push(Violation::NegativeTime { index });
                }
            }
            ScenarioConstraint::Deadline { job, t } => {
                job_ok(index, job, &mut out);
                if t <= 0 {
                    out.push(Violation::NonPositiveDeadline { index });
                }
            }
            ScenarioConstraint::Window { job, t1, t2 } => {
                job_ok(index, job, &mut out);
                if t1 < 0 || t2 < 0 {
                    out.push(Violation::NegativeTime { index });
                }
                if t1 > t2 {
                    out.push(Violation::WindowReversed { index });
                }
            }
            ScenarioConstraint::MinGap { job, subtask, t }
            | ScenarioConstraint::MaxGap { job, subtask, t } => {
                if job_ok(index, job, &mut out) {
                    let n = instance.jobs[job].subtasks.len();
                    if subtask >= n {
                        out.push(Violation::UnknownSubtask { index, job, subtask });
                    } else if subtask + 1 >= n {
                        out.push(Violation::NoNextSubtask { index, job, subtask });
                    }
                }
                if t < 0 {
                    out.push(Violation::NegativeTime { index });
                }
            }
            ScenarioConstraint::Sync { first, second } => {
                job_ok(index, first, &mut out);
                job_ok(index, second, &mut out);
                if first == second {
                    out.push(Violation::SyncSameJob { index });
                }
            }
        }
    }
    out
}

/// Big-M value: a finite upper bound on every start and completion time of
/// at least one optimal schedule.
///
/// H = Σ max pt + Σ min-gap t + Σ max-gap t + max(0, release t, window t2, deadline t)
pub fn horizon(instance: &Instance, cs: &[ScenarioConstraint]) -> i64 {
    let work: i64 = instance.subtasks().map(|(_, _, s)| s.max_time()).sum();
    let mut gaps = 0;
    let mut latest = 0;
    for c in cs {
        match *c {
            ScenarioConstraint::MinGap { t, .. } | ScenarioConstraint::MaxGap { t, .. } => gaps += t,
            ScenarioConstraint::Release { t, .. } | ScenarioConstraint::Deadline { t, .. } => {
                latest = latest.max(t)
            }
            ScenarioConstraint::Window { t2, .. } => latest = latest.max(t2),
            ScenarioConstraint::Sync { .. } => {}
        }
    }
    work + gaps + latest
}
