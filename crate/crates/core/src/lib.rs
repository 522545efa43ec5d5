//! Flexible job-shop model compiler and exact solver.
//!
//! Instances and scenario constraints are parsed from text ([`dsl`]),
//! compiled to a big-M MILP ([`milp`]) and emitted as LP or JSON ([`lp`]),
//! or solved exactly by branch-and-bound ([`solver`]). [`cli`] wires these
//! into the `skedc` binary.

pub mod bench;
pub mod cli;
pub mod dsl;
pub mod gantt;
pub mod instance;
pub mod lp;
pub mod milp;
pub mod random;
pub mod schedule_json;
pub mod solver;

pub use instance::{Instance, Job, MachineOption, ScenarioConstraint, Schedule, ScheduledOp, Subtask, Time};
