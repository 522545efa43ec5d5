//! Compiles an instance plus scenario constraints into an explicit MILP.
//!
//! Variables:
//! - `X(i,j,k)` binary, subtask (i,j) runs on machine k, one per eligible machine
//! - `Y(i,j,i',j')` binary, (i,j) precedes (i',j'), for i < i' sharing a machine
//! - `B(i,j)` continuous start time, lower bound 0
//! - `Cmax` continuous makespan, lower bound 0
//!
//! Row families, in emission order: assignment, precedence, both disjunctive
//! halves, makespan, then one group per scenario constraint in input order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::instance::{horizon, Instance, Schedule, ScenarioConstraint, Time};

/// Identity of a model variable. Indices are 0-based.
///
/// The ordering is the variable-table order: per subtask in (job, subtask)
/// order its `B` followed by its `X` by ascending machine, then all `Y`
/// lexicographically, then `Cmax`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKey {
    X { job: usize, subtask: usize, machine: usize },
    Y { job: usize, subtask: usize, other_job: usize, other_subtask: usize },
    B { job: usize, subtask: usize },
    Cmax,
}

impl VarKey {
    fn sort_key(&self) -> (u8, usize, usize, usize, usize, usize) {
        match *self {
            VarKey::B { job, subtask } => (0, job, subtask, 0, 0, 0),
            VarKey::X { job, subtask, machine } => (0, job, subtask, 1, machine, 0),
            VarKey::Y { job, subtask, other_job, other_subtask } => (1, job, subtask, other_job, other_subtask, 0),
            VarKey::Cmax => (2, 0, 0, 0, 0, 0),
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, VarKey::X { .. } | VarKey::Y { .. })
    }
}

impl Ord for VarKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for VarKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    ContinuousNonNeg,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub key: VarKey,
    pub kind: VarKind,
    pub lower: Time,
}

impl Var {
    fn of(key: VarKey) -> Self {
        let kind = if key.is_binary() { VarKind::Binary } else { VarKind::ContinuousNonNeg };
        Var { key, kind, lower: Time::zero() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Assignment,
    Precedence,
    DisjunctiveA,
    DisjunctiveB,
    Makespan,
    Release,
    Deadline,
    WindowLo,
    WindowHi,
    MinGap,
    MaxGap,
    SyncEq,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::Assignment,
        Family::Precedence,
        Family::DisjunctiveA,
        Family::DisjunctiveB,
        Family::Makespan,
        Family::Release,
        Family::Deadline,
        Family::WindowLo,
        Family::WindowHi,
        Family::MinGap,
        Family::MaxGap,
        Family::SyncEq,
    ];

    /// Lowercase tag used in row names.
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Assignment => "assignment",
            Family::Precedence => "precedence",
            Family::DisjunctiveA => "disjunctivea",
            Family::DisjunctiveB => "disjunctiveb",
            Family::Makespan => "makespan",
            Family::Release => "release",
            Family::Deadline => "deadline",
            Family::WindowLo => "windowlo",
            Family::WindowHi => "windowhi",
            Family::MinGap => "mingap",
            Family::MaxGap => "maxgap",
            Family::SyncEq => "synceq",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// `Σ coef·var  sense  rhs`; terms are in variable-table order with no
/// duplicates and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub terms: Vec<(Time, VarKey)>,
    pub sense: Sense,
    pub rhs: Time,
    pub family: Family,
}

impl LinearConstraint {
    pub fn lhs_value(&self, point: &BTreeMap<VarKey, Time>) -> Time {
        self.terms
            .iter()
            .map(|(c, v)| *c * point.get(v).copied().unwrap_or_else(Time::zero))
            .sum()
    }

    /// Exact satisfaction check; missing variables read as 0.
    pub fn is_satisfied(&self, point: &BTreeMap<VarKey, Time>) -> bool {
        let lhs = self.lhs_value(point);
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }

    pub fn coefficient(&self, key: &VarKey) -> Option<Time> {
        self.terms.iter().find(|(_, v)| v == key).map(|(c, _)| *c)
    }
}

/// Accumulates a linear expression, merging repeated variables.
#[derive(Default)]
struct Row {
    terms: BTreeMap<VarKey, Time>,
}

impl Row {
    fn add(&mut self, coef: impl Into<Time>, key: VarKey) -> &mut Self {
        *self.terms.entry(key).or_insert_with(Time::zero) += coef.into();
        self
    }

    /// Adds `Σ_k pt·X(i,j,k)`, the processing time of subtask (i,j).
    fn add_duration(&mut self, instance: &Instance, job: usize, subtask: usize, sign: i64) -> &mut Self {
        for o in &instance.subtask(job, subtask).options {
            self.add(sign * o.time, VarKey::X { job, subtask, machine: o.machine });
        }
        self
    }

    /// Adds the completion expression `B(i,j) + Σ pt·X(i,j,k)`.
    fn add_completion(&mut self, instance: &Instance, job: usize, subtask: usize, sign: i64) -> &mut Self {
        self.add(sign, VarKey::B { job, subtask });
        self.add_duration(instance, job, subtask, sign)
    }

    /// `self sense rhs`, dropping cancelled terms.
    fn finish(&self, sense: Sense, rhs: impl Into<Time>, family: Family) -> LinearConstraint {
        LinearConstraint {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (*c, *k))
                .collect(),
            sense,
            rhs: rhs.into(),
            family,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MilpModel {
    pub vars: Vec<Var>,
    pub constraints: Vec<LinearConstraint>,
    /// The big-M constant, equal to the instance horizon.
    pub big_m: i64,
}

/// Per-family and per-kind counts of a model.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelCounts {
    pub x: usize,
    pub y: usize,
    pub b: usize,
    pub cmax: usize,
    pub rows: BTreeMap<Family, usize>,
}

impl ModelCounts {
    pub fn rows(&self, family: Family) -> usize {
        self.rows.get(&family).copied().unwrap_or(0)
    }
}

impl MilpModel {
    pub fn objective(&self) -> VarKey {
        VarKey::Cmax
    }

    pub fn counts(&self) -> ModelCounts {
        let mut c = ModelCounts::default();
        for v in &self.vars {
            match v.key {
                VarKey::X { .. } => c.x += 1,
                VarKey::Y { .. } => c.y += 1,
                VarKey::B { .. } => c.b += 1,
                VarKey::Cmax => c.cmax += 1,
            }
        }
        for row in &self.constraints {
            *c.rows.entry(row.family).or_default() += 1;
        }
        c
    }

    /// Names of rows as `<family tag>_<ordinal within family>`, in model order.
    pub fn row_names(&self) -> Vec<String> {
        let mut seen: BTreeMap<Family, usize> = BTreeMap::new();
        self.constraints
            .iter()
            .map(|row| {
                let n = seen.entry(row.family).or_default();
                *n += 1;
                format!("{}_{}", row.family.tag(), n)
            })
            .collect()
    }

    /// Indices of rows violated by `point` (exact arithmetic).
    pub fn violated_rows(&self, point: &BTreeMap<VarKey, Time>) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, row)| !row.is_satisfied(point))
            .map(|(i, _)| i)
            .collect()
    }

    /// Variables in `point` that violate their bounds or integrality.
    pub fn violated_bounds(&self, point: &BTreeMap<VarKey, Time>) -> Vec<VarKey> {
        self.vars
            .iter()
            .filter(|var| {
                let v = point.get(&var.key).copied().unwrap_or_else(Time::zero);
                v < var.lower
                    || (var.kind == VarKind::Binary && !(v.is_zero() || v.is_one()))
            })
            .map(|var| var.key)
            .collect()
    }
}

/// All variables of the model for `instance`, in table order.
pub fn variables(instance: &Instance) -> Vec<Var> {
    let mut keys = Vec::new();
    for (i, j, sub) in instance.subtasks() {
        keys.push(VarKey::B { job: i, subtask: j });
        for k in sub.machines() {
            keys.push(VarKey::X { job: i, subtask: j, machine: k });
        }
    }
    for (i, j, a) in instance.subtasks() {
        for (i2, j2, b) in instance.subtasks() {
            if i < i2 && a.shares_machine(b) {
                keys.push(VarKey::Y { job: i, subtask: j, other_job: i2, other_subtask: j2 });
            }
        }
    }
    keys.push(VarKey::Cmax);
    keys.into_iter().map(Var::of).collect()
}

/// One row per subtask: `Σ_k X(i,j,k) = 1`.
pub fn assignment_rows(instance: &Instance) -> Vec<LinearConstraint> {
    instance
        .subtasks()
        .map(|(i, j, sub)| {
            let mut row = Row::default();
            for k in sub.machines() {
                row.add(1, VarKey::X { job: i, subtask: j, machine: k });
            }
            row.finish(Sense::Eq, 1, Family::Assignment)
        })
        .collect()
}

/// Largest min-gap after subtask (i,j), 0 if none.
fn min_gap(cs: &[ScenarioConstraint], job: usize, subtask: usize) -> i64 {
    cs.iter()
        .filter_map(|c| match *c {
            ScenarioConstraint::MinGap { job: i, subtask: j, t } if i == job && j == subtask => Some(t),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Chain rows `B(i,j) + Σ pt·X(i,j,k) + gap ≤ B(i,j+1)`; min-gaps fold into the row.
pub fn precedence_rows(instance: &Instance, cs: &[ScenarioConstraint]) -> Vec<LinearConstraint> {
    let mut rows = Vec::new();
    for (i, job) in instance.jobs.iter().enumerate() {
        for j in 0..job.subtasks.len().saturating_sub(1) {
            let mut row = Row::default();
            row.add_completion(instance, i, j, 1).add(-1, VarKey::B { job: i, subtask: j + 1 });
            rows.push(row.finish(Sense::Le, -min_gap(cs, i, j), Family::Precedence));
        }
    }
    rows
}

/// Rows for one maximum gap: `B(i,j) + Σ pt·X(i,j,k) - B(i,j+1) ≥ -t`.
fn max_gap_row(instance: &Instance, job: usize, subtask: usize, t: i64) -> LinearConstraint {
    let mut row = Row::default();
    row.add_completion(instance, job, subtask, 1).add(-1, VarKey::B { job, subtask: subtask + 1 });
    row.finish(Sense::Ge, -t, Family::MaxGap)
}

/// Big-M disjunctive pairs. Returns `(A rows, B rows)`, paired index by index.
pub fn disjunctive_rows(instance: &Instance, big_m: i64) -> (Vec<LinearConstraint>, Vec<LinearConstraint>) {
    let mut rows_a = Vec::new();
    let mut rows_b = Vec::new();
    for (i, j, a) in instance.subtasks() {
        for (i2, j2, b) in instance.subtasks() {
            if i >= i2 {
                continue;
            }
            let y = VarKey::Y { job: i, subtask: j, other_job: i2, other_subtask: j2 };
            for k in a.machines() {
                let Some(pt_b) = b.time_on(k) else { continue };
                let pt_a = a.time_on(k).expect("eligible machine");
                let xa = VarKey::X { job: i, subtask: j, machine: k };
                let xb = VarKey::X { job: i2, subtask: j2, machine: k };
                let ba = VarKey::B { job: i, subtask: j };
                let bb = VarKey::B { job: i2, subtask: j2 };

                // B + pt·X ≤ B' + M(3 - Y - X - X')
                let mut row = Row::default();
                row.add(1, ba).add(pt_a, xa).add(-1, bb).add(big_m, y).add(big_m, xa).add(big_m, xb);
                rows_a.push(row.finish(Sense::Le, 3 * big_m, Family::DisjunctiveA));

                // B' + pt'·X' ≤ B + M(2 + Y - X - X')
                let mut row = Row::default();
                row.add(1, bb).add(pt_b, xb).add(-1, ba).add(-big_m, y).add(big_m, xa).add(big_m, xb);
                rows_b.push(row.finish(Sense::Le, 2 * big_m, Family::DisjunctiveB));
            }
        }
    }
    (rows_a, rows_b)
}

/// One row per job: completion of the last subtask ≤ Cmax.
pub fn makespan_rows(instance: &Instance) -> Vec<LinearConstraint> {
    instance
        .jobs
        .iter()
        .enumerate()
        .map(|(i, job)| {
            let mut row = Row::default();
            row.add_completion(instance, i, job.subtasks.len() - 1, 1).add(-1, VarKey::Cmax);
            row.finish(Sense::Le, 0, Family::Makespan)
        })
        .collect()
}

/// Rows for the scenario families in input order. Min-gaps produce no row
/// here; they shift the matching precedence row.
pub fn scenario_rows(instance: &Instance, cs: &[ScenarioConstraint]) -> Vec<LinearConstraint> {
    let last = |i: usize| instance.jobs[i].subtasks.len() - 1;
    let mut rows = Vec::new();
    for c in cs {
        match *c {
            ScenarioConstraint::Release { job, t } => {
                let mut row = Row::default();
                row.add(1, VarKey::B { job, subtask: 0 });
                rows.push(row.finish(Sense::Ge, t, Family::Release));
            }
            ScenarioConstraint::Deadline { job, t } => {
                let mut row = Row::default();
                row.add_completion(instance, job, last(job), 1);
                rows.push(row.finish(Sense::Le, t, Family::Deadline));
            }
            ScenarioConstraint::Window { job, t1, t2 } => {
                let mut row = Row::default();
                row.add(1, VarKey::B { job, subtask: 0 });
                rows.push(row.finish(Sense::Ge, t1, Family::WindowLo));
                rows.push(row.finish(Sense::Le, t2, Family::WindowHi));
            }
            ScenarioConstraint::MinGap { .. } => {}
            ScenarioConstraint::MaxGap { job, subtask, t } => rows.push(max_gap_row(instance, job, subtask, t)),
            ScenarioConstraint::Sync { first, second } => {
                let mut row = Row::default();
                row.add_completion(instance, first, last(first), 1)
                    .add_completion(instance, second, last(second), -1);
                rows.push(row.finish(Sense::Eq, 0, Family::SyncEq));
            }
        }
    }
    rows
}

/// Builds the full model. Inputs must be valid.
pub fn build_model(instance: &Instance, cs: &[ScenarioConstraint]) -> MilpModel {
    let big_m = horizon(instance, cs);
    let mut constraints = assignment_rows(instance);
    constraints.extend(precedence_rows(instance, cs));
    let (a, b) = disjunctive_rows(instance, big_m);
    constraints.extend(a);
    constraints.extend(b);
    constraints.extend(makespan_rows(instance));
    constraints.extend(scenario_rows(instance, cs));
    MilpModel { vars: variables(instance), constraints, big_m }
}

/// Maps a schedule to a model point: X from the assignment, B from starts,
/// Cmax from the makespan, and `Y = 1` iff (i,j) starts no later than (i',j').
pub fn embed_schedule(instance: &Instance, schedule: &Schedule) -> BTreeMap<VarKey, Time> {
    let mut point = BTreeMap::new();
    for op in &schedule.ops {
        point.insert(VarKey::B { job: op.job, subtask: op.subtask }, op.start);
        for m in instance.subtask(op.job, op.subtask).machines() {
            let v = if m == op.machine { Time::one() } else { Time::zero() };
            point.insert(VarKey::X { job: op.job, subtask: op.subtask, machine: m }, v);
        }
    }
    for var in variables(instance) {
        if let VarKey::Y { job, subtask, other_job, other_subtask } = var.key {
            let (Some(a), Some(b)) = (schedule.get(job, subtask), schedule.get(other_job, other_subtask)) else {
                continue;
            };
            let v = if a.start <= b.start { Time::one() } else { Time::zero() };
            point.insert(var.key, v);
        }
    }
    point.insert(VarKey::Cmax, schedule.makespan);
    point
}
