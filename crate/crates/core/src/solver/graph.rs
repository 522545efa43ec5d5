//! Difference constraints over start times, solved as longest paths.
//!
//! Each edge `(u, v, w)` encodes `x[v] >= x[u] + w`. Node 0 is the time
//! origin; op `o` is node `o + 1`; the completion of job `i` is node
//! `ops + i + 1`. A feasible system has no positive cycle and its least
//! solution is the longest-path distance from the origin.

use std::fmt;

use crate::instance::{Instance, ScenarioConstraint};

/// Flattened, read-only view of an instance used by every search routine.
#[derive(Debug, Clone)]
pub(crate) struct Problem<'a> {
    pub instance: &'a Instance,
    pub constraints: &'a [ScenarioConstraint],
    pub ops: Vec<Op>,
    /// Index of the first op of each job; `job_start[n]` is the op count.
    pub job_start: Vec<usize>,
    /// Mandatory idle time after each op (largest min-gap), 0 if none.
    pub gap_after: Vec<i64>,
    /// Least time from the end of each op to its job's completion.
    pub min_tail: Vec<i64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Op {
    pub job: usize,
    pub pos: usize,
    /// `(machine, time)` sorted by machine.
    pub options: Vec<(usize, i64)>,
    pub min_time: i64,
    pub max_time: i64,
}

impl<'a> Problem<'a> {
    pub fn new(instance: &'a Instance, constraints: &'a [ScenarioConstraint]) -> Self {
        let mut ops = Vec::new();
        let mut job_start = Vec::with_capacity(instance.jobs.len() + 1);
        for (i, job) in instance.jobs.iter().enumerate() {
            job_start.push(ops.len());
            for (j, sub) in job.subtasks.iter().enumerate() {
                let mut options: Vec<(usize, i64)> = sub.options.iter().map(|o| (o.machine, o.time)).collect();
                options.sort_unstable();
                ops.push(Op { job: i, pos: j, options, min_time: sub.min_time(), max_time: sub.max_time() });
            }
        }
        job_start.push(ops.len());
        let mut gap_after = vec![0; ops.len()];
        for c in constraints {
            if let ScenarioConstraint::MinGap { job, subtask, t } = *c {
                let o = job_start[job] + subtask;
                gap_after[o] = gap_after[o].max(t);
            }
        }
        let mut min_tail = vec![0; ops.len()];
        for i in 0..instance.jobs.len() {
            let mut acc = 0;
            for o in (job_start[i]..job_start[i + 1]).rev() {
                min_tail[o] = acc + gap_after[o];
                acc = min_tail[o] + ops[o].min_time;
            }
        }
        Problem { instance, constraints, ops, job_start, gap_after, min_tail }
    }

    pub fn op_index(&self, job: usize, pos: usize) -> usize {
        self.job_start[job] + pos
    }

    pub fn first_op(&self, job: usize) -> usize {
        self.job_start[job]
    }

    pub fn last_op(&self, job: usize) -> usize {
        self.job_start[job + 1] - 1
    }

    pub fn job_count(&self) -> usize {
        self.job_start.len() - 1
    }

    pub fn node_count(&self) -> usize {
        1 + self.ops.len() + self.job_count()
    }

    pub fn completion_node(&self, job: usize) -> usize {
        1 + self.ops.len() + job
    }

    /// Builds the constraint graph. `times[o]` is the `(shortest, longest)`
    /// possible duration of op `o`, equal when the op is assigned.
    /// `sequences` lists the ops on each machine in processing order.
    pub fn graph(&self, times: &[(i64, i64)], sequences: &[Vec<usize>]) -> DiffGraph {
        let mut g = DiffGraph::new(self.node_count());
        let node = |o: usize| o + 1;
        for o in 0..self.ops.len() {
            g.push(0, node(o), 0, EdgeOrigin::NonNegative { op: o });
        }
        for c in self.constraints {
            match *c {
                ScenarioConstraint::Release { job, t } => {
                    g.push(0, node(self.first_op(job)), t, EdgeOrigin::Release { job })
                }
                ScenarioConstraint::Window { job, t1, t2 } => {
                    g.push(0, node(self.first_op(job)), t1, EdgeOrigin::WindowLo { job });
                    g.push(node(self.first_op(job)), 0, -t2, EdgeOrigin::WindowHi { job });
                }
                _ => {}
            }
        }
        for i in 0..self.job_count() {
            #[allow(clippy::needless_range_loop)]
            for o in self.job_start[i]..self.job_start[i + 1] - 1 {
                g.push(node(o), node(o + 1), times[o].0 + self.gap_after[o], EdgeOrigin::Precedence { op: o });
            }
            let last = self.last_op(i);
            let c = self.completion_node(i);
            g.push(node(last), c, times[last].0, EdgeOrigin::CompletionLo { job: i });
            g.push(c, node(last), -times[last].1, EdgeOrigin::CompletionHi { job: i });
        }
        for c in self.constraints {
            match *c {
                ScenarioConstraint::Deadline { job, t } => {
                    g.push(self.completion_node(job), 0, -t, EdgeOrigin::Deadline { job })
                }
                ScenarioConstraint::MaxGap { job, subtask, t } => {
                    let o = self.op_index(job, subtask);
                    g.push(node(o + 1), node(o), -(times[o].1 + t), EdgeOrigin::MaxGap { op: o });
                }
                ScenarioConstraint::Sync { first, second } => {
                    let (a, b) = (self.completion_node(first), self.completion_node(second));
                    g.push(a, b, 0, EdgeOrigin::Sync { first, second });
                    g.push(b, a, 0, EdgeOrigin::Sync { first, second });
                }
                _ => {}
            }
        }
        for (machine, seq) in sequences.iter().enumerate() {
            for w in seq.windows(2) {
                g.push(node(w[0]), node(w[1]), times[w[0]].0, EdgeOrigin::Sequence { machine, before: w[0], after: w[1] });
            }
        }
        g
    }

    /// Human-readable name of an edge, 1-based.
    pub fn edge_name(&self, origin: &EdgeOrigin) -> String {
        let op = |o: usize| format!("{}.{}", self.ops[o].job + 1, self.ops[o].pos + 1);
        match *origin {
            EdgeOrigin::NonNegative { op: o } => format!("nonneg[{}]", op(o)),
            EdgeOrigin::Release { job } => format!("release[{}]", job + 1),
            EdgeOrigin::WindowLo { job } => format!("window_lo[{}]", job + 1),
            EdgeOrigin::WindowHi { job } => format!("window_hi[{}]", job + 1),
            EdgeOrigin::Deadline { job } => format!("deadline[{}]", job + 1),
            EdgeOrigin::Precedence { op: o } => format!("precedence[{}]", op(o)),
            EdgeOrigin::MaxGap { op: o } => format!("max_gap[{}]", op(o)),
            EdgeOrigin::CompletionLo { job } | EdgeOrigin::CompletionHi { job } => {
                format!("completion[{}]", job + 1)
            }
            EdgeOrigin::Sync { first, second } => format!("sync[{},{}]", first + 1, second + 1),
            EdgeOrigin::Sequence { machine, before, after } => {
                format!("sequence[m{}:{}<{}]", machine + 1, op(before), op(after))
            }
        }
    }
}

/// Which model constraint produced an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EdgeOrigin {
    NonNegative { op: usize },
    Release { job: usize },
    WindowLo { job: usize },
    WindowHi { job: usize },
    Deadline { job: usize },
    Precedence { op: usize },
    MaxGap { op: usize },
    CompletionLo { job: usize },
    CompletionHi { job: usize },
    Sync { first: usize, second: usize },
    Sequence { machine: usize, before: usize, after: usize },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: i64,
    pub origin: EdgeOrigin,
}

#[derive(Debug, Clone)]
pub(crate) struct DiffGraph {
    nodes: usize,
    edges: Vec<Edge>,
}

/// A positive cycle: the constraints on it cannot hold together.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PositiveCycle(pub Vec<EdgeOrigin>);

impl fmt::Display for PositiveCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "positive cycle of {} constraints", self.0.len())
    }
}

const UNREACHED: i64 = i64::MIN;

impl DiffGraph {
    pub fn new(nodes: usize) -> Self {
        DiffGraph { nodes, edges: Vec::new() }
    }

    pub fn push(&mut self, from: usize, to: usize, weight: i64, origin: EdgeOrigin) {
        self.edges.push(Edge { from, to, weight, origin });
    }

    /// Longest distances from node 0, or a positive cycle.
    ///
    /// Label-correcting passes over the edge list; a relaxation in pass
    /// `|V|` proves a positive cycle.
    pub fn longest_paths(&self) -> Result<Vec<i64>, PositiveCycle> {
        let n = self.nodes;
        let mut dist = vec![UNREACHED; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        dist[0] = 0;
        for pass in 0..n {
            let mut changed = None;
            for (e, edge) in self.edges.iter().enumerate() {
                let du = dist[edge.from];
                if du == UNREACHED {
                    continue;
                }
                let cand = du + edge.weight;
                if cand > dist[edge.to] {
                    dist[edge.to] = cand;
                    pred[edge.to] = Some(e);
                    changed = Some(edge.to);
                }
            }
            match changed {
                None => return Ok(dist),
                Some(v) if pass + 1 == n => return Err(self.cycle_through(v, &pred)),
                Some(_) => {}
            }
        }
        Ok(dist)
    }

    fn cycle_through(&self, start: usize, pred: &[Option<usize>]) -> PositiveCycle {
        // walking back |V| predecessor steps lands on the cycle
        let mut v = start;
        for _ in 0..self.nodes {
            v = self.edges[pred[v].expect("relaxed node has a predecessor")].from;
        }
        let anchor = v;
        let mut cycle = Vec::new();
        loop {
            let e = &self.edges[pred[v].expect("cycle node has a predecessor")];
            cycle.push(e.origin);
            v = e.from;
            if v == anchor {
                break;
            }
        }
        cycle.reverse();
        PositiveCycle(cycle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_distances() {
        let mut g = DiffGraph::new(3);
        g.push(0, 1, 2, EdgeOrigin::Release { job: 0 });
        g.push(1, 2, 3, EdgeOrigin::Precedence { op: 0 });
        g.push(0, 2, 1, EdgeOrigin::Release { job: 1 });
        assert_eq!(g.longest_paths().unwrap(), vec![0, 2, 5]);
    }

    #[test]
    fn negative_back_edge_is_feasible() {
        let mut g = DiffGraph::new(3);
        g.push(0, 1, 0, EdgeOrigin::NonNegative { op: 0 });
        g.push(1, 2, 3, EdgeOrigin::Precedence { op: 0 });
        g.push(2, 0, -3, EdgeOrigin::Deadline { job: 0 });
        assert_eq!(g.longest_paths().unwrap(), vec![0, 0, 3]);
    }

    #[test]
    fn positive_cycle_reports_its_edges() {
        let mut g = DiffGraph::new(3);
        g.push(0, 1, 0, EdgeOrigin::NonNegative { op: 0 });
        g.push(1, 2, 5, EdgeOrigin::Precedence { op: 0 });
        g.push(2, 0, -4, EdgeOrigin::Deadline { job: 0 });
        let cycle = g.longest_paths().unwrap_err();
        assert_eq!(cycle.0.len(), 3);
        assert!(cycle.0.contains(&EdgeOrigin::Deadline { job: 0 }));
        assert!(cycle.0.contains(&EdgeOrigin::Precedence { op: 0 }));
    }
}
