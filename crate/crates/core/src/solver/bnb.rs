//! Depth-first branch-and-bound over machine assignments, then over
//! insertion positions in the machine sequences.
//!
//! Every node is bounded by the longest-path relaxation of its partial
//! decisions (unassigned ops take their shortest duration on lower-bound
//! edges and their longest on upper-bound edges), a per-machine
//! head + load + tail bound, and the aggregate load over all machines.
//! A positive cycle in the relaxation closes the node.

use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use super::graph::Problem;
use super::{schedule_from_distances, SolveReport, SolveStatus};
use crate::instance::{Instance, ScenarioConstraint, Time};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    /// `None` searches until proof.
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Worker threads; 1 gives a bit-reproducible search.
    pub workers: usize,
    /// After a multi-worker proof, re-derive the incumbent the single-worker
    /// search would return.
    pub canonicalize: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { time_limit: Some(Duration::from_secs(100)), node_limit: None, workers: 1, canonicalize: false }
    }
}

const NO_INCUMBENT: i64 = i64::MAX;

#[derive(Debug, Clone)]
struct Incumbent {
    makespan: i64,
    /// Option index per op followed by insertion position per op; DFS order.
    key: Vec<usize>,
    machine_of: Vec<usize>,
    dist: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Interrupt {
    None,
    Time,
    Nodes,
    FirstLeaf,
}

struct Shared {
    best: AtomicI64,
    incumbent: Mutex<Option<Incumbent>>,
    nodes: AtomicU64,
    stop: AtomicBool,
    reason: Mutex<Interrupt>,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
    stop_at_first_leaf: bool,
}

impl Shared {
    fn new(deadline: Option<Instant>, node_limit: Option<u64>, cutoff: i64, stop_at_first_leaf: bool) -> Self {
        Shared {
            best: AtomicI64::new(cutoff),
            incumbent: Mutex::new(None),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            reason: Mutex::new(Interrupt::None),
            deadline,
            node_limit,
            stop_at_first_leaf,
        }
    }

    fn interrupt(&self, why: Interrupt) {
        let mut r = self.reason.lock().expect("reason lock");
        if *r == Interrupt::None {
            *r = why;
        }
        self.stop.store(true, Ordering::SeqCst);
    }

    fn reason(&self) -> Interrupt {
        *self.reason.lock().expect("reason lock")
    }

    fn offer(&self, cand: Incumbent) {
        let mut inc = self.incumbent.lock().expect("incumbent lock");
        let better = match inc.as_ref() {
            None => true,
            Some(cur) => (cand.makespan, &cand.key) < (cur.makespan, &cur.key),
        };
        if better {
            self.best.fetch_min(cand.makespan, Ordering::SeqCst);
            *inc = Some(cand);
        }
        drop(inc);
        if self.stop_at_first_leaf {
            self.interrupt(Interrupt::FirstLeaf);
        }
    }
}

struct Search<'a, 'p> {
    problem: &'a Problem<'p>,
    shared: &'a Shared,
    choice: Vec<Option<usize>>,
    position: Vec<usize>,
    sequences: Vec<Vec<usize>>,
    root_bound: i64,
    pending_nodes: u64,
}

/// Result of bounding one node.
enum Bound {
    Infeasible,
    Value { lower: i64, dist: Vec<i64> },
}

impl<'a, 'p> Search<'a, 'p> {
    fn new(problem: &'a Problem<'p>, shared: &'a Shared, root_bound: i64) -> Self {
        let n = problem.ops.len();
        Search {
            problem,
            shared,
            choice: vec![None; n],
            position: vec![0; n],
            sequences: vec![Vec::new(); problem.instance.machine_count],
            root_bound,
            pending_nodes: 0,
        }
    }

    fn machine(&self, o: usize) -> Option<(usize, i64)> {
        self.choice[o].map(|c| self.problem.ops[o].options[c])
    }

    fn bound(&self) -> Bound {
        let p = self.problem;
        let times: Vec<(i64, i64)> = (0..p.ops.len())
            .map(|o| match self.machine(o) {
                Some((_, t)) => (t, t),
                None => (p.ops[o].min_time, p.ops[o].max_time),
            })
            .collect();
        let Ok(dist) = p.graph(&times, &self.sequences).longest_paths() else {
            return Bound::Infeasible;
        };
        let mut lower = (0..p.job_count()).map(|i| dist[p.completion_node(i)]).max().unwrap_or(0);
        lower = lower.max(self.root_bound);

        let machines = p.instance.machine_count;
        let mut head = vec![i64::MAX; machines];
        let mut load = vec![0i64; machines];
        let mut tail = vec![i64::MAX; machines];
        for (o, op) in p.ops.iter().enumerate() {
            let on = match self.machine(o) {
                Some(mt) => Some(mt),
                None if op.options.len() == 1 => Some(op.options[0]),
                None => None,
            };
            if let Some((k, t)) = on {
                head[k] = head[k].min(dist[o + 1]);
                load[k] += t;
                tail[k] = tail[k].min(p.min_tail[o]);
            }
        }
        for k in 0..machines {
            if load[k] > 0 {
                lower = lower.max(head[k] + load[k] + tail[k]);
            }
        }
        let total: i64 = times.iter().map(|t| t.0).sum();
        let m = machines.max(1) as i64;
        lower = lower.max((total + m - 1) / m);
        Bound::Value { lower, dist }
    }

    fn stopped(&self) -> bool {
        self.shared.stop.load(Ordering::Relaxed)
    }

    fn count_node(&mut self) {
        self.pending_nodes += 1;
        if self.pending_nodes == 64 {
            self.flush_nodes();
        }
    }

    fn flush_nodes(&mut self) {
        let total = self.shared.nodes.fetch_add(self.pending_nodes, Ordering::Relaxed) + self.pending_nodes;
        self.pending_nodes = 0;
        if let Some(deadline) = self.shared.deadline {
            if Instant::now() >= deadline {
                self.shared.interrupt(Interrupt::Time);
            }
        }
        if let Some(limit) = self.shared.node_limit {
            if total >= limit {
                self.shared.interrupt(Interrupt::Nodes);
            }
        }
    }

    fn best(&self) -> i64 {
        self.shared.best.load(Ordering::SeqCst)
    }

    fn assign(&mut self, depth: usize) {
        if self.stopped() {
            return;
        }
        if depth == self.problem.ops.len() {
            self.sequence(0);
            return;
        }
        for c in 0..self.problem.ops[depth].options.len() {
            self.choice[depth] = Some(c);
            self.count_node();
            if let Bound::Value { lower, .. } = self.bound() {
                if lower < self.best() {
                    self.assign(depth + 1);
                }
            }
            if self.stopped() {
                break;
            }
        }
        self.choice[depth] = None;
    }

    fn sequence(&mut self, op: usize) {
        let (k, _) = self.machine(op).expect("all ops assigned before sequencing");
        let job = self.problem.ops[op].job;
        // ops of the same job were inserted earlier and must stay ahead
        let earliest = self.sequences[k]
            .iter()
            .rposition(|&o| self.problem.ops[o].job == job)
            .map_or(0, |p| p + 1);
        for pos in earliest..=self.sequences[k].len() {
            if self.stopped() {
                return;
            }
            self.sequences[k].insert(pos, op);
            self.position[op] = pos;
            self.count_node();
            if let Bound::Value { lower, dist } = self.bound() {
                if lower < self.best() {
                    if op + 1 == self.problem.ops.len() {
                        self.record(dist);
                    } else {
                        self.sequence(op + 1);
                    }
                }
            }
            self.sequences[k].remove(pos);
        }
    }

    fn record(&mut self, dist: Vec<i64>) {
        let p = self.problem;
        let makespan = (0..p.job_count()).map(|i| dist[p.completion_node(i)]).max().unwrap_or(0);
        let choice: Vec<usize> = self.choice.iter().map(|c| c.expect("assigned")).collect();
        let machine_of = (0..choice.len()).map(|o| self.problem.ops[o].options[choice[o]].0).collect();
        let mut key = choice;
        key.extend_from_slice(&self.position);
        self.shared.offer(Incumbent { makespan, key, machine_of, dist });
    }
}

/// Assignment prefixes for parallel workers, in DFS order.
fn frontier(problem: &Problem<'_>, shared: &Shared, root_bound: i64, target: usize) -> Vec<Vec<usize>> {
    let mut items: Vec<Vec<usize>> = vec![Vec::new()];
    let mut probe = Search::new(problem, shared, root_bound);
    for depth in 0..problem.ops.len() {
        if items.len() >= target {
            break;
        }
        let mut next = Vec::new();
        for prefix in &items {
            for c in 0..problem.ops[depth].options.len() {
                for (o, &pc) in prefix.iter().enumerate() {
                    probe.choice[o] = Some(pc);
                }
                probe.choice[depth] = Some(c);
                probe.count_node();
                if matches!(probe.bound(), Bound::Value { .. }) {
                    let mut p = prefix.clone();
                    p.push(c);
                    next.push(p);
                }
            }
        }
        probe.choice.iter_mut().for_each(|c| *c = None);
        items = next;
    }
    probe.flush_nodes();
    items
}

fn run(problem: &Problem<'_>, shared: &Shared, root_bound: i64, workers: usize) {
    if workers <= 1 {
        let mut s = Search::new(problem, shared, root_bound);
        s.assign(0);
        s.flush_nodes();
        return;
    }
    let items = frontier(problem, shared, root_bound, workers * 8);
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let mut s = Search::new(problem, shared, root_bound);
                loop {
                    let idx = next.fetch_add(1, Ordering::SeqCst);
                    let Some(prefix) = items.get(idx) else { break };
                    if s.stopped() {
                        break;
                    }
                    for (o, &c) in prefix.iter().enumerate() {
                        s.choice[o] = Some(c);
                    }
                    s.assign(prefix.len());
                    s.choice.iter_mut().for_each(|c| *c = None);
                }
                s.flush_nodes();
            });
        }
    });
}

/// Exact search for a minimum-makespan schedule.
///
/// Single-worker runs are deterministic: among optimal schedules the one
/// with the lexicographically smallest assignment vector is returned.
pub fn branch_and_bound(instance: &Instance, cs: &[ScenarioConstraint], options: &SolveOptions) -> SolveReport {
    let started = Instant::now();
    let deadline = options.time_limit.map(|d| started + d);
    let problem = Problem::new(instance, cs);
    let shared = Shared::new(deadline, options.node_limit, NO_INCUMBENT, false);

    let root = Search::new(&problem, &shared, 0);
    let root_bound = match root.bound() {
        Bound::Value { lower, .. } => lower,
        Bound::Infeasible => {
            let times: Vec<(i64, i64)> = problem.ops.iter().map(|o| (o.min_time, o.max_time)).collect();
            let witness = match problem.graph(&times, &[]).longest_paths() {
                Err(cycle) => cycle.0.iter().map(|e| problem.edge_name(e)).collect(),
                Ok(_) => Vec::new(),
            };
            return SolveReport {
                status: SolveStatus::Infeasible,
                best: None,
                lower_bound: Time::from_integer(0),
                nodes: 1,
                wall_time: started.elapsed(),
                witness,
            };
        }
    };
    shared.nodes.fetch_add(1, Ordering::Relaxed);
    if deadline.is_some_and(|d| Instant::now() >= d) {
        shared.interrupt(Interrupt::Time);
    } else {
        run(&problem, &shared, root_bound, options.workers.max(1));
    }

    let interrupted = shared.reason();
    let mut incumbent = shared.incumbent.lock().expect("incumbent lock").take();
    let mut nodes = shared.nodes.load(Ordering::SeqCst);

    if interrupted == Interrupt::None && options.canonicalize && options.workers > 1 {
        if let Some(found) = incumbent.as_ref() {
            let canon = Shared::new(deadline, None, found.makespan + 1, true);
            let mut s = Search::new(&problem, &canon, root_bound);
            s.assign(0);
            s.flush_nodes();
            nodes += canon.nodes.load(Ordering::SeqCst);
            let first = canon.incumbent.lock().expect("incumbent lock").take();
            if let Some(first) = first {
                debug_assert_eq!(first.makespan, found.makespan);
                incumbent = Some(first);
            }
        }
    }

    let best = incumbent
        .as_ref()
        .map(|inc| schedule_from_distances(&problem, &inc.machine_of, &inc.dist));
    let (status, lower) = match (interrupted, &incumbent) {
        (Interrupt::None, Some(inc)) => (SolveStatus::Optimal, inc.makespan),
        (Interrupt::None, None) => (SolveStatus::Infeasible, root_bound),
        (Interrupt::Nodes, Some(inc)) => (SolveStatus::Feasible, root_bound.min(inc.makespan)),
        (_, inc) => (SolveStatus::TimeLimit, inc.as_ref().map_or(root_bound, |i| root_bound.min(i.makespan))),
    };
    SolveReport {
        status,
        best,
        lower_bound: Time::from_integer(lower),
        nodes,
        wall_time: started.elapsed(),
        witness: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Job, Subtask};

    fn unlimited() -> SolveOptions {
        SolveOptions { time_limit: None, ..SolveOptions::default() }
    }

    #[test]
    fn chain_on_one_machine() {
        let inst = Instance::new(1, vec![Job { subtasks: vec![Subtask::new([(0, 3)]), Subtask::new([(0, 4)])] }]);
        let r = branch_and_bound(&inst, &[], &unlimited());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.makespan(), Some(Time::from_integer(7)));
        assert!(r.nodes >= 1);
    }

    #[test]
    fn zero_time_limit() {
        let inst = Instance::new(1, vec![Job { subtasks: vec![Subtask::new([(0, 3)])] }]);
        let r = branch_and_bound(&inst, &[], &SolveOptions { time_limit: Some(Duration::ZERO), ..unlimited() });
        assert_eq!(r.status, SolveStatus::TimeLimit);
        assert!(r.lower_bound >= Time::from_integer(0));
    }

    #[test]
    fn root_infeasible_has_witness() {
        let inst = Instance::new(1, vec![Job { subtasks: vec![Subtask::new([(0, 2)]), Subtask::new([(0, 3)])] }]);
        let r = branch_and_bound(&inst, &[ScenarioConstraint::Deadline { job: 0, t: 4 }], &unlimited());
        assert_eq!(r.status, SolveStatus::Infeasible);
        assert!(r.best.is_none());
        assert!(r.witness.iter().any(|w| w == "deadline[1]"), "{:?}", r.witness);
    }

    #[test]
    fn node_limit_reports_feasible() {
        let sub = Subtask::new([(0, 2), (1, 3)]);
        let inst = Instance::new(2, vec![Job { subtasks: vec![sub.clone(), sub.clone()] }; 3]);
        let r = branch_and_bound(&inst, &[], &SolveOptions { node_limit: Some(64), ..unlimited() });
        assert!(matches!(r.status, SolveStatus::Feasible | SolveStatus::TimeLimit | SolveStatus::Optimal));
        if let Some(best) = &r.best {
            assert!(r.lower_bound <= best.makespan);
        }
    }
}
