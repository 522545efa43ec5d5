//! Seeded random instances and scenario constraints for property tests and
//! benchmark generation.

use std::ops::RangeInclusive;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Job, ScenarioConstraint, Subtask};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSpec {
    pub jobs: RangeInclusive<usize>,
    pub subtasks: RangeInclusive<usize>,
    pub machines: RangeInclusive<usize>,
    pub time: RangeInclusive<i64>,
    /// Upper bound on eligible machines per subtask; `None` allows all.
    pub max_options: Option<usize>,
    /// Chance that each scenario family contributes one constraint.
    pub family_probability: f64,
}

impl Default for RandomSpec {
    /// Small cases: ≤3 jobs, ≤3 subtasks per job, ≤3 machines, times 1..=9.
    fn default() -> Self {
        RandomSpec {
            jobs: 1..=3,
            subtasks: 1..=3,
            machines: 1..=3,
            time: 1..=9,
            max_options: None,
            family_probability: 0.3,
        }
    }
}

/// The generator used everywhere a seed is given.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_instance(rng: &mut impl Rng, spec: &RandomSpec) -> Instance {
    let m = rng.gen_range(spec.machines.clone());
    let n = rng.gen_range(spec.jobs.clone());
    let cap = spec.max_options.unwrap_or(m).clamp(1, m);
    let jobs = (0..n)
        .map(|_| {
            let len = rng.gen_range(spec.subtasks.clone());
            let subtasks = (0..len)
                .map(|_| {
                    let k = rng.gen_range(1..=cap);
                    let mut machines = sample(rng, m, k).into_vec();
                    machines.sort_unstable();
                    Subtask::new(machines.into_iter().map(|mk| (mk, rng.gen_range(spec.time.clone()))).collect::<Vec<_>>())
                })
                .collect();
            Job { subtasks }
        })
        .collect();
    Instance::new(m, jobs)
}

/// At most one constraint per family, each drawn so that it is satisfiable
/// on its own (deadlines never undercut the job's shortest chain).
pub fn random_constraints(rng: &mut impl Rng, instance: &Instance, p: f64) -> Vec<ScenarioConstraint> {
    let n = instance.jobs.len();
    let mut cs = Vec::new();
    if n == 0 {
        return cs;
    }
    let multi: Vec<usize> = (0..n).filter(|&i| instance.jobs[i].subtasks.len() > 1).collect();
    let gap_site = |rng: &mut dyn rand::RngCore| {
        let i = multi[rng.gen_range(0..multi.len())];
        (i, rng.gen_range(0..instance.jobs[i].subtasks.len() - 1))
    };

    if rng.gen_bool(p) {
        cs.push(ScenarioConstraint::Release { job: rng.gen_range(0..n), t: rng.gen_range(0..=10) });
    }
    if rng.gen_bool(p) {
        let job = rng.gen_range(0..n);
        let chain: i64 = instance.jobs[job].subtasks.iter().map(Subtask::min_time).sum();
        cs.push(ScenarioConstraint::Deadline { job, t: chain + rng.gen_range(0..=10) });
    }
    if rng.gen_bool(p) {
        let t1 = rng.gen_range(0..=10);
        cs.push(ScenarioConstraint::Window { job: rng.gen_range(0..n), t1, t2: t1 + rng.gen_range(0..=10) });
    }
    if rng.gen_bool(p) && !multi.is_empty() {
        let (job, subtask) = gap_site(rng);
        cs.push(ScenarioConstraint::MinGap { job, subtask, t: rng.gen_range(0..=5) });
    }
    if rng.gen_bool(p) && !multi.is_empty() {
        let (job, subtask) = gap_site(rng);
        cs.push(ScenarioConstraint::MaxGap { job, subtask, t: rng.gen_range(0..=5) });
    }
    if rng.gen_bool(p) && n > 1 {
        let pair = sample(rng, n, 2);
        cs.push(ScenarioConstraint::Sync { first: pair.index(0), second: pair.index(1) });
    }
    cs
}

pub fn random_case(rng: &mut impl Rng, spec: &RandomSpec) -> (Instance, Vec<ScenarioConstraint>) {
    let instance = random_instance(rng, spec);
    let cs = random_constraints(rng, &instance, spec.family_probability);
    (instance, cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{validate_constraints, validate_instance};

    #[test]
    fn cases_are_valid_and_within_spec() {
        let mut r = rng(7);
        let spec = RandomSpec::default();
        for _ in 0..500 {
            let (inst, cs) = random_case(&mut r, &spec);
            assert!(validate_instance(&inst).is_empty());
            assert!(validate_constraints(&inst, &cs).is_empty(), "{cs:?}");
            assert!((1..=3).contains(&inst.jobs.len()) && (1..=3).contains(&inst.machine_count));
            for (_, _, s) in inst.subtasks() {
                assert!(s.options.iter().all(|o| (1..=9).contains(&o.time)));
            }
        }
    }

    #[test]
    fn same_seed_same_case() {
        let spec = RandomSpec::default();
        assert_eq!(random_case(&mut rng(3), &spec), random_case(&mut rng(3), &spec));
    }

    #[test]
    fn every_family_appears() {
        let mut r = rng(11);
        let spec = RandomSpec::default();
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            for c in random_case(&mut r, &spec).1 {
                seen.insert(c.keyword());
            }
        }
        assert_eq!(seen.len(), 6);
    }
}
