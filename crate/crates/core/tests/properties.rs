use std::time::Duration;

use proptest::prelude::*;

use skedc::dsl::{parse_constraints, parse_fjs, render_constraints, render_fjs};
use skedc::random::{random_case, rng, RandomSpec};
use skedc::solver::{
    branch_and_bound, brute_force, evaluate_fixed, verify_schedule, BruteLimits, FixedDecisions, SolveOptions,
    SolveStatus,
};
use skedc::{Instance, Job, ScenarioConstraint, Subtask, Time};

fn subtask(machines: usize) -> impl Strategy<Value = Subtask> {
    prop::sample::subsequence((0..machines).collect::<Vec<_>>(), 1..=machines).prop_flat_map(|ms| {
        prop::collection::vec(1..1000i64, ms.len()).prop_map(move |ts| Subtask::new(ms.iter().copied().zip(ts).collect::<Vec<_>>()))
    })
}

fn instance() -> impl Strategy<Value = Instance> {
    (1..7usize).prop_flat_map(|m| {
        prop::collection::vec(prop::collection::vec(subtask(m), 1..5), 1..6)
            .prop_map(move |jobs| Instance::new(m, jobs.into_iter().map(|subtasks| Job { subtasks }).collect()))
    })
}

fn constraint() -> impl Strategy<Value = ScenarioConstraint> {
    let idx = 0..50usize;
    let t = 0..10_000i64;
    prop_oneof![
        (idx.clone(), t.clone()).prop_map(|(job, t)| ScenarioConstraint::Release { job, t }),
        (idx.clone(), t.clone()).prop_map(|(job, t)| ScenarioConstraint::Deadline { job, t }),
        (idx.clone(), t.clone(), t.clone()).prop_map(|(job, t1, t2)| ScenarioConstraint::Window { job, t1, t2 }),
        (idx.clone(), idx.clone(), t.clone()).prop_map(|(job, subtask, t)| ScenarioConstraint::MinGap { job, subtask, t }),
        (idx.clone(), idx.clone(), t).prop_map(|(job, subtask, t)| ScenarioConstraint::MaxGap { job, subtask, t }),
        (idx.clone(), idx).prop_map(|(first, second)| ScenarioConstraint::Sync { first, second }),
    ]
}

proptest! {
    #[test]
    fn fjs_round_trip(inst in instance()) {
        prop_assert_eq!(parse_fjs(&render_fjs(&inst)).unwrap(), inst);
    }

    #[test]
    fn constraints_round_trip(cs in prop::collection::vec(constraint(), 0..12)) {
        prop_assert_eq!(parse_constraints(&render_constraints(&cs)).unwrap(), cs);
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,80}") {
        let _ = parse_fjs(&text);
        let _ = parse_constraints(&text);
    }

    #[test]
    fn parsers_never_panic_on_near_miss(text in "[0-9 \\n\\-x.#a-z_]{0,60}") {
        let _ = parse_fjs(&text);
        let _ = parse_constraints(&text);
    }
}

fn exact() -> SolveOptions {
    SolveOptions { time_limit: None, ..SolveOptions::default() }
}

#[test]
fn golden_two_job_optimum() {
    // job 1 on {1:3, 2:4}, job 2 on {1:2, 2:6}: 1 on machine 2, 2 on machine 1
    let inst = parse_fjs("2 2\n1 2 1 3 2 4\n1 2 1 2 2 6\n").unwrap();
    let oracle = brute_force(&inst, &[], BruteLimits::default()).unwrap();
    assert_eq!(oracle.status, SolveStatus::Optimal);
    assert_eq!(oracle.makespan(), Some(Time::from_integer(4)));
    assert_eq!(oracle.nodes, 6);
    let bnb = branch_and_bound(&inst, &[], &exact());
    assert_eq!(bnb.makespan(), Some(Time::from_integer(4)));
    assert_eq!(bnb.best.unwrap().assignment_vector(), vec![1, 0]);
}

#[test]
fn adding_constraints_never_helps() {
    let mut r = rng(42);
    let spec = RandomSpec { family_probability: 0.5, ..RandomSpec::default() };
    let mut checked = 0;
    for _ in 0..150 {
        let (inst, cs) = random_case(&mut r, &spec);
        for cut in 0..cs.len() {
            let loose = branch_and_bound(&inst, &cs[..cut], &exact());
            let tight = branch_and_bound(&inst, &cs[..cut + 1], &exact());
            match (loose.makespan(), tight.makespan()) {
                (Some(a), Some(b)) => assert!(a <= b, "{inst:?} {cs:?}"),
                (None, Some(_)) => panic!("constraint made infeasible case feasible: {inst:?} {cs:?}"),
                _ => {}
            }
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn earliest_schedule_cannot_be_shifted_left() {
    let mut r = rng(99);
    let spec = RandomSpec::default();
    let mut shifted = 0;
    for _ in 0..200 {
        let (inst, cs) = random_case(&mut r, &spec);
        let Some(best) = branch_and_bound(&inst, &cs, &exact()).best else { continue };
        // rebuild the decisions and re-evaluate: the solver's schedule is the earliest one
        let assignment = inst
            .jobs
            .iter()
            .enumerate()
            .map(|(i, job)| (0..job.subtasks.len()).map(|j| best.get(i, j).unwrap().machine).collect())
            .collect();
        let mut sequences = vec![Vec::new(); inst.machine_count];
        let mut ops = best.ops.clone();
        ops.sort_by_key(|o| (o.start, o.job, o.subtask));
        for o in &ops {
            sequences[o.machine].push((o.job, o.subtask));
        }
        let again = evaluate_fixed(&inst, &cs, &FixedDecisions { assignment, sequences }).unwrap();
        assert_eq!(again, best);
        for idx in 0..best.ops.len() {
            if best.ops[idx].start < Time::from_integer(1) {
                continue;
            }
            let mut moved = best.clone();
            moved.ops[idx].start -= 1;
            moved.ops[idx].end -= 1;
            moved.makespan = moved.ops.iter().map(|o| o.end).max().unwrap();
            assert!(!verify_schedule(&inst, &cs, &moved).is_empty(), "op {idx} of {best:?} moves left");
            shifted += 1;
        }
    }
    assert!(shifted > 20);
}

#[test]
fn parallel_search_agrees_with_single_worker() {
    let mut r = rng(5);
    let spec = RandomSpec { jobs: 3..=5, subtasks: 1..=3, machines: 2..=3, ..RandomSpec::default() };
    for _ in 0..20 {
        let (inst, cs) = random_case(&mut r, &spec);
        let one = branch_and_bound(&inst, &cs, &exact());
        let many = branch_and_bound(
            &inst,
            &cs,
            &SolveOptions { workers: 4, canonicalize: true, time_limit: Some(Duration::from_secs(60)), ..exact() },
        );
        assert_eq!(one.status, many.status);
        assert_eq!(one.best, many.best);
    }
}
