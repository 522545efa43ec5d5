//! Regenerates the benchmark suite in `suite/`: five cases with 10 jobs on
//! 5 machines and five with 10 jobs on 10 machines, each proven optimal.
//!
//! cargo run --release -p skedc --example gen_suite

use std::fs;
use std::path::Path;
use std::time::Duration;

use skedc::dsl::{render_constraints, render_fjs};
use skedc::instance::{validate_constraints, validate_instance};
use skedc::random::{random_case, rng, RandomSpec};
use skedc::solver::{branch_and_bound, verify_schedule, SolveOptions, SolveStatus};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("suite");
    fs::create_dir_all(&dir).expect("create suite dir");
    let mut expected = String::from("case,makespan\n");
    for (machines, options, seed_base) in [(5usize, 2usize, 5000u64), (10, 3, 10000)] {
        let spec = RandomSpec {
            jobs: 10..=10,
            subtasks: 1..=3,
            machines: machines..=machines,
            time: 1..=9,
            max_options: Some(options),
            family_probability: 0.3,
        };
        let mut kept = 0;
        for seed in seed_base.. {
            let (inst, cs) = random_case(&mut rng(seed), &spec);
            if inst.subtask_count() < 18 || cs.is_empty() {
                continue;
            }
            assert!(validate_instance(&inst).is_empty() && validate_constraints(&inst, &cs).is_empty());
            let opts = SolveOptions { time_limit: Some(Duration::from_secs(5)), node_limit: Some(200_000), ..Default::default() };
            let r = branch_and_bound(&inst, &cs, &opts);
            if r.status != SolveStatus::Optimal {
                continue;
            }
            let best = r.best.as_ref().expect("optimal has a schedule");
            assert!(verify_schedule(&inst, &cs, best).is_empty());
            assert_eq!(r.lower_bound, best.makespan);
            kept += 1;
            let name = format!("j10m{machines}_{kept:02}");
            fs::write(dir.join(format!("{name}.fjs")), render_fjs(&inst)).unwrap();
            fs::write(dir.join(format!("{name}.sched")), render_constraints(&cs)).unwrap();
            expected.push_str(&format!("{name},{}\n", best.makespan));
            println!("{name}: seed {seed}, {} subtasks, {} constraints, makespan {}, {} nodes", inst.subtask_count(), cs.len(), best.makespan, r.nodes);
            if kept == 5 {
                break;
            }
        }
    }
    fs::write(dir.join("expected.csv"), expected).unwrap();
}
