//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p skedc --test acceptance`.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, RngCore};

use skedc::bench::{read_csv, BenchStatus};
use skedc::dsl::{parse_constraints, parse_fjs, render_constraints, render_fjs};
use skedc::lp::write_lp;
use skedc::milp::{build_model, embed_schedule, Family, VarKey};
use skedc::random::{random_case, rng, RandomSpec};
use skedc::solver::{branch_and_bound, brute_force, BruteLimits, SolveOptions, SolveReport, SolveStatus};
use skedc::{Instance, ScenarioConstraint, Time};

type Outcome = Result<String, String>;

/// Name, check, and time budget.
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn exact() -> SolveOptions {
    SolveOptions { time_limit: None, ..SolveOptions::default() }
}

/// The 100 small seeded cases shared by the oracle, embedding and LP checks.
fn oracle_suite() -> Vec<(Instance, Vec<ScenarioConstraint>)> {
    let spec = RandomSpec::default();
    (0..100).map(|seed| random_case(&mut rng(seed), &spec)).collect()
}

fn oracle_reports(suite: &[(Instance, Vec<ScenarioConstraint>)]) -> Result<Vec<SolveReport>, String> {
    suite
        .iter()
        .enumerate()
        .map(|(n, (inst, cs))| brute_force(inst, cs, BruteLimits::default()).map_err(|e| format!("case {n}: {e}")))
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let suite = oracle_suite();
    let oracle = oracle_reports(&suite)?;
    let mut optimal = 0;
    for (n, ((inst, cs), want)) in suite.iter().zip(&oracle).enumerate() {
        let got = branch_and_bound(inst, cs, &exact());
        if got.status != want.status || got.makespan() != want.makespan() {
            return Err(format!(
                "case {n}: branch-and-bound {} {:?}, oracle {} {:?}",
                got.status,
                got.makespan(),
                want.status,
                want.makespan()
            ));
        }
        optimal += usize::from(want.status == SolveStatus::Optimal);
    }
    Ok(format!("100 cases agree ({optimal} optimal, {} infeasible)", 100 - optimal))
}

fn count_formulas() -> Outcome {
    let spec = RandomSpec::default();
    for seed in 1000..1050 {
        let (inst, cs) = random_case(&mut rng(seed), &spec);
        let c = build_model(&inst, &cs).counts();
        let subs: Vec<_> = inst.subtasks().collect();
        let n_i: usize = inst.jobs.iter().map(|j| j.subtasks.len()).sum();
        let shared = |a: &skedc::Subtask, b: &skedc::Subtask| a.machines().iter().filter(|k| b.time_on(**k).is_some()).count();
        let mut disj = 0;
        let mut y = 0;
        for &(i, _, a) in &subs {
            for &(i2, _, b) in &subs {
                if i < i2 {
                    let s = shared(a, b);
                    disj += s;
                    y += usize::from(s > 0);
                }
            }
        }
        let kinds = |f: fn(&ScenarioConstraint) -> bool| cs.iter().filter(|c| f(c)).count();
        let expect = [
            (Family::Assignment, n_i),
            (Family::Precedence, n_i - inst.jobs.len()),
            (Family::DisjunctiveA, disj),
            (Family::DisjunctiveB, disj),
            (Family::Makespan, inst.jobs.len()),
            (Family::Release, kinds(|c| matches!(c, ScenarioConstraint::Release { .. }))),
            (Family::Deadline, kinds(|c| matches!(c, ScenarioConstraint::Deadline { .. }))),
            (Family::WindowLo, kinds(|c| matches!(c, ScenarioConstraint::Window { .. }))),
            (Family::WindowHi, kinds(|c| matches!(c, ScenarioConstraint::Window { .. }))),
            (Family::MinGap, 0),
            (Family::MaxGap, kinds(|c| matches!(c, ScenarioConstraint::MaxGap { .. }))),
            (Family::SyncEq, kinds(|c| matches!(c, ScenarioConstraint::Sync { .. }))),
        ];
        for (family, want) in expect {
            if c.rows(family) != want {
                return Err(format!("seed {seed}: {} rows {} != {want}", family.tag(), c.rows(family)));
            }
        }
        let x: usize = subs.iter().map(|(_, _, s)| s.options.len()).sum();
        if (c.x, c.y, c.b, c.cmax) != (x, y, n_i, 1) {
            return Err(format!("seed {seed}: vars {:?} != {:?}", (c.x, c.y, c.b, c.cmax), (x, y, n_i, 1)));
        }
    }
    Ok("50 models match the closed forms".into())
}

fn milp_embedding() -> Outcome {
    let suite = oracle_suite();
    let oracle = oracle_reports(&suite)?;
    let mut rows = 0;
    let mut embedded = 0;
    for (n, ((inst, cs), rep)) in suite.iter().zip(&oracle).enumerate() {
        let Some(best) = &rep.best else { continue };
        let model = build_model(inst, cs);
        let point = embed_schedule(inst, best);
        let bad = model.violated_rows(&point);
        if let Some(&r) = bad.first() {
            return Err(format!("case {n}: row {} violated ({} total)", model.row_names()[r], bad.len()));
        }
        if !model.violated_bounds(&point).is_empty() {
            return Err(format!("case {n}: variable bounds violated"));
        }
        if point.get(&VarKey::Cmax) != Some(&best.makespan) {
            return Err(format!("case {n}: objective differs from makespan"));
        }
        rows += model.constraints.len();
        embedded += 1;
    }
    Ok(format!("{embedded} optimal schedules satisfy all {rows} rows exactly"))
}

fn scenario_suite() -> Outcome {
    fn solve(fjs: &str, sched: &str) -> SolveReport {
        branch_and_bound(&parse_fjs(fjs).unwrap(), &parse_constraints(sched).unwrap(), &exact())
    }
    let t = Time::from_integer;
    let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };

    let r = solve("1 1\n1 1 1 3\n", "release 1 4\n");
    let s = r.best.as_ref().ok_or("release: no schedule")?;
    check(s.ops[0].start == t(4) && s.makespan == t(7), "release does not shift the start to t")?;

    let r = solve("1 1\n2 1 1 2 1 1 3\n", "deadline 1 4\n");
    check(r.status == SolveStatus::Infeasible, "deadline below work is not Infeasible")?;

    let r = solve("2 2\n1 1 1 3\n1 1 2 5\n", "sync 1 2\n");
    let s = r.best.as_ref().ok_or("sync: no schedule")?;
    check(s.makespan == t(5) && s.get(0, 0).unwrap().start == t(2), "sync does not give makespan 5 with start 2")?;

    let base = solve("1 2\n2 1 1 2 1 2 3\n", "");
    let gapped = solve("1 2\n2 1 1 2 1 2 3\n", "min_gap 1 1 4\n");
    check(
        base.makespan() == Some(t(5)) && gapped.makespan() == Some(t(9)),
        "min-gap does not add exactly t to the chain",
    )?;

    let r = solve("2 2\n2 1 1 2 1 2 3\n1 1 2 4\n", "max_gap 1 1 0\n");
    let s = r.best.as_ref().ok_or("max-gap: no schedule")?;
    check(s.get(0, 1).unwrap().start == s.get(0, 0).unwrap().end, "max-gap 0 does not force back-to-back starts")?;
    Ok("release, deadline, sync, min-gap and max-gap cases exact".into())
}

fn parser_round_trips() -> Outcome {
    let spec = RandomSpec {
        jobs: 1..=8,
        subtasks: 1..=5,
        machines: 1..=8,
        time: 1..=999,
        max_options: None,
        family_probability: 0.6,
    };
    let mut r = rng(2024);
    for n in 0..1000 {
        let (inst, cs) = random_case(&mut r, &spec);
        if parse_fjs(&render_fjs(&inst)).as_ref() != Ok(&inst) {
            return Err(format!("instance {n} does not round-trip"));
        }
        if parse_constraints(&render_constraints(&cs)).as_ref() != Ok(&cs) {
            return Err(format!("constraint list {n} does not round-trip"));
        }
    }
    // half raw bytes, half near-miss text over the grammar's alphabet
    const ALPHABET: &[u8] = b"0123456789 -\n\t#.xreleasdintwogmpyc_v";
    let mut r = rng(7);
    let (mut errors, mut accepted) = (0usize, 0usize);
    for n in 0..100_000 {
        let len = r.gen_range(0..64);
        let bytes: Vec<u8> = if n % 2 == 0 {
            let mut b = vec![0u8; len];
            r.fill_bytes(&mut b);
            b
        } else {
            (0..len).map(|_| ALPHABET[r.gen_range(0..ALPHABET.len())]).collect()
        };
        let text = String::from_utf8_lossy(&bytes);
        let lines = text.lines().count() + 1;
        let outcome = catch_unwind(AssertUnwindSafe(|| (parse_fjs(&text).err(), parse_constraints(&text).err())))
            .map_err(|_| format!("parser panicked on input {n}: {bytes:?}"))?;
        for e in [outcome.0, outcome.1] {
            match e {
                Some(e) if e.span.line == 0 || e.span.line > lines || e.span.column == 0 => {
                    return Err(format!("input {n}: error span {} outside the input", e.span));
                }
                Some(_) => errors += 1,
                None => accepted += 1,
            }
        }
    }
    Ok(format!("1000 instances and constraint lists round-trip; fuzz: {errors} ParseErrors, {accepted} valid, 0 panics"))
}

fn suite_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("suite")
}

fn skedc(args: &[&str], threads: Option<&str>) -> Result<std::process::Output, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_skedc"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("SKEDC_THREADS", t);
    }
    cmd.output().map_err(|e| e.to_string())
}

fn benchmark() -> Outcome {
    let dir = suite_dir();
    let out = skedc(&["bench", dir.to_str().unwrap(), "--format", "csv"], None)?;
    if out.status.code() != Some(0) {
        return Err(format!("bench exited with {:?}", out.status.code()));
    }
    let rows = read_csv(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    let expected: BTreeMap<String, Time> = fs::read_to_string(dir.join("expected.csv"))
        .map_err(|e| e.to_string())?
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once(','))
        .map(|(c, v)| (c.to_string(), Time::from_integer(v.parse().unwrap())))
        .collect();
    if rows.len() != 10 || expected.len() != 10 {
        return Err(format!("{} rows, {} expected values", rows.len(), expected.len()));
    }
    let mut slowest = 0;
    for row in &rows {
        if row.status != BenchStatus::Solved(SolveStatus::Optimal) {
            return Err(format!("{}: status {}", row.case, row.status));
        }
        if row.makespan.is_none() || row.makespan != row.best_solution {
            return Err(format!("{}: makespan {:?} vs best solution {:?}", row.case, row.makespan, row.best_solution));
        }
        if row.makespan != expected.get(&row.case).copied() {
            return Err(format!("{}: makespan differs from the frozen value", row.case));
        }
        let ms = row.wall_ms.ok_or("missing time")?;
        if ms > 100_000 {
            return Err(format!("{}: {ms} ms exceeds the 100 s limit", row.case));
        }
        slowest = slowest.max(ms);
    }
    Ok(format!("10/10 Optimal, makespan = best_solution, slowest case {slowest} ms"))
}

const HIGHS_SCRIPT: &str = r#"
import sys, highspy
for path in sys.argv[1:]:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.readModel(path)
    h.run()
    status = h.modelStatusToString(h.getModelStatus())
    print(status + " " + repr(h.getInfo().objective_function_value))
"#;

fn highs_available() -> bool {
    Command::new("python3")
        .args(["-c", "import highspy"])
        .output()
        .is_ok_and(|o| o.status.success())
}

fn external_lp() -> Outcome {
    if !highs_available() {
        return Ok("SKIPPED: no LP-reading MILP solver (python3 + highspy) on this host".into());
    }
    let suite = oracle_suite();
    let oracle = oracle_reports(&suite)?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut paths = Vec::new();
    for (n, (inst, cs)) in suite.iter().enumerate() {
        let path = dir.path().join(format!("case{n:03}.lp"));
        fs::write(&path, write_lp(&build_model(inst, cs)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        paths.push(path);
    }
    let out = Command::new("python3").arg("-c").arg(HIGHS_SCRIPT).args(&paths).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("HiGHS run failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != suite.len() {
        return Err(format!("expected {} results, got {}", suite.len(), lines.len()));
    }
    for (n, (line, rep)) in lines.iter().zip(&oracle).enumerate() {
        let (status, obj) = line.rsplit_once(' ').ok_or("bad HiGHS output")?;
        match rep.makespan() {
            Some(m) => {
                let obj: f64 = obj.parse().map_err(|_| format!("case {n}: bad objective {obj}"))?;
                let rounded = Time::from_integer(obj.round() as i64);
                if status != "Optimal" || (obj - obj.round()).abs() > 1e-6 || rounded != m {
                    return Err(format!("case {n}: HiGHS {status} {obj}, internal {m}"));
                }
            }
            None if status == "Infeasible" => {}
            None => return Err(format!("case {n}: HiGHS {status}, internal Infeasible")),
        }
    }
    Ok("HiGHS agrees with the internal makespan on all 100 LP files".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let suite = suite_dir();
    let mut schedules = Vec::new();
    for run in 0..2 {
        let mut all = String::new();
        for case in ["j10m5_01", "j10m10_03"] {
            let out_path = dir.path().join(format!("{case}.{run}.json"));
            let out = skedc(
                &[
                    "solve",
                    suite.join(format!("{case}.fjs")).to_str().unwrap(),
                    suite.join(format!("{case}.sched")).to_str().unwrap(),
                    "--out",
                    out_path.to_str().unwrap(),
                ],
                Some("1"),
            )?;
            if out.status.code() != Some(0) {
                return Err(format!("solve {case} exited with {:?}", out.status.code()));
            }
            all.push_str(&fs::read_to_string(&out_path).map_err(|e| e.to_string())?);
        }
        schedules.push(all);
    }
    if schedules[0] != schedules[1] {
        return Err("schedule JSON differs between runs".into());
    }
    let bench = || skedc(&["bench", suite.to_str().unwrap(), "--format", "csv", "--no-time"], Some("1")).map(|o| o.stdout);
    let (a, b) = (bench()?, bench()?);
    if a != b || a.is_empty() {
        return Err("bench CSV differs between runs".into());
    }
    Ok(format!("schedule JSON ({} bytes) and bench CSV ({} bytes) identical across runs", schedules[0].len(), a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle-equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("count-formulas", count_formulas, Duration::from_secs(5)),
        ("milp-embedding", milp_embedding, Duration::from_secs(10)),
        ("scenario-suite", scenario_suite, Duration::from_secs(1)),
        ("parser-round-trips", parser_round_trips, Duration::from_secs(60)),
        ("benchmark", benchmark, Duration::from_secs(1000)),
        ("external-lp-crosscheck", external_lp, Duration::from_secs(600)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let started = Instant::now();
        let result = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = started.elapsed();
        let result = match result {
            Ok(_) if took > budget => Err(format!("took {took:.2?}, budget {budget:?}")),
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
