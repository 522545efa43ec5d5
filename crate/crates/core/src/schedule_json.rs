//! Schedule exchange format:
//! `{"makespan": r, "items": [{"i", "j", "k", "start", "end"}]}`, 1-based,
//! rationals as integers or `"p/q"` strings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Schedule, ScheduledOp};
use crate::lp::JsonNumber;

#[derive(Debug, Error)]
pub enum ScheduleJsonError {
    #[error("malformed schedule JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad number {0}")]
    Number(String),
    #[error("item {item}: index {field} must be at least 1")]
    ZeroIndex { item: usize, field: &'static str },
}

#[derive(Serialize, Deserialize)]
struct Item {
    i: usize,
    j: usize,
    k: usize,
    start: JsonNumber,
    end: JsonNumber,
}

#[derive(Serialize, Deserialize)]
struct Doc {
    makespan: JsonNumber,
    items: Vec<Item>,
}

/// Pretty JSON with a trailing newline; items in (job, subtask) order.
pub fn write_schedule(schedule: &Schedule) -> String {
    let mut ops = schedule.ops.clone();
    ops.sort_by_key(|o| (o.job, o.subtask));
    let doc = Doc {
        makespan: JsonNumber::from_time(schedule.makespan),
        items: ops
            .iter()
            .map(|o| Item {
                i: o.job + 1,
                j: o.subtask + 1,
                k: o.machine + 1,
                start: JsonNumber::from_time(o.start),
                end: JsonNumber::from_time(o.end),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("schedule JSON serializes");
    s.push('\n');
    s
}

pub fn read_schedule(text: &str) -> Result<Schedule, ScheduleJsonError> {
    let doc: Doc = serde_json::from_str(text)?;
    let number = |n: &JsonNumber| n.to_time().ok_or_else(|| ScheduleJsonError::Number(format!("{n:?}")));
    let ops = doc
        .items
        .iter()
        .enumerate()
        .map(|(idx, it)| {
            let base = |v: usize, field| v.checked_sub(1).ok_or(ScheduleJsonError::ZeroIndex { item: idx + 1, field });
            Ok(ScheduledOp {
                job: base(it.i, "i")?,
                subtask: base(it.j, "j")?,
                machine: base(it.k, "k")?,
                start: number(&it.start)?,
                end: number(&it.end)?,
            })
        })
        .collect::<Result<Vec<_>, ScheduleJsonError>>()?;
    Ok(Schedule { ops, makespan: number(&doc.makespan)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Time;

    #[test]
    fn round_trip_with_fractions() {
        let s = Schedule {
            ops: vec![ScheduledOp { job: 0, subtask: 0, machine: 1, start: Time::new(1, 2), end: Time::from_integer(5) }],
            makespan: Time::from_integer(5),
        };
        let text = write_schedule(&s);
        assert!(text.contains("\"1/2\"") && text.contains("\"k\": 2"));
        assert_eq!(read_schedule(&text).unwrap(), s);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(read_schedule("{"), Err(ScheduleJsonError::Json(_))));
        let zero = r#"{"makespan":1,"items":[{"i":0,"j":1,"k":1,"start":0,"end":1}]}"#;
        assert!(matches!(read_schedule(zero), Err(ScheduleJsonError::ZeroIndex { field: "i", .. })));
        let bad = r#"{"makespan":"1/0","items":[]}"#;
        assert!(matches!(read_schedule(bad), Err(ScheduleJsonError::Number(_))));
    }
}
