//! Text and SVG Gantt charts of a schedule, one row per machine.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::instance::{Schedule, ScheduledOp, Time};

/// Pixels per time unit in SVG output.
pub const PX_PER_UNIT: f64 = 4.0;
const ROW_HEIGHT: f64 = 24.0;
const LABEL_WIDTH: f64 = 40.0;

fn fmt_time(t: Time) -> String {
    if t.is_integer() {
        t.to_integer().to_string()
    } else {
        format!("{}/{}", t.numer(), t.denom())
    }
}

fn rows(schedule: &Schedule, machines: usize) -> Vec<Vec<&ScheduledOp>> {
    let count = schedule.ops.iter().map(|o| o.machine + 1).max().unwrap_or(0).max(machines);
    let mut rows = vec![Vec::new(); count];
    for op in &schedule.ops {
        rows[op.machine].push(op);
    }
    for row in &mut rows {
        row.sort_by_key(|o| (o.start, o.job, o.subtask));
    }
    rows
}

/// `machine <k>: <i.j> [<start>,<end>) ...`, one line per machine.
///
/// `machines` pads the chart with idle machines beyond those used.
pub fn render_text(schedule: &Schedule, machines: usize) -> String {
    let mut out = String::new();
    for (k, row) in rows(schedule, machines).iter().enumerate() {
        let _ = write!(out, "machine {}:", k + 1);
        for op in row {
            let _ = write!(out, " {}.{} [{},{})", op.job + 1, op.subtask + 1, fmt_time(op.start), fmt_time(op.end));
        }
        out.push('\n');
    }
    out
}

/// Fill color of a job's bars; fixed per job index.
pub fn job_color(job: usize) -> String {
    format!("hsl({},65%,60%)", (job * 137) % 360)
}

fn px(t: Time) -> f64 {
    t.to_f64().unwrap_or(0.0) * PX_PER_UNIT
}

/// Standalone SVG document.
pub fn render_svg(schedule: &Schedule, machines: usize) -> String {
    let rows = rows(schedule, machines);
    let width = LABEL_WIDTH + px(schedule.makespan) + 10.0;
    let height = ROW_HEIGHT * rows.len() as f64 + 20.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">"#
    );
    for (k, row) in rows.iter().enumerate() {
        let y = ROW_HEIGHT * k as f64;
        let _ = writeln!(out, r#"  <text x="2" y="{}">M{}</text>"#, y + 16.0, k + 1);
        for op in row {
            let x = LABEL_WIDTH + px(op.start);
            let w = px(op.end - op.start);
            let _ = writeln!(
                out,
                r#"  <rect x="{x}" y="{}" width="{w}" height="{}" fill="{}" stroke="black" stroke-width="0.5"><title>{}.{} [{},{})</title></rect>"#,
                y + 2.0,
                ROW_HEIGHT - 4.0,
                job_color(op.job),
                op.job + 1,
                op.subtask + 1,
                fmt_time(op.start),
                fmt_time(op.end)
            );
            let _ = writeln!(out, r#"  <text x="{}" y="{}">{}.{}</text>"#, x + 2.0, y + 16.0, op.job + 1, op.subtask + 1);
        }
    }
    let axis_y = ROW_HEIGHT * rows.len() as f64 + 12.0;
    let _ = writeln!(out, r#"  <text x="{LABEL_WIDTH}" y="{axis_y}">0</text>"#);
    let _ = writeln!(out, r#"  <text x="{}" y="{axis_y}">{}</text>"#, LABEL_WIDTH + px(schedule.makespan), fmt_time(schedule.makespan));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(job: usize, machine: usize, start: i64, end: i64) -> ScheduledOp {
        ScheduledOp { job, subtask: 0, machine, start: Time::from_integer(start), end: Time::from_integer(end) }
    }

    #[test]
    fn single_bar() {
        let s = Schedule { ops: vec![op(0, 0, 0, 5)], makespan: Time::from_integer(5) };
        assert_eq!(render_text(&s, 1), "machine 1: 1.1 [0,5)\n");
    }

    #[test]
    fn sync_example_rows() {
        let s = Schedule { ops: vec![op(0, 0, 2, 5), op(1, 1, 0, 5)], makespan: Time::from_integer(5) };
        assert_eq!(render_text(&s, 2), "machine 1: 1.1 [2,5)\nmachine 2: 2.1 [0,5)\n");
    }

    #[test]
    fn svg_scale_and_colors() {
        let s = Schedule { ops: vec![op(0, 0, 2, 5), op(1, 1, 0, 5)], makespan: Time::from_integer(5) };
        let svg = render_svg(&s, 2);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains(r#"<rect x="48" y="2" width="12""#), "{svg}");
        assert!(svg.contains(&job_color(0)) && svg.contains(&job_color(1)));
        assert_ne!(job_color(0), job_color(1));
        assert_eq!(svg, render_svg(&s, 2));
    }
}
