//! Text formats: `.fjs` instance files and `.sched` scenario-constraint files.
//!
//! `.fjs` follows the community flexible job-shop layout:
//!
//! ```text
//! <jobs> <machines> [<avg machines per subtask>]
//! <subtasks> { <options> { <machine> <time> } }     one line per job
//! ```
//!
//! `.sched` is line oriented, `#` starts a comment:
//!
//! ```text
//! version 1
//! release <i> <t>
//! deadline <i> <t>
//! window <i> <t1> <t2>
//! min_gap <i> <j> <t>
//! max_gap <i> <j> <t>
//! sync <i1> <i2>
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::instance::{Instance, Job, MachineOption, ScenarioConstraint, Subtask};

/// 1-based position in the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedEnd { expected: &'static str },
    InvalidInteger { token: String, expected: &'static str },
    InvalidNumber { token: String },
    TrailingToken { token: String },
    MachineOutOfRange { machine: usize, machines: usize },
    UnknownKeyword { keyword: String },
    Arity { keyword: &'static str, expected: usize, found: usize },
    ZeroIndex,
    UnsupportedVersion { token: String },
    MisplacedVersion,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedEnd { expected } => write!(f, "unexpected end of input, expected {expected}"),
            ParseErrorKind::InvalidInteger { token, expected } => {
                write!(f, "invalid token {token:?}, expected {expected}")
            }
            ParseErrorKind::InvalidNumber { token } => write!(f, "invalid number {token:?}"),
            ParseErrorKind::TrailingToken { token } => write!(f, "unexpected token {token:?}"),
            ParseErrorKind::MachineOutOfRange { machine, machines } => {
                write!(f, "machine {machine} out of range 1..={machines}")
            }
            ParseErrorKind::UnknownKeyword { keyword } => write!(f, "unknown keyword {keyword:?}"),
            ParseErrorKind::Arity { keyword, expected, found } => {
                write!(f, "{keyword} takes {expected} arguments, found {found}")
            }
            ParseErrorKind::ZeroIndex => write!(f, "indices are 1-based"),
            ParseErrorKind::UnsupportedVersion { token } => write!(f, "unsupported version {token:?}"),
            ParseErrorKind::MisplacedVersion => write!(f, "version line must come before any constraint"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(span: SourceSpan, kind: ParseErrorKind) -> Self {
        ParseError { span, kind }
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    span: SourceSpan,
}

/// Splits one line into whitespace separated tokens with 1-based char columns.
fn tokenize(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut column = 0;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                out.push(Token { text: &line[b..byte], span: SourceSpan { line: line_no, column: c } });
            }
        } else if start.is_none() {
            start = Some((byte, column));
        }
    }
    if let Some((b, c)) = start {
        out.push(Token { text: &line[b..], span: SourceSpan { line: line_no, column: c } });
    }
    out
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(n, l)| (n + 1, l.strip_suffix('\r').unwrap_or(l)))
}

/// Span just past the last character of `line`.
fn end_of_line(line_no: usize, line: &str) -> SourceSpan {
    SourceSpan { line: line_no, column: line.chars().count() + 1 }
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end: SourceSpan,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, expected: &'static str) -> Result<Token<'a>, ParseError> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| ParseError::new(self.end, ParseErrorKind::UnexpectedEnd { expected }))?;
        self.pos += 1;
        Ok(tok)
    }

    fn usize(&mut self, expected: &'static str) -> Result<(usize, SourceSpan), ParseError> {
        let tok = self.next(expected)?;
        let v = tok.text.parse::<usize>().map_err(|_| {
            ParseError::new(tok.span, ParseErrorKind::InvalidInteger { token: tok.text.to_string(), expected })
        })?;
        Ok((v, tok.span))
    }

    fn i64(&mut self, expected: &'static str) -> Result<i64, ParseError> {
        let tok = self.next(expected)?;
        tok.text.parse::<i64>().map_err(|_| {
            ParseError::new(tok.span, ParseErrorKind::InvalidInteger { token: tok.text.to_string(), expected })
        })
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            Some(tok) => Err(ParseError::new(
                tok.span,
                ParseErrorKind::TrailingToken { token: tok.text.to_string() },
            )),
            None => Ok(()),
        }
    }
}

/// Parses a `.fjs` instance. LF and CRLF line endings are accepted.
pub fn parse_fjs(text: &str) -> Result<Instance, ParseError> {
    let mut content = lines(text).filter(|(_, l)| !l.trim().is_empty());
    let last_span = lines(text)
        .last()
        .map(|(n, l)| end_of_line(n, l))
        .unwrap_or(SourceSpan { line: 1, column: 1 });

    let (hline_no, hline) = content.next().ok_or_else(|| {
        ParseError::new(last_span, ParseErrorKind::UnexpectedEnd { expected: "header line" })
    })?;
    let mut header = Cursor { tokens: tokenize(hline_no, hline), pos: 0, end: end_of_line(hline_no, hline) };
    let (job_count, _) = header.usize("job count")?;
    let (machine_count, _) = header.usize("machine count")?;
    if let Some(tok) = header.tokens.get(header.pos).copied() {
        header.pos += 1;
        if tok.text.parse::<f64>().map(|v| !v.is_finite()).unwrap_or(true) {
            return Err(ParseError::new(tok.span, ParseErrorKind::InvalidNumber { token: tok.text.to_string() }));
        }
    }
    header.finish()?;

    let mut jobs = Vec::with_capacity(job_count.min(1024));
    for _ in 0..job_count {
        let (line_no, line) = content.next().ok_or_else(|| {
            ParseError::new(last_span, ParseErrorKind::UnexpectedEnd { expected: "job line" })
        })?;
        let mut cur = Cursor { tokens: tokenize(line_no, line), pos: 0, end: end_of_line(line_no, line) };
        let (subtask_count, _) = cur.usize("subtask count")?;
        let mut subtasks = Vec::with_capacity(subtask_count.min(1024));
        for _ in 0..subtask_count {
            let (option_count, _) = cur.usize("option count")?;
            let mut options = Vec::with_capacity(option_count.min(1024));
            for _ in 0..option_count {
                let (machine, span) = cur.usize("machine index")?;
                if machine == 0 || machine > machine_count {
                    return Err(ParseError::new(
                        span,
                        ParseErrorKind::MachineOutOfRange { machine, machines: machine_count },
                    ));
                }
                let time = cur.i64("processing time")?;
                options.push(MachineOption { machine: machine - 1, time });
            }
            subtasks.push(Subtask { options });
        }
        cur.finish()?;
        jobs.push(Job { subtasks });
    }
    if let Some((line_no, line)) = content.next() {
        let tok = tokenize(line_no, line)[0];
        return Err(ParseError::new(tok.span, ParseErrorKind::TrailingToken { token: tok.text.to_string() }));
    }
    Ok(Instance { jobs, machine_count })
}

/// Parses a `.sched` constraint file; constraints are returned in file order.
pub fn parse_constraints(text: &str) -> Result<Vec<ScenarioConstraint>, ParseError> {
    let mut out = Vec::new();
    let mut seen_statement = false;
    for (line_no, raw) in lines(text) {
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line_no, line);
        let Some(head) = tokens.first().copied() else { continue };
        let args = &tokens[1..];
        let keyword: &'static str = match head.text {
            "version" => "version",
            "release" => "release",
            "deadline" => "deadline",
            "window" => "window",
            "min_gap" => "min_gap",
            "max_gap" => "max_gap",
            "sync" => "sync",
            other => {
                return Err(ParseError::new(
                    head.span,
                    ParseErrorKind::UnknownKeyword { keyword: other.to_string() },
                ))
            }
        };
        let expected = match keyword {
            "version" => 1,
            "release" | "deadline" | "sync" => 2,
            _ => 3,
        };
        if args.len() != expected {
            return Err(ParseError::new(
                head.span,
                ParseErrorKind::Arity { keyword, expected, found: args.len() },
            ));
        }
        if keyword == "version" {
            if seen_statement {
                return Err(ParseError::new(head.span, ParseErrorKind::MisplacedVersion));
            }
            if args[0].text != "1" {
                return Err(ParseError::new(
                    args[0].span,
                    ParseErrorKind::UnsupportedVersion { token: args[0].text.to_string() },
                ));
            }
            seen_statement = true;
            continue;
        }
        seen_statement = true;
        let idx = |k: usize| index_arg(args[k]);
        let time = |k: usize| time_arg(args[k]);
        let c = match keyword {
            "release" => ScenarioConstraint::Release { job: idx(0)?, t: time(1)? },
            "deadline" => ScenarioConstraint::Deadline { job: idx(0)?, t: time(1)? },
            "window" => ScenarioConstraint::Window { job: idx(0)?, t1: time(1)?, t2: time(2)? },
            "min_gap" => ScenarioConstraint::MinGap { job: idx(0)?, subtask: idx(1)?, t: time(2)? },
            "max_gap" => ScenarioConstraint::MaxGap { job: idx(0)?, subtask: idx(1)?, t: time(2)? },
            _ => ScenarioConstraint::Sync { first: idx(0)?, second: idx(1)? },
        };
        out.push(c);
    }
    Ok(out)
}

fn index_arg(tok: Token<'_>) -> Result<usize, ParseError> {
    let v = tok.text.parse::<usize>().map_err(|_| {
        ParseError::new(
            tok.span,
            ParseErrorKind::InvalidInteger { token: tok.text.to_string(), expected: "1-based index" },
        )
    })?;
    if v == 0 {
        return Err(ParseError::new(tok.span, ParseErrorKind::ZeroIndex));
    }
    Ok(v - 1)
}

fn time_arg(tok: Token<'_>) -> Result<i64, ParseError> {
    match tok.text.parse::<i64>() {
        Ok(v) if v >= 0 => Ok(v),
        _ => Err(ParseError::new(
            tok.span,
            ParseErrorKind::InvalidInteger { token: tok.text.to_string(), expected: "non-negative integer" },
        )),
    }
}

pub fn render_constraints(cs: &[ScenarioConstraint]) -> String {
    let mut out = String::new();
    for c in cs {
        let _ = match *c {
            ScenarioConstraint::Release { job, t } => writeln!(out, "release {} {t}", job + 1),
            ScenarioConstraint::Deadline { job, t } => writeln!(out, "deadline {} {t}", job + 1),
            ScenarioConstraint::Window { job, t1, t2 } => writeln!(out, "window {} {t1} {t2}", job + 1),
            ScenarioConstraint::MinGap { job, subtask, t } => {
                writeln!(out, "min_gap {} {} {t}", job + 1, subtask + 1)
            }
            ScenarioConstraint::MaxGap { job, subtask, t } => {
                writeln!(out, "max_gap {} {} {t}", job + 1, subtask + 1)
            }
            ScenarioConstraint::Sync { first, second } => writeln!(out, "sync {} {}", first + 1, second + 1),
        };
    }
    out
}

/// Mean eligible-set size, rounded half away from zero.
fn average_options(instance: &Instance) -> u64 {
    let subtasks = instance.subtask_count() as u64;
    if subtasks == 0 {
        return 0;
    }
    let options: u64 = instance.subtasks().map(|(_, _, s)| s.options.len() as u64).sum();
    (2 * options + subtasks) / (2 * subtasks)
}

pub fn render_fjs(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", instance.jobs.len(), instance.machine_count, average_options(instance));
    for job in &instance.jobs {
        let _ = write!(out, "{}", job.subtasks.len());
        for sub in &job.subtasks {
            let _ = write!(out, " {}", sub.options.len());
            for o in &sub.options {
                let _ = write!(out, " {} {}", o.machine + 1, o.time);
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Instance {
        Instance::new(1, vec![Job { subtasks: vec![Subtask::new([(0, 5)])] }])
    }

    fn two() -> Instance {
        Instance::new(
            2,
            vec![
                Job { subtasks: vec![Subtask::new([(0, 3), (1, 4)])] },
                Job { subtasks: vec![Subtask::new([(1, 6)])] },
            ],
        )
    }

    #[test]
    fn parses_smallest_file() {
        assert_eq!(parse_fjs("1 1 1\n1 1 1 5\n").unwrap(), one());
    }

    #[test]
    fn parses_two_jobs() {
        assert_eq!(parse_fjs("2 2 1\n1 2 1 3 2 4\n1 1 2 6\n").unwrap(), two());
    }

    #[test]
    fn crlf_and_float_average() {
        assert_eq!(parse_fjs("2 2 1.5\r\n1 2 1 3 2 4\r\n1 1 2 6\r\n\r\n").unwrap(), two());
    }

    #[test]
    fn machine_out_of_range() {
        let err = parse_fjs("1 1 1\n1 1 3 5\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MachineOutOfRange { machine: 3, machines: 1 });
        assert_eq!(err.span, SourceSpan { line: 2, column: 5 });
    }

    #[test]
    fn wrong_counts() {
        let err = parse_fjs("1 1 1\n2 1 1 5\n").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 2, column: 8 });
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd { .. }));
        let err = parse_fjs("1 1 1\n1 1 1 5 7\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::TrailingToken { .. }));
        let err = parse_fjs("2 1 1\n1 1 1 5\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd { .. }));
        let err = parse_fjs("1 1 x\n").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 1, column: 5 });
    }

    #[test]
    fn constraint_examples() {
        assert_eq!(
            parse_constraints("release 1 10\n").unwrap(),
            vec![ScenarioConstraint::Release { job: 0, t: 10 }]
        );
        assert_eq!(
            parse_constraints("# urgent\nsync 1 2\nmax_gap 1 1 4\n").unwrap(),
            vec![
                ScenarioConstraint::Sync { first: 0, second: 1 },
                ScenarioConstraint::MaxGap { job: 0, subtask: 0, t: 4 },
            ]
        );
        let err = parse_constraints("window 1 5\n").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert!(matches!(err.kind, ParseErrorKind::Arity { keyword: "window", expected: 3, found: 2 }));
    }

    #[test]
    fn constraint_errors() {
        let err = parse_constraints("\n\nrelese 1 2").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 3, column: 1 });
        assert!(matches!(parse_constraints("release 1 -2").unwrap_err().kind, ParseErrorKind::InvalidInteger { .. }));
        assert!(matches!(parse_constraints("release 0 2").unwrap_err().kind, ParseErrorKind::ZeroIndex));
        assert!(matches!(parse_constraints("release 1 2.5").unwrap_err().kind, ParseErrorKind::InvalidInteger { .. }));
    }

    #[test]
    fn version_line() {
        assert_eq!(parse_constraints("# v\nversion 1\nsync 1 2 # tail\n").unwrap().len(), 1);
        assert!(matches!(
            parse_constraints("version 2\n").unwrap_err().kind,
            ParseErrorKind::UnsupportedVersion { .. }
        ));
        assert!(matches!(
            parse_constraints("sync 1 2\nversion 1\n").unwrap_err().kind,
            ParseErrorKind::MisplacedVersion
        ));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_constraints(&[ScenarioConstraint::Release { job: 0, t: 10 }]), "release 1 10\n");
        assert_eq!(render_constraints(&[]), "");
        assert_eq!(render_constraints(&[ScenarioConstraint::Window { job: 1, t1: 0, t2: 7 }]), "window 2 0 7\n");
        assert_eq!(render_fjs(&one()), "1 1 1\n1 1 1 5\n");
        // mean |K| = (2 + 1) / 2 = 1.5, rounds away from zero to 2
        assert_eq!(render_fjs(&two()), "2 2 2\n1 2 1 3 2 4\n1 1 2 6\n");
    }

    #[test]
    fn columns_count_chars() {
        let err = parse_constraints("é foo").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 1, column: 1 });
        let err = parse_constraints("sync é 2").unwrap_err();
        assert_eq!(err.span, SourceSpan { line: 1, column: 6 });
    }
}
