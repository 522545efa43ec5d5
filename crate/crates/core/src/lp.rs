//! LP-format and JSON serialization of a [`MilpModel`].
//!
//! Both writers are byte-deterministic: rows in model order, terms in
//! variable-table order, integral values printed without a denominator.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Time;
use crate::milp::{Family, LinearConstraint, MilpModel, Sense, Var, VarKey, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    /// LP text only carries finite decimals; `p/q` with q not of the form 2^a·5^b has none.
    #[error("coefficient {0} has no finite decimal representation")]
    UnrepresentableCoefficient(Time),
}

#[derive(Debug, Error)]
pub enum ModelJsonError {
    #[error("malformed model JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown variable name {0:?}")]
    VarName(String),
    #[error("unknown constraint name {0:?}")]
    RowName(String),
    #[error("unknown sense {0:?}")]
    Sense(String),
    #[error("invalid number {0:?}")]
    Number(String),
}

/// Canonical 1-based name: `X_i_j_k`, `Y_i_j_ip_jp`, `B_i_j`, `Cmax`.
pub fn var_name(key: &VarKey) -> String {
    match *key {
        VarKey::X { job, subtask, machine } => format!("X_{}_{}_{}", job + 1, subtask + 1, machine + 1),
        VarKey::Y { job, subtask, other_job, other_subtask } => {
            format!("Y_{}_{}_{}_{}", job + 1, subtask + 1, other_job + 1, other_subtask + 1)
        }
        VarKey::B { job, subtask } => format!("B_{}_{}", job + 1, subtask + 1),
        VarKey::Cmax => "Cmax".to_string(),
    }
}

pub fn parse_var_name(name: &str) -> Option<VarKey> {
    if name == "Cmax" {
        return Some(VarKey::Cmax);
    }
    let mut parts = name.split('_');
    let head = parts.next()?;
    let idx: Vec<usize> = parts
        .map(|p| p.parse::<usize>().ok().filter(|v| *v > 0).map(|v| v - 1))
        .collect::<Option<_>>()?;
    match (head, idx.as_slice()) {
        ("X", &[job, subtask, machine]) => Some(VarKey::X { job, subtask, machine }),
        ("Y", &[job, subtask, other_job, other_subtask]) => {
            Some(VarKey::Y { job, subtask, other_job, other_subtask })
        }
        ("B", &[job, subtask]) => Some(VarKey::B { job, subtask }),
        _ => None,
    }
}

/// Exact decimal text of `value`, or an error when it does not terminate.
pub fn format_number(value: Time) -> Result<String, LpError> {
    if value.is_integer() {
        return Ok(value.to_integer().to_string());
    }
    let mut den = *value.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return Err(LpError::UnrepresentableCoefficient(value));
    }
    let digits = twos.max(fives);
    let scaled = value * Time::from_integer(10i64.pow(digits));
    let abs = scaled.to_integer().unsigned_abs();
    let scale = 10u64.pow(digits);
    let sign = if value.is_negative() { "-" } else { "" };
    Ok(format!("{sign}{}.{:0width$}", abs / scale, abs % scale, width = digits as usize))
}

fn write_expr(out: &mut String, terms: &[(Time, VarKey)]) -> Result<(), LpError> {
    if terms.is_empty() {
        out.push_str("0 Cmax");
        return Ok(());
    }
    for (n, (coef, key)) in terms.iter().enumerate() {
        let name = var_name(key);
        let magnitude = coef.abs();
        let sign = match (n, coef.is_negative()) {
            (0, false) => "",
            (0, true) => "- ",
            (_, false) => " + ",
            (_, true) => " - ",
        };
        out.push_str(sign);
        if !magnitude.is_one() {
            out.push_str(&format_number(magnitude)?);
            out.push(' ');
        }
        out.push_str(&name);
    }
    Ok(())
}

/// Writes the model as CPLEX-style LP text.
pub fn write_lp(model: &MilpModel) -> Result<String, LpError> {
    let mut out = String::new();
    out.push_str("Minimize\n");
    let _ = writeln!(out, " obj: {}", var_name(&model.objective()));
    out.push_str("Subject To\n");
    for (name, row) in model.row_names().iter().zip(&model.constraints) {
        let _ = write!(out, "{name}: ");
        write_expr(&mut out, &row.terms)?;
        let _ = writeln!(out, " {} {}", row.sense.symbol(), format_number(row.rhs)?);
    }
    out.push_str("Bounds\n");
    for var in model.vars.iter().filter(|v| !v.lower.is_zero()) {
        let _ = writeln!(out, " {} >= {}", var_name(&var.key), format_number(var.lower)?);
    }
    out.push_str("Binaries\n");
    for var in model.vars.iter().filter(|v| v.kind == VarKind::Binary) {
        let _ = writeln!(out, " {}", var_name(&var.key));
    }
    out.push_str("End\n");
    Ok(out)
}

/// Integer, or `"p/q"` for non-integral rationals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonNumber {
    Int(i64),
    Ratio(String),
}

impl JsonNumber {
    pub fn from_time(t: Time) -> Self {
        if t.is_integer() {
            JsonNumber::Int(t.to_integer())
        } else {
            JsonNumber::Ratio(format!("{}/{}", t.numer(), t.denom()))
        }
    }

    pub fn to_time(&self) -> Option<Time> {
        match self {
            JsonNumber::Int(v) => Some(Time::from_integer(*v)),
            JsonNumber::Ratio(s) => {
                let (p, q) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                let p = p.trim().parse::<i64>().ok()?;
                let q = q.trim().parse::<i64>().ok()?;
                (q != 0).then(|| Time::new(p, q))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonVar {
    name: String,
    kind: String,
    lb: JsonNumber,
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    name: String,
    terms: Vec<(JsonNumber, String)>,
    sense: String,
    rhs: JsonNumber,
}

#[derive(Serialize, Deserialize)]
struct JsonModel {
    vars: Vec<JsonVar>,
    constraints: Vec<JsonRow>,
    objective: String,
    big_m: i64,
}

fn kind_name(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Binary => "binary",
        VarKind::ContinuousNonNeg => "continuous",
    }
}

/// Writes the model dump `{"vars", "constraints", "objective", "big_m"}`.
pub fn write_json(model: &MilpModel) -> String {
    let doc = JsonModel {
        vars: model
            .vars
            .iter()
            .map(|v| JsonVar {
                name: var_name(&v.key),
                kind: kind_name(v.kind).to_string(),
                lb: JsonNumber::from_time(v.lower),
            })
            .collect(),
        constraints: model
            .row_names()
            .into_iter()
            .zip(&model.constraints)
            .map(|(name, row)| JsonRow {
                name,
                terms: row.terms.iter().map(|(c, k)| (JsonNumber::from_time(*c), var_name(k))).collect(),
                sense: row.sense.symbol().to_string(),
                rhs: JsonNumber::from_time(row.rhs),
            })
            .collect(),
        objective: var_name(&model.objective()),
        big_m: model.big_m,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("model JSON serializes");
    s.push('\n');
    s
}

/// Reads a model dump written by [`write_json`].
pub fn read_json(text: &str) -> Result<MilpModel, ModelJsonError> {
    let doc: JsonModel = serde_json::from_str(text)?;
    let number = |n: &JsonNumber| n.to_time().ok_or_else(|| ModelJsonError::Number(format!("{n:?}")));
    let key = |s: &str| parse_var_name(s).ok_or_else(|| ModelJsonError::VarName(s.to_string()));
    let vars = doc
        .vars
        .iter()
        .map(|v| {
            let kind = match v.kind.as_str() {
                "binary" => VarKind::Binary,
                "continuous" => VarKind::ContinuousNonNeg,
                other => return Err(ModelJsonError::VarName(other.to_string())),
            };
            Ok(Var { key: key(&v.name)?, kind, lower: number(&v.lb)? })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let constraints = doc
        .constraints
        .iter()
        .map(|row| {
            let family = row
                .name
                .rsplit_once('_')
                .and_then(|(tag, _)| Family::from_tag(tag))
                .ok_or_else(|| ModelJsonError::RowName(row.name.clone()))?;
            let sense = match row.sense.as_str() {
                "<=" => Sense::Le,
                "=" => Sense::Eq,
                ">=" => Sense::Ge,
                other => return Err(ModelJsonError::Sense(other.to_string())),
            };
            let terms = row
                .terms
                .iter()
                .map(|(c, v)| Ok((number(c)?, key(v)?)))
                .collect::<Result<Vec<_>, ModelJsonError>>()?;
            Ok(LinearConstraint { terms, sense, rhs: number(&row.rhs)?, family })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MilpModel { vars, constraints, big_m: doc.big_m })
}
