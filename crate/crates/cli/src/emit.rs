//! Reports and their JSON and text renderings.

use serde::Serialize;
use serde_json::Value;

use crate::{Command, Options};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Invalid,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Invalid => 1,
            Status::Inconclusive => 3,
        }
    }

    pub fn check(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Invalid
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub status: Status,
    pub payload: Value,
}

/// The parsed command line, minus the model location and output format.
pub fn echo(command: &Command, options: &Options) -> Value {
    let mut v = serde_json::to_value(command).expect("command serializes");
    if let (Value::Object(m), Value::Object(o)) = (&mut v, serde_json::to_value(options).expect("options serialize")) {
        m.extend(o);
        m.retain(|_, x| *x != Value::Bool(false));
    }
    v
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json(report: &Report) -> String {
    let v = serde_json::to_value(report).expect("report serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

/// One `path: value` line per leaf.
pub fn text(report: &Report) -> String {
    let v = serde_json::to_value(report).expect("report serializes");
    let mut out = String::new();
    flatten(&mut out, String::new(), &v);
    out
}

fn flatten(out: &mut String, prefix: String, v: &Value) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(out, join(k), x);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(out, format!("{prefix}[{i}]"), x);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}
