use serde::Serialize;
use serde_json::{Map, Value};

use crate::decision::{BudgetRecord, Decision, DecisionOutcome, FailReason};
use crate::oracle::SubsetMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Solution,
    Fail,
    Report,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Solution | Status::Report => 0,
            Status::Fail => 2,
        }
    }
}

/// One run of an algorithm.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fail_reason: Option<FailReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<usize>>>,
    pub objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
    pub queries: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Outcome {
    pub fn solved(set: &SubsetMask, objective: f64, queries: u64, seed: u64) -> Self {
        Outcome {
            status: Status::Solution,
            fail_reason: None,
            solution: Some(set.to_vec()),
            blocks: None,
            objective: Some(objective),
            iterations: None,
            queries,
            seed,
            budget: None,
            details: None,
        }
    }

    /// `set` extracts the solution mask from a successful decision.
    pub fn from_decision<S: Serialize>(out: &DecisionOutcome<S>, set: impl Fn(&S) -> Option<&SubsetMask>) -> Self {
        let (status, fail_reason, solution, details) = match &out.status {
            Decision::Solution(s) => {
                let details = serde_json::to_value(s).ok();
                (Status::Solution, None, set(s).map(SubsetMask::to_vec), details)
            }
            Decision::Fail(r) => (Status::Fail, Some(*r), None, None),
        };
        Outcome {
            status,
            fail_reason,
            solution,
            blocks: None,
            objective: out.objective,
            iterations: Some(out.iterations),
            queries: out.queries,
            seed: out.seed,
            budget: Some(out.budget),
            details,
        }
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = Some(serde_json::to_value(details).expect("details serialize"));
        self
    }
}

/// Everything a command prints.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    /// Per-seed outcomes when `--trials` exceeds one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<Vec<Outcome>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solutions: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<Value>,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn from_outcomes(command: &str, mut outcomes: Vec<Outcome>) -> Self {
        let solutions = outcomes.iter().filter(|o| o.status == Status::Solution).count() as u64;
        let status = if solutions > 0 { Status::Solution } else { Status::Fail };
        let (outcome, runs, solutions) = if outcomes.len() == 1 {
            (outcomes.pop(), None, None)
        } else {
            (None, Some(outcomes), Some(solutions))
        };
        RunReport { command: command.into(), status, outcome, runs, solutions, report: None, wall_time_ms: 0.0 }
    }

    pub fn from_report(command: &str, report: impl Serialize) -> Self {
        RunReport {
            command: command.into(),
            status: Status::Report,
            outcome: None,
            runs: None,
            solutions: None,
            report: Some(serde_json::to_value(report).expect("report serializes")),
            wall_time_ms: 0.0,
        }
    }

    pub fn to_value(&self) -> Value {
        round_numbers(serde_json::to_value(self).expect("report serializes"))
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("float formats as float")
}

fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("is f64"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(o) => {
            for (k, v) in o {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let joined: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), joined.join(" ")));
        }
        Value::Array(_) => out.push((prefix.to_string(), v.to_string())),
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// One header row and one value row; nested arrays stay as JSON text.
pub fn to_csv(value: &Value) -> String {
    let mut cells = Vec::new();
    flatten("", value, &mut cells);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(cells.iter().map(|c| c.0.as_str())).expect("write to memory");
    w.write_record(cells.iter().map(|c| c.1.as_str())).expect("write to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

/// Drops `key` everywhere below `v`.
pub fn redact(v: &mut Value, key: &str) {
    match v {
        Value::Object(o) => {
            if o.contains_key(key) {
                o.insert(key.to_string(), Value::String("redacted".into()));
            }
            o.values_mut().for_each(|x| redact(x, key));
        }
        Value::Array(a) => a.iter_mut().for_each(|x| redact(x, key)),
        _ => {}
    }
}

pub(crate) fn object(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(-1.5), -1.5);
        assert_eq!(round12(123456789.123456789), 123456789.123);
        let v = round_numbers(json!({"a": [2.0f64.sqrt(), 3], "b": {"c": 1e-20 / 3.0}}));
        assert_eq!(v, json!({"a": [1.41421356237, 3], "b": {"c": 3.33333333333e-21}}));
    }

    #[test]
    fn csv_flattens_nested_fields() {
        let text = to_csv(&json!({"status": "report", "outcome": {"solution": [0, 2], "objective": -1.5}}));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("outcome.objective,outcome.solution,status"));
        assert_eq!(lines.next(), Some("-1.5,0 2,report"));
    }

    #[test]
    fn redaction_reaches_nested_objects() {
        let mut v = json!({"second": {"witness": [1, 2]}, "first": {"witness": [0]}});
        redact(&mut v, "witness");
        assert_eq!(v["second"]["witness"], "redacted");
    }
}
