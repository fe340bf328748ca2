use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperationResult {
    pub operation: String,
    pub passed: bool,
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub all_passed: bool,
}

/// Wall-clock timings are kept out of the JSON form so that equal inputs give
/// byte-identical reports; the text form shows them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub banner: String,
    pub scenario: String,
    pub seed: u64,
    pub trunc: usize,
    pub config: Value,
    pub operations: Vec<OperationResult>,
    pub summary: Summary,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.summary.all_passed
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{} {} | scenario {} | seed {} | trunc {}\n{}\n", self.tool, self.version, self.scenario, self.seed, self.trunc, self.banner);
        for op in &self.operations {
            out.push_str(&format!(
                "  [{}] {} ({:.2?})\n",
                if op.passed { "pass" } else { "FAIL" },
                op.operation,
                op.elapsed
            ));
            for line in highlights(&op.result) {
                out.push_str(&format!("      {line}\n"));
            }
            for c in &op.caveats {
                out.push_str(&format!("      caveat: {c}\n"));
            }
        }
        out.push_str(&format!("  {} passed, {} failed\n", self.summary.passed, self.summary.failed));
        out
    }
}

/// Scalar fields and short string lists of an operation result, one per line.
fn highlights(v: &Value) -> Vec<String> {
    let Some(obj) = v.as_object() else {
        return vec![v.to_string()];
    };
    let mut out = Vec::new();
    for (k, x) in obj {
        match x {
            Value::Bool(_) | Value::Number(_) | Value::String(_) => out.push(format!("{k}: {}", x.to_string().trim_matches('"'))),
            Value::Array(items) if items.len() <= 4 && items.iter().all(|i| !i.is_object() && !i.is_array()) => {
                out.push(format!("{k}: {}", json!(items)));
            }
            Value::Object(inner) => {
                for (k2, y) in inner {
                    if matches!(y, Value::Bool(_) | Value::Number(_) | Value::String(_)) {
                        out.push(format!("{k}.{k2}: {}", y.to_string().trim_matches('"')));
                    }
                }
            }
            _ => {}
        }
    }
    out
}
