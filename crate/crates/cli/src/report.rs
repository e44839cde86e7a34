//! Versioned reports. Everything outside `timing` is a function of the
//! command line and the configuration.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::config::Config;

pub const SCHEMA: &str = "dioph-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: Vec<String>,
    pub config: BTreeMap<&'static str, String>,
    pub config_hash: String,
    pub status: Status,
    pub results: Value,
    pub certificates: Vec<Value>,
    /// First failing case, when `status` is `Failed`.
    pub counterexample: Option<String>,
    /// Milliseconds per named step, plus `total`.
    pub timing: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: Vec<String>, config: &Config) -> Self {
        Report {
            command,
            config: config.canonical(),
            config_hash: config.hash(),
            status: Status::Ok,
            results: Value::Null,
            certificates: Vec::new(),
            counterexample: None,
            timing: BTreeMap::new(),
        }
    }

    /// Marks the report failed, keeping the first counterexample.
    pub fn fail(&mut self, counterexample: impl Into<String>) {
        self.status = Status::Failed;
        if self.counterexample.is_none() {
            self.counterexample = Some(counterexample.into());
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "config_hash": self.config_hash,
            "status": self.status.as_str(),
            "counterexample": self.counterexample,
            "results": self.results,
            "certificates": self.certificates,
            "timing": self.timing,
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    /// One `path: value` line per leaf of the results and certificates.
    pub fn render_text(&self) -> String {
        let mut out = format!("status: {}\n", self.status.as_str());
        if let Some(c) = &self.counterexample {
            out.push_str(&format!("counterexample: {c}\n"));
        }
        flatten("results", &self.results, &mut out);
        for (i, c) in self.certificates.iter().enumerate() {
            flatten(&format!("certificates[{i}]"), c, &mut out);
        }
        for (k, v) in &self.timing {
            out.push_str(&format!("timing.{k}: {v:.1} ms\n"));
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => flatten_map(prefix, m, out),
        Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            out.push_str(&format!("{prefix}: [{}]\n", items.join(", ")));
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        _ => out.push_str(&format!("{prefix}: {}\n", scalar(v))),
    }
}

fn flatten_map(prefix: &str, m: &Map<String, Value>, out: &mut String) {
    for (k, v) in m {
        flatten(&format!("{prefix}.{k}"), v, out);
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_rendering() {
        let mut r = Report::new(vec!["eds".into()], &Config::default());
        r.results = json!({"d_n": "25", "support": [5], "rows": [{"n": 1}]});
        r.fail("first");
        r.fail("second");
        let t = r.render_text();
        assert!(t.contains("status: failed\n"));
        assert!(t.contains("counterexample: first\n"));
        assert!(t.contains("results.support: [5]\n"));
        assert!(t.contains("results.rows[0].n: 1\n"));
    }
}
