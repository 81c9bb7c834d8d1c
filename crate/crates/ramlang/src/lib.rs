//! Command-line front end for `ramlang-core`.
//!
//! Every subcommand produces one JSON report with sorted keys. Rationals are
//! strings such as `"2/3"`, finite-field elements are arrays of integer
//! coefficients in the power basis of the field's modulus. A report records
//! the seed and the precision it was produced with, so reruns with the same
//! configuration are byte-identical.

pub mod cli;
pub mod commands;
pub mod json;
pub mod parse;
pub mod suites;

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

pub use cli::Cli;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
}

pub fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// Named options of a run: explicit flags first, then keys of the `--input`
/// JSON object.
#[derive(Debug, Clone, Default)]
pub struct Params {
    flags: BTreeMap<String, String>,
    input: Map<String, Value>,
}

impl Params {
    pub fn new(flags: BTreeMap<String, String>, input: Option<&str>) -> Result<Self, CliError> {
        let input = match input {
            None => Map::new(),
            Some(s) => match parse::load_json(s)? {
                Value::Object(m) => m,
                _ => return Err(CliError::Usage("--input must be a JSON object".into())),
            },
        };
        Ok(Self { flags, input })
    }

    /// Option `name` as text; JSON values other than strings are rendered
    /// back to JSON text.
    pub fn get(&self, name: &str) -> Option<String> {
        if let Some(v) = self.flags.get(name) {
            return Some(v.clone());
        }
        self.input.get(name).map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    pub fn require(&self, name: &str) -> Result<String, CliError> {
        self.get(name).ok_or_else(|| CliError::Usage(format!("missing --{name}")))
    }

    /// Every option that was set, for echoing into the report.
    pub fn echo(&self) -> Value {
        let mut m = Map::new();
        for k in self.input.keys().chain(self.flags.keys()) {
            if let Some(v) = self.get(k) {
                m.insert(k.clone(), Value::String(v));
            }
        }
        Value::Object(m)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `hh`, `tower`, `cft`, `dlparam`, `depth0` or `verify`.
    pub command: String,
    /// Action of `cft` (`counterexample` or `quotient`).
    pub action: Option<String>,
    pub params: Params,
    pub seed: u64,
    /// Starting Laurent-series precision for tower computations.
    pub prec: i64,
    pub suite: Option<String>,
}

/// Named pass/fail items of a run.
#[derive(Debug, Clone, Default)]
pub struct Checks {
    items: BTreeMap<String, (bool, Value)>,
}

impl Checks {
    pub fn record(&mut self, name: impl Into<String>, pass: bool, detail: Value) {
        self.items.insert(name.into(), (pass, detail));
    }

    /// Record the outcome of a fallible check; an error counts as a failure.
    pub fn record_result<E: std::fmt::Display>(&mut self, name: impl Into<String>, r: Result<(bool, Value), E>) {
        match r {
            Ok((pass, detail)) => self.record(name, pass, detail),
            Err(e) => self.record(name, false, json!({ "error": e.to_string() })),
        }
    }

    pub fn merge_prefixed(&mut self, prefix: &str, other: Checks) {
        for (k, v) in other.items {
            self.items.insert(format!("{prefix}/{k}"), v);
        }
    }

    pub fn passed(&self) -> bool {
        self.items.values().all(|(p, _)| *p)
    }

    pub fn failures(&self) -> Vec<String> {
        self.items.iter().filter(|(_, (p, _))| !p).map(|(k, _)| k.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let m: Map<String, Value> = self
            .items
            .iter()
            .map(|(k, (p, d))| (k.clone(), json!({ "pass": p, "detail": d })))
            .collect();
        Value::Object(m)
    }
}

/// A finished run: the report and its exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    /// Report text with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports are plain JSON");
        s.push('\n');
        s
    }
}

pub fn usage_outcome(command: &str, e: &CliError) -> Outcome {
    Outcome { report: json!({ "command": command, "error": e.to_string(), "pass": false }), code: EXIT_USAGE }
}

/// Run one configuration. Usage problems give exit code 2, failed
/// invariants exit code 1 with the failing items named in `failures`.
pub fn run(config: &RunConfig) -> Outcome {
    let res = match config.command.as_str() {
        "hh" => commands::hh(config),
        "tower" => commands::tower(config),
        "cft" => commands::cft(config),
        "dlparam" => commands::dlparam(config),
        "depth0" => commands::depth0(config),
        "verify" => suites::verify(config),
        other => Err(CliError::Usage(format!("unknown command {other}"))),
    };
    match res {
        Err(e) => usage_outcome(&config.command, &e),
        Ok((result, checks)) => {
            let pass = checks.passed();
            let mut report = json!({
                "command": config.command,
                "options": config.params.echo(),
                "seed": config.seed,
                "prec": config.prec,
                "pass": pass,
                "failures": checks.failures(),
                "checks": checks.to_json(),
                "result": result,
            });
            if let Some(a) = &config.action {
                report["action"] = Value::String(a.clone());
            }
            if let Some(s) = &config.suite {
                report["suite"] = Value::String(s.clone());
            }
            Outcome { report, code: if pass { EXIT_PASS } else { EXIT_INVARIANT } }
        }
    }
}
