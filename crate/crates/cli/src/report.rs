//! Reports shared by the human and JSON renderers.
//!
//! Both renderers print residuals through `serde_json`, so the numbers are
//! byte-identical between the two formats.

use std::fmt::Write as _;

use contactkit::Check;
use serde_json::{json, Map, Value};

use crate::spec::SystemSpec;

#[derive(Clone, Debug)]
struct Entry {
    key: String,
    check: Check,
    asserted: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub system: Value,
    pub results: Map<String, Value>,
    entries: Vec<Entry>,
    failed: bool,
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn render(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new(command: &str, spec: &SystemSpec) -> Report {
        let domain: Map<String, Value> = spec
            .coords
            .iter()
            .zip(&spec.domain)
            .map(|(n, (lo, hi))| (n.clone(), json!([number(*lo), number(*hi)])))
            .collect();
        let system = json!({
            "dim": spec.coords.len(),
            "coords": spec.coords,
            "eta": spec.eta_form().to_string(),
            "hamiltonian": spec.hamiltonian.to_string(),
            "domain": domain,
            "seed": spec.seed,
            "samples": spec.sampling.samples,
            "tol": number(spec.sampling.tol),
        });
        Report {
            command: command.to_string(),
            system,
            results: Map::new(),
            entries: Vec::new(),
            failed: false,
        }
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    fn push(&mut self, group: &str, check: &Check, asserted: bool) {
        let base = format!("{group}: {}", check.name);
        let mut key = base.clone();
        let mut k = 2;
        while self.entries.iter().any(|e| e.key == key) {
            key = format!("{base} #{k}");
            k += 1;
        }
        self.entries.push(Entry {
            key,
            check: check.clone(),
            asserted,
        });
    }

    /// An identity whose failure fails the command.
    pub fn check(&mut self, group: &str, check: &Check) {
        self.push(group, check, true);
    }

    pub fn checks<'a>(&mut self, group: &str, checks: impl IntoIterator<Item = &'a Check>) {
        for c in checks {
            self.check(group, c);
        }
    }

    /// Reported but never fails the command.
    pub fn diagnostic(&mut self, group: &str, check: &Check) {
        self.push(group, check, false);
    }

    pub fn fail(&mut self) {
        self.failed = true;
    }

    pub fn passed(&self) -> bool {
        !self.failed && self.entries.iter().all(|e| !e.asserted || e.check.passed)
    }

    pub fn to_json(&self) -> Value {
        let residuals: Map<String, Value> = self
            .entries
            .iter()
            .map(|e| (e.key.clone(), number(e.check.residual)))
            .collect();
        let witnesses: Map<String, Value> = self
            .entries
            .iter()
            .filter_map(|e| {
                let w = e.check.witness.as_ref()?;
                Some((e.key.clone(), Value::Array(w.iter().map(|v| number(*v)).collect())))
            })
            .collect();
        json!({
            "command": self.command,
            "system": self.system,
            "results": self.results,
            "residuals": residuals,
            "witnesses": witnesses,
            "passed": self.passed(),
        })
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let s = &self.system;
        let _ = writeln!(out, "contactkit {}", self.command);
        let coords: Vec<String> = s["coords"]
            .as_array()
            .map(|a| a.iter().map(render).collect())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "system: ({}), eta = {}, H = {}",
            coords.join(", "),
            render(&s["eta"]),
            render(&s["hamiltonian"])
        );
        if !self.results.is_empty() {
            out.push_str("results:\n");
            for (k, v) in &self.results {
                match v {
                    Value::Array(items) if items.iter().all(|i| i.is_string()) && !items.is_empty() => {
                        let _ = writeln!(out, "  {k}:");
                        for i in items {
                            let _ = writeln!(out, "    {}", render(i));
                        }
                    }
                    _ => {
                        let _ = writeln!(out, "  {k}: {}", render(v));
                    }
                }
            }
        }
        if !self.entries.is_empty() {
            out.push_str("residuals:\n");
            for e in &self.entries {
                let status = match (e.check.passed, e.asserted) {
                    (true, true) => "ok  ",
                    (false, true) => "FAIL",
                    (_, false) => "info",
                };
                let _ = write!(out, "  {status} {}  {}", e.key, number(e.check.residual));
                if let Some(w) = &e.check.witness {
                    let _ = write!(out, "  at {}", Value::Array(w.iter().map(|v| number(*v)).collect()));
                }
                out.push('\n');
            }
        }
        let _ = writeln!(out, "{}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}
