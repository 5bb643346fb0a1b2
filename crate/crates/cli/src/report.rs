use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::problem::SCHEMA_VERSION;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub spec_sha256: String,
    pub seed: u64,
    pub tool_version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub provenance: Provenance,
    pub tolerance: f64,
    pub dims: BTreeMap<String, usize>,
    pub checks: Vec<Check>,
    pub result: serde_json::Value,
    pub pass: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &str, spec_bytes: &[u8], seed: u64, tolerance: f64) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            provenance: Provenance {
                spec_sha256: sha256_hex(spec_bytes),
                seed,
                tool_version: env!("CARGO_PKG_VERSION"),
            },
            tolerance,
            dims: BTreeMap::new(),
            checks: Vec::new(),
            result: serde_json::Value::Null,
            pass: true,
        }
    }

    pub fn dim(&mut self, name: &str, value: usize) {
        self.dims.insert(name.to_string(), value);
    }

    /// Records `value ≤ tol`.
    pub fn check_tol(&mut self, name: impl Into<String>, value: f64, tol: f64) {
        let pass = value <= tol;
        self.pass &= pass;
        self.checks.push(Check { name: name.into(), value, tol, pass });
    }

    pub fn check(&mut self, name: impl Into<String>, value: f64) {
        self.check_tol(name, value, self.tolerance);
    }

    /// Exact comparison, recorded as `|a − b| ≤ 0`.
    pub fn check_eq(&mut self, name: impl Into<String>, a: usize, b: usize) {
        self.check_tol(name, a.abs_diff(b) as f64, 0.0);
    }

    pub fn set_result<T: Serialize>(&mut self, value: &T) {
        self.result = serde_json::to_value(value).expect("report values serialize");
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.pass { "ok" } else { "FAILED" });
        for (k, v) in &self.dims {
            out.push_str(&format!("  dim {k} = {v}\n"));
        }
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            out.push_str(&format!("  {mark} {:<48} {:.3e} (tol {:.1e})\n", c.name, c.value, c.tol));
        }
        out
    }
}
