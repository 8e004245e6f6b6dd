//! The structured run report. Text output is a rendering of it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use locspec::certificate::Certificate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub v: u32,
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, Value>,
    pub verdicts: Vec<Value>,
    pub certificates: Vec<Certificate>,
    pub timings_ms: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
    pub errors: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            v: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            config: BTreeMap::new(),
            verdicts: Vec::new(),
            certificates: Vec::new(),
            timings_ms: BTreeMap::new(),
            warnings: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.config.insert(key.to_string(), to_value(value));
        self
    }

    pub fn verdict(&mut self, value: impl Serialize) -> &mut Self {
        self.verdicts.push(to_value(value));
        self
    }

    /// Runs `f` and records its wall time under `label`.
    pub fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings_ms
            .insert(label.to_string(), start.elapsed().as_millis() as u64);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// JSON with every timing set to zero, for determinism comparisons.
    pub fn to_json_masked(&self) -> String {
        let mut masked = self.clone();
        masked.timings_ms.values_mut().for_each(|t| *t = 0);
        masked.to_json()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} (seed {})", self.command, self.seed);
        for (k, v) in &self.config {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for v in &self.verdicts {
            let _ = writeln!(out, "verdict: {v}");
        }
        for c in &self.certificates {
            let _ = writeln!(out, "certificate: {} (replay with --replay)", c.kind());
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for e in &self.errors {
            let _ = writeln!(out, "error: {e}");
        }
        let total: u64 = self.timings_ms.values().sum();
        let _ = writeln!(out, "time: {total} ms");
        out
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report values always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masking_only_touches_timings() {
        let mut a = RunReport::new("core", 3);
        a.config("dim", 4).verdict(serde_json::json!({"core_dim": 0}));
        let mut b = a.clone();
        a.timings_ms.insert("total".into(), 12);
        b.timings_ms.insert("total".into(), 40);
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(a.to_json_masked(), b.to_json_masked());
        let back: RunReport = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
    }
}
