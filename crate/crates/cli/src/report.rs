use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Replacement for the timestamp when comparing reports.
pub const MASKED_TIMESTAMP: &str = "<masked>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Symbolic,
    Matrix,
    ClockShift,
    Params,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Error => 2,
        }
    }
}

/// A named measurement. With a threshold it is a check: `value <= threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub threshold: Option<f64>,
}

impl Metric {
    pub fn check(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold: Some(threshold),
        }
    }

    pub fn info(name: &str, value: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold: None,
        }
    }

    /// NaN never satisfies a threshold.
    pub fn satisfied(&self) -> bool {
        self.threshold.is_none_or(|t| self.value <= t)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// From a CSV header line, e.g. `"N,M,mu"`.
    pub fn from_header(header: &str) -> Self {
        Self {
            columns: header.split(',').map(str::to_string).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_csv(&mut self, line: &str) {
        self.push(line.split(',').map(str::to_string).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub engine: Engine,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub metrics: Vec<Metric>,
    pub table: Option<Table>,
    pub tool_version: String,
    pub timestamp: String,
    pub schema_version: u32,
}

impl VerificationReport {
    /// Verdict is pass iff every thresholded metric holds.
    pub fn new(
        engine: Engine,
        command: &str,
        parameters: BTreeMap<String, Value>,
        metrics: Vec<Metric>,
        table: Option<Table>,
    ) -> Self {
        let verdict = if metrics.iter().all(Metric::satisfied) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            engine,
            command: command.to_string(),
            parameters,
            verdict,
            metrics,
            table,
            tool_version: TOOL_VERSION.to_string(),
            timestamp: now(),
            schema_version: SCHEMA_VERSION,
        }
    }

    pub fn error(engine: Engine, command: &str, parameters: BTreeMap<String, Value>) -> Self {
        Self {
            verdict: Verdict::Error,
            ..Self::new(engine, command, parameters, Vec::new(), None)
        }
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    /// The table if there is one, otherwise the metrics as `name,value,threshold`.
    pub fn to_csv(&self) -> String {
        match &self.table {
            Some(t) => t.to_csv(),
            None => {
                let mut t = Table::new(&["name", "value", "threshold"]);
                for m in &self.metrics {
                    let thr = m.threshold.map(fmt_f64).unwrap_or_default();
                    t.push(vec![m.name.clone(), fmt_f64(m.value), thr]);
                }
                t.to_csv()
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = serde_json::to_value(self.verdict).expect("verdict");
        let engine = serde_json::to_value(self.engine).expect("engine");
        let _ = writeln!(
            out,
            "{} {}: {}",
            self.command,
            engine.as_str().unwrap_or_default(),
            verdict.as_str().unwrap_or_default()
        );
        for (k, v) in &self.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for m in &self.metrics {
            let mark = match (m.threshold, m.satisfied()) {
                (None, _) => String::new(),
                (Some(t), true) => format!("  <= {}  ok", fmt_f64(t)),
                (Some(t), false) => format!("  <= {}  FAILED", fmt_f64(t)),
            };
            let _ = writeln!(out, "  {}: {}{mark}", m.name, fmt_f64(m.value));
        }
        if let Some(t) = &self.table {
            out.push('\n');
            out.push_str(&t.to_csv());
        }
        out
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Shortest round-trip scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// JSON text with the `timestamp` field replaced by [`MASKED_TIMESTAMP`].
pub fn mask_timestamp(json: &str) -> Result<String, serde_json::Error> {
    let mut value: Value = serde_json::from_str(json)?;
    if let Some(obj) = value.as_object_mut() {
        if obj.contains_key("timestamp") {
            obj.insert("timestamp".into(), Value::String(MASKED_TIMESTAMP.into()));
        }
    }
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_thresholds() {
        let params = BTreeMap::new();
        let pass = VerificationReport::new(
            Engine::Matrix,
            "verify",
            params.clone(),
            vec![Metric::check("a", 1.0, 1.0), Metric::info("b", 1e9)],
            None,
        );
        assert_eq!(pass.verdict, Verdict::Pass);
        let fail = VerificationReport::new(
            Engine::Matrix,
            "verify",
            params.clone(),
            vec![Metric::check("a", 1.5, 1.0)],
            None,
        );
        assert_eq!(fail.verdict, Verdict::Fail);
        let nan = VerificationReport::new(
            Engine::Matrix,
            "verify",
            params,
            vec![Metric::check("a", f64::NAN, 1.0)],
            None,
        );
        assert_eq!(nan.verdict, Verdict::Fail);
    }

    #[test]
    fn json_field_names() {
        let r =
            VerificationReport::new(Engine::ClockShift, "verify", BTreeMap::new(), vec![], None);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(
            keys,
            [
                "command",
                "engine",
                "metrics",
                "parameters",
                "schemaVersion",
                "table",
                "timestamp",
                "toolVersion",
                "verdict"
            ]
        );
        assert_eq!(v["engine"], "clock-shift");
        assert_eq!(v["schemaVersion"], 1);
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn masking_removes_only_the_timestamp() {
        let a = VerificationReport::new(Engine::Params, "verify", BTreeMap::new(), vec![], None);
        let mut b = a.clone();
        b.timestamp = "1970-01-01T00:00:00Z".into();
        assert_ne!(a.to_json(), b.to_json());
        assert_eq!(
            mask_timestamp(&a.to_json()).unwrap(),
            mask_timestamp(&b.to_json()).unwrap()
        );
    }

    #[test]
    fn csv_of_metrics() {
        let r = VerificationReport::new(
            Engine::Symbolic,
            "verify",
            BTreeMap::new(),
            vec![
                Metric::check("residual_terms", 0.0, 0.0),
                Metric::info("terms", 3.0),
            ],
            None,
        );
        assert_eq!(
            r.to_csv(),
            "name,value,threshold\nresidual_terms,0e0,0e0\nterms,3e0,\n"
        );
    }
}
