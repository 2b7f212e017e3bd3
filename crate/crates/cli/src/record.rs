//! Result records and their CSV/JSON forms.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RecordDiagnostics {
    pub pre_clamp_sum: f64,
    pub boundary_mass: f64,
}

/// Everything a run produces. Wall time is reported on stderr only, so the
/// serialized record depends on the configuration alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config: Value,
    pub engine: String,
    pub n: usize,
    pub probs: Vec<f64>,
    pub cdf: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_cdf: Option<Vec<String>>,
    pub diagnostics: RecordDiagnostics,
    pub version: String,
    pub config_hash: String,
}

/// `x` with 17 significant digits in positional notation.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let sci = format!("{:.16e}", x);
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (16 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

impl ResultRecord {
    pub fn title(&self) -> String {
        let model = self.config.get("model").and_then(Value::as_str).unwrap_or("?");
        format!("{model}, n = {}, engine = {}", self.n, self.engine)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,ratio,prob,cdf\n");
        let n = self.n.max(1) as f64;
        for r in 0..self.probs.len() {
            let ratio = sig17(r as f64 / n);
            match (&self.exact, &self.exact_cdf) {
                (Some(p), Some(c)) => writeln!(s, "{r},{ratio},{},{}", p[r], c[r]),
                _ => writeln!(s, "{r},{ratio},{},{}", self.probs[r], self.cdf[r]),
            }
            .expect("writing to a String");
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed record: {e}")))
    }
}
