use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEARCH_FAILED: i32 = 3;
pub const EXIT_EXPECTATION: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Records,
}

/// Outcome for one input item.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub item: String,
    pub verdict: &'static str,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
    /// Human-readable rendering.
    #[serde(skip)]
    pub text: String,
    /// Exit code this verdict asks for when it fails.
    #[serde(skip)]
    pub code: i32,
}

impl Verdict {
    pub fn pass(item: impl Into<String>, verdict: &'static str, text: String, detail: Value) -> Verdict {
        Verdict { item: item.into(), verdict, pass: true, detail, text, code: EXIT_PASS }
    }

    pub fn fail(item: impl Into<String>, verdict: &'static str, code: i32, text: String, detail: Value) -> Verdict {
        Verdict { item: item.into(), verdict, pass: false, detail, text, code }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub status: &'static str,
    pub passed: usize,
    pub total: usize,
    pub elapsed_ms: u64,
    pub exit_code: i32,
    #[serde(skip)]
    pub verdicts: Vec<Verdict>,
}

impl RunReport {
    pub fn new(command: String, verdicts: Vec<Verdict>, elapsed: Duration) -> RunReport {
        // Parse errors dominate, then the first other failure.
        let exit_code = if verdicts.iter().any(|v| v.code == EXIT_PARSE) {
            EXIT_PARSE
        } else {
            verdicts.iter().find(|v| !v.pass).map_or(EXIT_PASS, |v| v.code)
        };
        RunReport {
            command,
            status: if exit_code == EXIT_PASS { "pass" } else { "fail" },
            passed: verdicts.iter().filter(|v| v.pass).count(),
            total: verdicts.len(),
            elapsed_ms: elapsed.as_millis() as u64,
            exit_code,
            verdicts,
        }
    }

    /// Per-item text, one verdict after another.
    pub fn text_body(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            out.push_str(&v.text);
            if !v.text.ends_with('\n') {
                out.push('\n');
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        format!("{}: {}/{} passed in {} ms", self.status, self.passed, self.total, self.elapsed_ms)
    }

    /// One JSON object per verdict, then one for the whole run.
    pub fn records(&self) -> String {
        let mut out = String::new();
        for v in &self.verdicts {
            out.push_str(&serde_json::to_string(v).expect("serializable"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(self).expect("serializable"));
        out.push('\n');
        out
    }
}
