//! Report envelope shared by every command: echo of the command, model hash, scan
//! parameters, results, and wall time last so that everything before it is reproducible.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::ScanParams;
use crate::model::Model;

pub const TOOL: &str = concat!("torsplit ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Computed,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Computed => 0,
            Outcome::Inconclusive => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub command: Vec<String>,
    pub model_hash: Option<String>,
    pub params: ScanParams,
    pub outcome: Outcome,
    pub results: serde_json::Value,
    /// Human-readable rendering of `results`.
    pub table: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// SHA-256 of the canonical model text.
pub fn model_hash(model: &Model) -> String {
    Sha256::digest(model.to_text().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: &[String], model: Option<&Model>, params: &ScanParams) -> Report {
        Report {
            tool: TOOL.into(),
            command: command.to_vec(),
            model_hash: model.map(model_hash),
            params: params.clone(),
            outcome: Outcome::Computed,
            results: serde_json::Value::Null,
            table: Vec::new(),
            elapsed_ms: None,
        }
    }

    pub fn render_tree(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let p = &self.params;
        let mut out = vec![
            format!("tool     {}", self.tool),
            format!("command  {}", self.command.join(" ")),
            format!("model    {}", self.model_hash.as_deref().unwrap_or("-")),
            format!(
                "params   seed={} grid={} kmax={} amax={} mmax={} box=[{},{}] mthick={}",
                p.seed, p.grid, p.k_max, p.a_max, p.m_max, p.box_lo, p.box_hi, p.m_thick
            ),
            format!("outcome  {}", serde_json::to_value(self.outcome).expect("enum").as_str().unwrap_or("")),
            String::new(),
        ];
        out.extend(self.table.iter().cloned());
        if let Some(ms) = self.elapsed_ms {
            out.push(String::new());
            out.push(format!("time     {ms} ms"));
        }
        out.join("\n") + "\n"
    }

    /// The report with timing removed, for comparisons across runs.
    pub fn without_timing(&self) -> Report {
        Report { elapsed_ms: None, ..self.clone() }
    }
}
