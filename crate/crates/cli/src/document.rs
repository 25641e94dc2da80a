use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope for every JSON result the tool prints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDocument {
    pub schema_version: String,
    pub tool_version: String,
    /// Subcommand path, e.g. `covdeg` or `balance check`.
    pub command: String,
    /// Arguments after the program name, as given.
    pub invocation: Vec<String>,
    pub problem: Value,
    pub result: Value,
    pub provenance: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl CertificateDocument {
    pub fn new(command: &str, invocation: &[String], problem: Value, result: Value, provenance: Value) -> Self {
        CertificateDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            invocation: invocation.to_vec(),
            problem,
            result,
            provenance,
            timing_ms: None,
        }
    }

    /// Pretty JSON with keys sorted at every level, newline-terminated.
    /// Re-serializing a parsed document reproduces it byte for byte.
    pub fn to_canonical_json(&self) -> String {
        canonical_json(&serde_json::to_value(self).expect("document serializes"))
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let doc: CertificateDocument =
            serde_json::from_str(text).map_err(|e| format!("invalid certificate document: {e}"))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema version {:?}, expected {SCHEMA_VERSION:?}",
                doc.schema_version
            ));
        }
        Ok(doc)
    }
}

/// `serde_json::Value` objects are ordered maps, so keys come out sorted.
pub fn canonical_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}
