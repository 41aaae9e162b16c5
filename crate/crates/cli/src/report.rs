use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Machine-readable summary of one invocation. Fields that do not apply to
/// a subcommand are omitted from the JSON.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunReport {
    pub schema: u32,
    pub subcommand: String,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    /// `psi^T R psi` for `coil`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_r_psi: Option<f64>,
    pub outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(subcommand: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            inputs: Vec::new(),
            lambda_max: None,
            multiplicity: None,
            residual: None,
            psi_r_psi: None,
            outputs: Vec::new(),
            seed: None,
            wall_time_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
