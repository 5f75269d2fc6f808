//! JSON run report.

use conicsub::{DiagnosticsReport, RefinementConfig, StepDiagnostics};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport<'a> {
    pub levels: &'a [StepDiagnostics],
    pub config: &'a RefinementConfig,
    /// SHA-256 of the raw input bytes, lowercase hex.
    pub input_sha256: String,
    pub input_points: usize,
    pub output_points: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn report_json(
    report: &DiagnosticsReport,
    config: &RefinementConfig,
    input: &[u8],
    input_points: usize,
    output_points: usize,
) -> String {
    let run =
        RunReport { levels: &report.levels, config, input_sha256: sha256_hex(input), input_points, output_points };
    let mut s = serde_json::to_string_pretty(&run).expect("report serializes");
    s.push('\n');
    s
}
