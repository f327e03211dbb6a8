pub mod family;
pub mod reproduce;
pub mod transform;
pub mod validate;

use std::path::Path;

use crate::config::RunConfig;
use crate::output::OutputWriter;
use crate::report::RunReport;
use crate::CliError;

/// Writes the resolved configuration and the run report; the report lists
/// every previously emitted file with row counts and checksums.
pub fn finish_run(
    writer: &mut OutputWriter,
    config: &RunConfig,
    mut report: RunReport,
) -> Result<RunReport, CliError> {
    let mut resolved = serde_json::to_string_pretty(config).expect("config serializes");
    resolved.push('\n');
    writer.write_bytes("resolved_config.json", resolved.as_bytes())?;
    report.files = writer.manifest().to_vec();
    let path = writer.directory().join("report.json");
    std::fs::write(&path, report.to_json())
        .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))?;
    Ok(report)
}

/// Output directory resolution: `--out` wins over the config.
pub fn resolve_out_dir<'a>(config: &'a RunConfig, out: Option<&'a Path>) -> &'a Path {
    out.unwrap_or_else(|| Path::new(&config.outputs.directory))
}
