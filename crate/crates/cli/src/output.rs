use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, Result};
use crate::run::Output;

/// Writes `contents` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn json_text(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialise");
    text.push('\n');
    text
}

/// Writes `<name>.json` and, when present, `<name>.csv` into `dir`.
pub fn write_output(dir: &Path, output: &Output) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    let json_path = dir.join(format!("{}.json", output.name));
    write_atomic(&json_path, json_text(&output.json).as_bytes())?;
    written.push(json_path);
    if let Some(table) = &output.csv {
        let csv_path = dir.join(format!("{}.csv", output.name));
        write_atomic(&csv_path, table.to_csv().as_bytes())?;
        written.push(csv_path);
    }
    Ok(written)
}
