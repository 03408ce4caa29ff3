//! Output plumbing: atomic file writes and the sibling manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::{CliError, CliResult};

/// Writes via a temporary sibling and an atomic rename, so a failing
/// command never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension()
            .map(|e| e.to_string_lossy().into_owned())
            .unwrap_or_default(),
        std::process::id()
    ));
    let io_err = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(contents.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.push_str(".manifest.json");
    out.with_file_name(name)
}

/// Emits data plus manifest: to `out` and `out.manifest.json` when a path
/// is given, else the manifest (with the data embedded when it is JSON) to
/// stdout.
pub fn emit(out: Option<&Path>, data: &str, manifest: &Value, data_is_json: bool) -> CliResult<()> {
    match out {
        Some(path) => {
            write_atomic(path, data)?;
            let text = serde_json::to_string_pretty(manifest)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            write_atomic(&manifest_path(path), &text)
        }
        None => {
            if data_is_json {
                // Fold the data into the manifest so stdout stays a single
                // self-describing JSON document.
                let mut doc = manifest.clone();
                let parsed: Value = serde_json::from_str(data)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                doc.as_object_mut()
                    .expect("manifest is an object")
                    .insert("data".into(), parsed);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc)
                        .map_err(|e| CliError::Runtime(e.to_string()))?
                );
            } else {
                print!("{data}");
                let text = serde_json::to_string(manifest)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                eprintln!("{text}");
            }
            Ok(())
        }
    }
}
