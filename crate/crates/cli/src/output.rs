//! CSV and JSON writers with the `<out>.meta.json` sidecar.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use yb_faraday::io::Table;

use crate::CliError;

pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// A closed pipe on stdout ends the output quietly.
fn to_stdout(bytes: &[u8]) -> Result<(), CliError> {
    match io::stdout().lock().write_all(bytes) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Writes `table` to `out`, or to stdout when `out` is `None`.
pub fn write_table(table: &Table, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            table.write_csv(&mut w)?;
            w.flush().map_err(io_err(path))
        }
        None => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            to_stdout(&buf)
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    match out {
        Some(path) => {
            let mut w = create(path)?;
            writeln!(w, "{text}").map_err(io_err(path))?;
            w.flush().map_err(io_err(path))
        }
        None => to_stdout(format!("{text}\n").as_bytes()),
    }
}

/// Writes the sidecar next to `out`; nothing is written for stdout output.
pub fn write_meta(out: Option<&Path>, command: &str, parameters: Value) -> Result<(), CliError> {
    let Some(out) = out else { return Ok(()) };
    let meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "output": out.file_name().map(|n| n.to_string_lossy().into_owned()),
        "parameters": parameters,
    });
    write_json(&meta, Some(&meta_path(out)))
}
