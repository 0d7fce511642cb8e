use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::commands::CliError;

/// A closed stdout (for example `| head`) is not worth a panic.
pub fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("summary serialises");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("artifact serialises");
    write_file(path, &(text + "\n"))
}

/// Ten significant digits, plain notation.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (9 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::input(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}
