use std::fs;
use std::io::Write;
use std::path::Path;

use fracframe::{Result, VERSION};
use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
struct Envelope<'a, C, R> {
    version: &'a str,
    command: &'a str,
    seed: Option<u64>,
    config: &'a C,
    result: &'a R,
}

/// Report wrapper carrying the toolkit version and the full configuration.
pub fn envelope<C: Serialize, R: Serialize>(
    command: &str,
    seed: Option<u64>,
    config: &C,
    result: &R,
) -> Result<String> {
    let env = Envelope { version: VERSION, command, seed, config, result };
    Ok(serde_json::to_string_pretty(&env)?)
}

/// Appends a `provenance` member to a field document. Readers ignore it.
pub fn with_provenance<C: Serialize>(doc: String, command: &str, seed: Option<u64>, config: &C) -> Result<String> {
    let prov = serde_json::json!({ "version": VERSION, "command": command, "seed": seed, "config": config });
    let body = doc.strip_suffix('}').expect("field documents are JSON objects");
    Ok(format!("{body},\"provenance\":{}}}", serde_json::to_string(&prov)?))
}

/// Field document as a JSON value for inlining into a report.
pub fn inline_field(doc: &str) -> Result<Value> {
    Ok(serde_json::from_str(doc)?)
}

/// Writes `text` plus a trailing newline to `out`, or to stdout.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Comma-separated table with a header row and LF line endings.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn io(e: csv::Error) -> fracframe::Error {
    std::io::Error::from(e).into()
}
