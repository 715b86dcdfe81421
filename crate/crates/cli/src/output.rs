use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

/// Opens `path`, or stdout when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// `{"config": ..., "result": ...}`, pretty-printed.
pub fn write_json(path: Option<&Path>, config: &Value, result: &impl Serialize) -> Result<()> {
    let doc = json!({ "config": config, "result": result });
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// A `# config:` comment line followed by `body`.
pub fn write_with_header(
    path: Option<&Path>,
    config: &Value,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let mut w = sink(path)?;
    writeln!(w, "# config: {config}")?;
    body(&mut w)?;
    w.flush()?;
    Ok(())
}
