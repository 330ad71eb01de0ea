//! CSV and JSON writers shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub const SCHEMA_PREFIX: &str = "changing-oracle";

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn sink(path: Option<&Path>, fallback: Box<dyn Write>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => fallback,
    })
}

/// Writes `# schema: changing-oracle/<schema>`, the header row and the data rows. `None`
/// writes to standard output.
pub fn write_csv(path: Option<&Path>, schema: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = sink(path, Box::new(io::stdout().lock()))?;
    writeln!(out, "# schema: {SCHEMA_PREFIX}/{schema}")?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Pretty JSON to `path`, or to standard error when `None`.
pub fn write_summary<S: Serialize>(path: Option<&Path>, value: &S) -> Result<()> {
    let mut out = sink(path, Box::new(io::stderr().lock()))?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Pretty JSON to `path`, or to standard output when `None`.
pub fn write_report<S: Serialize>(path: Option<&Path>, value: &S) -> Result<()> {
    let mut out = sink(path, Box::new(io::stdout().lock()))?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// One internal cross-check; the process exits nonzero if any fails.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub delta: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, delta: f64, tol: f64) -> Self {
        Check { name: name.into(), delta, tol, pass: delta <= tol }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
