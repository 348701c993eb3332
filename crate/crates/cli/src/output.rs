use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => f.write_str(m),
        }
    }
}

pub fn input<E: fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub parameters: Value,
    pub tool_version: String,
}

/// Opens `--out` or stdout.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(p) => {
            let f =
                File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn write_json<W: Write + ?Sized>(w: &mut W, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, v).map_err(input)?;
    writeln!(w).map_err(input)
}

pub fn io_err(e: io::Error) -> CliError {
    CliError::Input(format!("write failed: {e}"))
}
