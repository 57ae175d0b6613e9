//! Exit codes, diagnostics and output sinks.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use fpl_core::error::{
    DynamicsError, FormatError, GeneratorError, GeometryError, HomogeneityError, ParseError, RootError, StatsError,
};
use serde_json::json;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FORMAT: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

/// Bad or missing flag values discovered after argument parsing.
#[derive(Debug, thiserror::Error)]
pub enum UsageError {
    #[error("scaling needs --s (a number, or a boxdim/exponent report to read it from)")]
    MissingDimension,
    #[error("{0}")]
    Invalid(String),
}

/// Exit code and error kind for the first recognised cause in the chain.
pub fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<UsageError>() {
            return match e {
                UsageError::MissingDimension => (EXIT_USAGE, "MissingDimension"),
                UsageError::Invalid(_) => (EXIT_USAGE, "Usage"),
            };
        }
        if cause.is::<FormatError>() {
            return (EXIT_FORMAT, "FormatError");
        }
        if cause.is::<ParseError>() {
            return (EXIT_FORMAT, "ParseError");
        }
        if cause.is::<std::io::Error>() {
            return (EXIT_FORMAT, "IoError");
        }
        if cause.is::<serde_json::Error>() {
            return (EXIT_FORMAT, "FormatError");
        }
        if let Some(e) = cause.downcast_ref::<DynamicsError>() {
            let kind = match e {
                DynamicsError::ParabolicSuspected { .. } => "ParabolicSuspected",
                DynamicsError::NoAttractorFound { .. } => "NoAttractorFound",
                DynamicsError::DegreeTooLow(_) => "DegreeTooLow",
                DynamicsError::GridTooSmall { .. } => "GridTooSmall",
                DynamicsError::Roots(_) => "DidNotConverge",
                DynamicsError::Geometry(_) => "GeometryError",
            };
            return (EXIT_NUMERIC, kind);
        }
        if cause.is::<GeneratorError>() {
            return (EXIT_NUMERIC, "GeneratorError");
        }
        if cause.is::<StatsError>() {
            return (EXIT_NUMERIC, "StatsError");
        }
        if cause.is::<HomogeneityError>() {
            return (EXIT_NUMERIC, "HomogeneityError");
        }
        if cause.is::<RootError>() {
            return (EXIT_NUMERIC, "DidNotConverge");
        }
        if cause.is::<GeometryError>() {
            return (EXIT_NUMERIC, "GeometryError");
        }
    }
    (1, "Error")
}

pub fn report_error(err: &anyhow::Error) -> u8 {
    let (code, kind) = classify(err);
    let line = json!({ "error": kind, "message": format!("{err:#}"), "exit_code": code });
    eprintln!("{line}");
    code
}

/// One JSON object per line on stderr.
pub fn warn(message: impl AsRef<str>) {
    eprintln!("{}", json!({ "warning": message.as_ref() }));
}

pub fn sink(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    })
}

pub fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> anyhow::Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// `key=value` pairs for comment headers.
#[derive(Debug, Default, Clone)]
pub struct Header(pub Vec<(String, String)>);

impl Header {
    pub fn new(analysis: &str) -> Self {
        let mut h = Self::default();
        h.push("analysis", analysis);
        h.push("version", env!("CARGO_PKG_VERSION"));
        h
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        // newlines would break the comment block
        self.0.push((key.to_string(), value.to_string().replace('\n', " ")));
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Object(self.0.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
    }
}
