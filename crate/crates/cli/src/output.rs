//! Exit codes, tolerance resolution, provenance and file output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use circortho::catalog::{write_jsonl, CatalogRecord, GeneratorData};
use circortho::CircError;

pub const PASS: u8 = 0;
pub const VERIFY_FAILED: u8 = 1;
pub const BAD_ARGS: u8 = 2;
pub const IO_FAILED: u8 = 3;
pub const PARSE_FAILED: u8 = 4;

pub const TOL_ENV: &str = "CIRCORTHO_TOL";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: BAD_ARGS,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Failure {
            code: IO_FAILED,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<CircError> for Failure {
    fn from(e: CircError) -> Self {
        let code = match e {
            CircError::Parse { .. } => PARSE_FAILED,
            CircError::Verification(_) => VERIFY_FAILED,
            CircError::Domain(_) | CircError::Structural { .. } | CircError::Refused(_) => BAD_ARGS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub type CmdResult = Result<u8, Failure>;

/// `--tol`, else `CIRCORTHO_TOL`, else `default`.
pub fn resolve_tol(flag: Option<f64>, default: f64) -> Result<f64, Failure> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Failure::usage(format!("{TOL_ENV}={v} is not a number")))?,
            Err(_) => default,
        },
    };
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Failure::usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(tol)
}

/// Seconds since the epoch; `SOURCE_DATE_EPOCH` pins it for reproducible output.
fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
    {
        return t;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn provenance(command: &str) -> String {
    format!("circortho {command} @ {}", timestamp())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(path, e))
}

pub fn write_catalog(path: &Path, records: &[CatalogRecord]) -> Result<(), Failure> {
    write_jsonl(create(path)?, records).map_err(|e| Failure::io(path, e))
}

pub fn write_csv(path: &Path, records: &[CatalogRecord]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let io = |e: csv::Error| Failure::io(path, e);
    w.write_record([
        "kind",
        "n",
        "d_squared",
        "d_approx",
        "canonical_key",
        "generator",
    ])
    .map_err(io)?;
    for r in records {
        let generator = match &r.generator {
            GeneratorData::Complex(p) => p
                .iter()
                .map(|[re, im]| format!("{re}{im:+}i"))
                .collect::<Vec<_>>()
                .join(" "),
            GeneratorData::Residues(v) => {
                v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
            }
        };
        let kind = serde_json::to_value(r.kind).map_err(|e| Failure::io(path, e))?;
        w.write_record([
            kind.as_str().unwrap_or_default().to_string(),
            r.n.to_string(),
            r.d_squared.to_string(),
            format!("{:.6}", r.d_squared.to_f64().sqrt()),
            r.canonical_key.clone(),
            generator,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Failure::io(path, e))
}

pub fn flush_stdout() {
    let _ = std::io::stdout().flush();
}
