//! Input parsing, output rendering, and the process exit-code policy.
//!
//! Every failure is one of three kinds: bad input or a chart/spectrum
//! problem (exit 2), a numeric overflow of a flow exponent (exit 3), or a
//! verification that ran fine but did not meet its tolerance (exit 1).

use std::fs;
use std::path::PathBuf;

use isoflow::{Error, Matrix, Permutation};
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Overflow(String),
    Check(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Overflow(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Overflow(m) | Failure::Check(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Overflow { .. } => Failure::Overflow(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// On-disk matrix format: {"n": 2, "rows": [[5.0, 1.0], [1.0, 5.0]]}.
/// Standard JSON cannot encode NaN or infinities, so finiteness holds by
/// construction; the shape checks live in Matrix::from_rows.
#[derive(Serialize, Deserialize)]
struct MatrixJson {
    n: usize,
    rows: Vec<Vec<f64>>,
}

/// Accepts either a path to a JSON file or the JSON object inline.
pub fn read_matrix(spec: &str) -> Result<Matrix, Failure> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        fs::read_to_string(spec)
            .map_err(|e| Failure::Input(format!("cannot read matrix from {spec}: {e}")))?
    };
    let parsed: MatrixJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("matrix is not valid JSON: {e}")))?;
    if parsed.rows.len() != parsed.n {
        return Err(Failure::Input(format!(
            "matrix declares n = {} but has {} rows",
            parsed.n,
            parsed.rows.len()
        )));
    }
    Ok(Matrix::from_rows(&parsed.rows)?)
}

/// Comma separated one-based images, e.g. "2,1,3".
pub fn parse_perm(spec: &str, n: usize) -> Result<Permutation, Failure> {
    let images: Vec<usize> = spec
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Input(format!("bad permutation entry {part:?} in {spec:?}")))
        })
        .collect::<Result<_, _>>()?;
    if images.len() != n {
        return Err(Failure::Input(format!(
            "permutation {spec:?} has {} entries, the matrix needs {n}",
            images.len()
        )));
    }
    Ok(Permutation::from_one_based(&images)?)
}

/// Command-line tolerance, then the ISOFLOW_TOL environment variable, then
/// the per-command default.
pub fn tolerance(flag: Option<f64>, default: f64) -> Result<f64, Failure> {
    let value = match flag {
        Some(v) => v,
        None => match std::env::var("ISOFLOW_TOL") {
            Ok(text) => text.parse::<f64>().map_err(|_| {
                Failure::Input(format!("ISOFLOW_TOL is set to {text:?}, not a number"))
            })?,
            Err(_) => default,
        },
    };
    if !value.is_finite() || value <= 0.0 {
        return Err(Failure::Input(format!("tolerance must be positive and finite, got {value}")));
    }
    Ok(value)
}

/// 17 significant digits: enough to reparse the exact f64.
pub fn fmt16(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_out(target: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match target {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize infallibly");
    text.push('\n');
    text
}
