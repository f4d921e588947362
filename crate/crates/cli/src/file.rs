//! Matrix file format.
//!
//! ```json
//! {"n": 2, "H": [[[1, 0], [0, -1]], [[0, 4], [1, 0]]], "eta": ..., "phases": [[1, 0], [0, 1]]}
//! ```
//!
//! Complex numbers are `[re, im]` pairs, matrices are row-major nested
//! arrays. `eta` has the shape of `H`; `phases` holds one unit factor per
//! eigenvector.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use pseudoherm::ComplexSquareMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("field `{field}`: matrix is not square ({rows} rows, row {row} has {cols} entries)")]
    NonSquare {
        field: String,
        rows: usize,
        row: usize,
        cols: usize,
    },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    n: usize,
    #[serde(rename = "H")]
    h: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phases: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub h: ComplexSquareMatrix,
    pub eta: Option<ComplexSquareMatrix>,
    pub phases: Option<Vec<Complex64>>,
}

impl MatrixFile {
    pub fn new(h: ComplexSquareMatrix) -> Self {
        Self {
            h,
            eta: None,
            phases: None,
        }
    }
}

pub fn to_pairs(m: &ComplexSquareMatrix) -> Vec<Vec<[f64; 2]>> {
    m.rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn from_pairs(field: &str, n: usize, rows: &[Vec<[f64; 2]>]) -> Result<ComplexSquareMatrix, FileError> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != rows.len() {
            return Err(FileError::NonSquare {
                field: field.into(),
                rows: rows.len(),
                row: i,
                cols: row.len(),
            });
        }
    }
    if rows.len() != n {
        return Err(FileError::Field {
            field: field.into(),
            message: format!("expected {n}x{n}, found {0}x{0}", rows.len()),
        });
    }
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if !(z[0].is_finite() && z[1].is_finite()) {
                return Err(FileError::Field {
                    field: format!("{field}[{i}][{j}]"),
                    message: "entry is not finite".into(),
                });
            }
        }
    }
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|z| Complex64::new(z[0], z[1])).collect())
        .collect();
    ComplexSquareMatrix::from_rows(&rows).map_err(|e| FileError::Field {
        field: field.into(),
        message: e.to_string(),
    })
}

pub fn parse_matrix_str(text: &str) -> Result<MatrixFile, FileError> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| FileError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.n == 0 {
        return Err(FileError::Field {
            field: "n".into(),
            message: "dimension must be positive".into(),
        });
    }
    let h = from_pairs("H", raw.n, &raw.h)?;
    let eta = raw
        .eta
        .as_deref()
        .map(|rows| from_pairs("eta", raw.n, rows))
        .transpose()?;
    let phases = match raw.phases {
        None => None,
        Some(p) => {
            if p.len() != raw.n {
                return Err(FileError::Field {
                    field: "phases".into(),
                    message: format!("expected {} entries, found {}", raw.n, p.len()),
                });
            }
            let mut out = Vec::with_capacity(p.len());
            for (k, z) in p.iter().enumerate() {
                let z = Complex64::new(z[0], z[1]);
                if !z.is_finite() || (z.norm() - 1.0).abs() > 1e-9 {
                    return Err(FileError::Field {
                        field: format!("phases[{k}]"),
                        message: "phase must have unit modulus".into(),
                    });
                }
                out.push(z);
            }
            Some(out)
        }
    };
    Ok(MatrixFile { h, eta, phases })
}

pub fn parse_matrix_file(path: &Path) -> Result<MatrixFile, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_str(&text)
}

/// One matrix row per line; parses back to the identical bits.
pub fn write_matrix_str(file: &MatrixFile) -> String {
    fn matrix(out: &mut String, rows: &[Vec<[f64; 2]>]) {
        out.push_str("[\n");
        for (i, row) in rows.iter().enumerate() {
            let row = serde_json::to_string(row).expect("finite entries");
            let sep = if i + 1 < rows.len() { "," } else { "" };
            let _ = writeln!(out, "    {row}{sep}");
        }
        out.push_str("  ]");
    }
    let mut out = String::from("{\n");
    let _ = write!(out, "  \"n\": {},\n  \"H\": ", file.h.dim());
    matrix(&mut out, &to_pairs(&file.h));
    if let Some(eta) = &file.eta {
        out.push_str(",\n  \"eta\": ");
        matrix(&mut out, &to_pairs(eta));
    }
    if let Some(phases) = &file.phases {
        let pairs: Vec<[f64; 2]> = phases.iter().map(|z| [z.re, z.im]).collect();
        let _ = write!(
            out,
            ",\n  \"phases\": {}",
            serde_json::to_string(&pairs).expect("finite entries")
        );
    }
    out.push_str("\n}\n");
    out
}

pub fn write_matrix_file(path: &Path, file: &MatrixFile) -> Result<(), FileError> {
    std::fs::write(path, write_matrix_str(file)).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}
