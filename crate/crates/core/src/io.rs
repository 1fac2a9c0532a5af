//! JSON file formats.
//!
//! Operators: `{"dims": [d1, ...], "matrix": [[[re, im], ...], ...]}`, row-major.
//! Vectors: `{"dims": [d1, ...], "entries": [[re, im], ...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tensor::{ComplexVector, MultipartiteOperator, SubsystemDims, TensorError};
use crate::C64;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Shape { location: String, message: String },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorFile {
    dims: Vec<usize>,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorFile {
    dims: Vec<usize>,
    entries: Vec<[f64; 2]>,
}

fn syntax(e: serde_json::Error) -> IoError {
    IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn shape(location: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Shape {
        location: location.into(),
        message: message.into(),
    }
}

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn parse_operator(text: &str) -> Result<MultipartiteOperator, IoError> {
    let file: OperatorFile = serde_json::from_str(text).map_err(syntax)?;
    let dims = SubsystemDims::new(file.dims).map_err(|e| shape("dims", e.to_string()))?;
    let d = dims.total();
    if file.matrix.len() != d {
        return Err(shape(
            "matrix",
            format!("{} rows, expected {d} for dims {dims}", file.matrix.len()),
        ));
    }
    let mut data = Vec::with_capacity(d * d);
    for (i, row) in file.matrix.iter().enumerate() {
        if row.len() != d {
            return Err(shape(
                format!("matrix row {i}"),
                format!("{} entries, expected {d}", row.len()),
            ));
        }
        data.extend(row.iter().map(|[re, im]| C64::new(*re, *im)));
    }
    MultipartiteOperator::new(dims, data).map_err(|e| match e {
        TensorError::NotHermitian { row, col, deviation } => shape(
            format!("matrix entry ({row}, {col})"),
            format!("differs from the conjugate of ({col}, {row}) by {deviation:e}"),
        ),
        other => other.into(),
    })
}

pub fn operator_to_json(op: &MultipartiteOperator) -> String {
    let d = op.dim();
    let file = OperatorFile {
        dims: op.dims().as_slice().to_vec(),
        matrix: op.as_slice().chunks(d).map(|r| r.iter().map(pair).collect()).collect(),
    };
    serde_json::to_string(&file).expect("operator serializes")
}

pub fn parse_vector(text: &str) -> Result<ComplexVector, IoError> {
    let file: VectorFile = serde_json::from_str(text).map_err(syntax)?;
    let dims = SubsystemDims::new(file.dims).map_err(|e| shape("dims", e.to_string()))?;
    let entries = file.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
    ComplexVector::new(dims, entries).map_err(|e| shape("entries", e.to_string()))
}

pub fn vector_to_json(v: &ComplexVector) -> String {
    let file = VectorFile {
        dims: v.dims().as_slice().to_vec(),
        entries: v.entries().iter().map(pair).collect(),
    };
    serde_json::to_string(&file).expect("vector serializes")
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_operator(path: &Path) -> Result<MultipartiteOperator, IoError> {
    parse_operator(&read(path)?)
}

pub fn write_operator(path: &Path, op: &MultipartiteOperator) -> Result<(), IoError> {
    write(path, &operator_to_json(op))
}

pub fn read_vector(path: &Path) -> Result<ComplexVector, IoError> {
    parse_vector(&read(path)?)
}

pub fn write_vector(path: &Path, v: &ComplexVector) -> Result<(), IoError> {
    write(path, &vector_to_json(v))
}
