//! Matrix files on disk. Paths ending in `.csv` use the text format, every
//! other path the binary one.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use apsp_core::format::{
    decode_distances, decode_predecessors, distances_from_csv, distances_to_csv, encode_any, encode_predecessors,
    predecessors_from_csv, predecessors_to_csv,
};
use apsp_core::{with_matrix, AnyDistanceMatrix, DType, FormatError, PredecessorMatrix};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
}

impl IoError {
    fn io(path: &Path, source: io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn format(path: &Path, source: FormatError) -> Self {
        IoError::Format {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    fs::read(path).map_err(|e| IoError::io(path, e))
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    fs::write(path, bytes).map_err(|e| IoError::io(path, e))
}

/// Loads a distance matrix. CSV carries no element type, so `csv_dtype`
/// picks it (binary files record their own).
pub fn load_distances(path: &Path, csv_dtype: DType) -> Result<AnyDistanceMatrix, IoError> {
    if is_csv(path) {
        let text = read_text(path)?;
        let m = match csv_dtype {
            DType::F32 => distances_from_csv::<f32>(&text).map(AnyDistanceMatrix::from),
            DType::F64 => distances_from_csv::<f64>(&text).map(AnyDistanceMatrix::from),
        };
        m.map_err(|e| IoError::format(path, e))
    } else {
        decode_distances(&read_bytes(path)?).map_err(|e| IoError::format(path, e))
    }
}

pub fn save_distances(path: &Path, matrix: &AnyDistanceMatrix) -> Result<(), IoError> {
    if is_csv(path) {
        let text = with_matrix!(matrix, m => distances_to_csv(m)).map_err(|e| IoError::format(path, e))?;
        write_bytes(path, text.as_bytes())
    } else {
        write_bytes(path, &encode_any(matrix))
    }
}

pub fn load_predecessors(path: &Path) -> Result<PredecessorMatrix, IoError> {
    if is_csv(path) {
        predecessors_from_csv(&read_text(path)?).map_err(|e| IoError::format(path, e))
    } else {
        decode_predecessors(&read_bytes(path)?).map_err(|e| IoError::format(path, e))
    }
}

pub fn save_predecessors(path: &Path, matrix: &PredecessorMatrix) -> Result<(), IoError> {
    if is_csv(path) {
        let text = predecessors_to_csv(matrix).map_err(|e| IoError::format(path, e))?;
        write_bytes(path, text.as_bytes())
    } else {
        write_bytes(path, &encode_predecessors(matrix))
    }
}
