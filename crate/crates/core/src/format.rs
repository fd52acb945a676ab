//! Binary and CSV encodings of distance and predecessor matrices.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "APSP"
//! 4       2     format version (1)
//! 6       1     element code: 1 = f32, 2 = f64, 3 = u32 predecessor index
//! 7       1     reserved, 0
//! 8       8     n
//! 16      ..    n*n elements, row-major
//! ```
//!
//! Predecessor files store `0xFFFF_FFFF` for "no intermediate vertex".
//!
//! CSV: a line holding `n`, then `n` comma-separated rows. Infinity is spelled
//! `inf`; in predecessor CSV a missing intermediate is spelled `-`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{FormatError, MatrixError};
use crate::matrix::{AnyDistanceMatrix, DistanceMatrix, PredecessorMatrix, NO_PREDECESSOR};
use crate::weight::{DType, Weight};

pub const MAGIC: [u8; 4] = *b"APSP";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;
/// Element code of predecessor files.
pub const PREDECESSOR_CODE: u8 = 3;
/// CSV is a debugging format; larger matrices must use the binary encoding.
pub const CSV_MAX_N: usize = 1024;

fn write_header(out: &mut Vec<u8>, code: u8, n: usize) {
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(code);
    out.push(0);
    out.extend_from_slice(&(n as u64).to_le_bytes());
}

/// Parsed header fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub code: u8,
    pub n: usize,
}

pub fn read_header(bytes: &[u8]) -> Result<Header, FormatError> {
    if bytes.len() < 4 || bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(FormatError::TruncatedHeader(bytes.len()));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let code = bytes[6];
    if DType::from_code(code).is_none() && code != PREDECESSOR_CODE {
        return Err(FormatError::UnknownDType(code));
    }
    if bytes[7] != 0 {
        return Err(FormatError::BadReserved(bytes[7]));
    }
    let mut raw_n = [0u8; 8];
    raw_n.copy_from_slice(&bytes[8..16]);
    let n = u64::from_le_bytes(raw_n);
    if n == 0 {
        return Err(MatrixError::Empty.into());
    }
    let n = usize::try_from(n).map_err(|_| MatrixError::TooLarge(usize::MAX))?;
    if n > crate::matrix::MAX_VERTICES {
        return Err(MatrixError::TooLarge(n).into());
    }
    Ok(Header { code, n })
}

fn expected_payload(n: usize, elem: usize) -> u64 {
    (n as u64).saturating_mul(n as u64).saturating_mul(elem as u64)
}

fn check_payload(bytes: &[u8], n: usize, elem: usize) -> Result<(), FormatError> {
    let expected = expected_payload(n, elem);
    let actual = (bytes.len() - HEADER_LEN) as u64;
    if expected != actual {
        return Err(FormatError::SizeMismatch { expected, actual });
    }
    Ok(())
}

/// Encodes a distance matrix in the binary format.
pub fn encode_distances<T: Weight>(matrix: &DistanceMatrix<T>) -> Vec<u8> {
    let n = matrix.n();
    let mut out = Vec::with_capacity(HEADER_LEN + n * n * T::BYTES);
    write_header(&mut out, T::DTYPE.code(), n);
    let start = out.len();
    out.resize(start + n * n * T::BYTES, 0);
    for (chunk, &v) in out[start..].chunks_exact_mut(T::BYTES).zip(matrix.as_slice()) {
        v.write_le(chunk);
    }
    out
}

pub fn encode_any(matrix: &AnyDistanceMatrix) -> Vec<u8> {
    crate::with_matrix!(matrix, m => encode_distances(m))
}

fn decode_payload<T: Weight>(bytes: &[u8], n: usize) -> Result<DistanceMatrix<T>, FormatError> {
    check_payload(bytes, n, T::BYTES)?;
    let mut data = Vec::with_capacity(n * n);
    for (pos, chunk) in bytes[HEADER_LEN..].chunks_exact(T::BYTES).enumerate() {
        let v = T::read_le(chunk);
        if v.is_nan() {
            return Err(FormatError::NaNPayload {
                row: pos / n,
                col: pos % n,
            });
        }
        data.push(v);
    }
    Ok(DistanceMatrix::from_vec(n, data)?)
}

/// Decodes a binary distance matrix of either element type.
pub fn decode_distances(bytes: &[u8]) -> Result<AnyDistanceMatrix, FormatError> {
    let header = read_header(bytes)?;
    match DType::from_code(header.code) {
        Some(DType::F32) => Ok(decode_payload::<f32>(bytes, header.n)?.into()),
        Some(DType::F64) => Ok(decode_payload::<f64>(bytes, header.n)?.into()),
        None => Err(FormatError::DTypeMismatch {
            expected: "f32 or f64",
            found: "predecessor",
        }),
    }
}

/// Decodes a binary distance matrix, requiring element type `T`.
pub fn decode_distances_as<T: Weight>(bytes: &[u8]) -> Result<DistanceMatrix<T>, FormatError> {
    let header = read_header(bytes)?;
    if header.code != T::DTYPE.code() {
        let found = match DType::from_code(header.code) {
            Some(d) => d.token(),
            None => "predecessor",
        };
        return Err(FormatError::DTypeMismatch {
            expected: T::DTYPE.token(),
            found,
        });
    }
    decode_payload(bytes, header.n)
}

pub fn encode_predecessors(matrix: &PredecessorMatrix) -> Vec<u8> {
    let n = matrix.n();
    let mut out = Vec::with_capacity(HEADER_LEN + n * n * 4);
    write_header(&mut out, PREDECESSOR_CODE, n);
    for &v in matrix.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_predecessors(bytes: &[u8]) -> Result<PredecessorMatrix, FormatError> {
    let header = read_header(bytes)?;
    if header.code != PREDECESSOR_CODE {
        return Err(FormatError::DTypeMismatch {
            expected: "predecessor",
            found: DType::from_code(header.code).map_or("unknown", DType::token),
        });
    }
    let n = header.n;
    check_payload(bytes, n, 4)?;
    let data: Vec<u32> = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    PredecessorMatrix::from_vec(n, data).map_err(|e| match e {
        MatrixError::BadPredecessor { row, col, .. } => FormatError::BadPredecessor { row, col },
        other => other.into(),
    })
}

/// Renders a distance matrix as CSV.
pub fn distances_to_csv<T: Weight>(matrix: &DistanceMatrix<T>) -> Result<String, FormatError> {
    let n = matrix.n();
    if n > CSV_MAX_N {
        return Err(FormatError::CsvTooLarge { n, max: CSV_MAX_N });
    }
    let mut out = String::new();
    let _ = writeln!(out, "{n}");
    for i in 0..n {
        for (j, v) in matrix.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            // Display prints +inf as "inf" and finite values in shortest round-trip form
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn predecessors_to_csv(matrix: &PredecessorMatrix) -> Result<String, FormatError> {
    let n = matrix.n();
    if n > CSV_MAX_N {
        return Err(FormatError::CsvTooLarge { n, max: CSV_MAX_N });
    }
    let mut out = String::new();
    let _ = writeln!(out, "{n}");
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            match matrix.get(i, j) {
                None => out.push('-'),
                Some(k) => {
                    let _ = write!(out, "{k}");
                }
            }
        }
        out.push('\n');
    }
    Ok(out)
}

fn csv_err(line: usize, message: impl ToString) -> FormatError {
    FormatError::Csv {
        line,
        message: message.to_string(),
    }
}

/// Data rows as (1-based line number, trimmed text).
type CsvRows<'a> = Vec<(usize, &'a str)>;

/// Splits CSV text into the declared size and its data rows.
fn csv_rows(text: &str) -> Result<(usize, CsvRows<'_>), FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line_no, first) = lines.next().ok_or_else(|| csv_err(1, "missing size line"))?;
    let n: usize = first
        .parse()
        .map_err(|_| csv_err(line_no, "size line is not an integer"))?;
    if n == 0 {
        return Err(MatrixError::Empty.into());
    }
    if n > CSV_MAX_N {
        return Err(FormatError::CsvTooLarge { n, max: CSV_MAX_N });
    }
    let rows: Vec<_> = lines.collect();
    if rows.len() != n {
        return Err(csv_err(
            line_no,
            alloc::format!("declared {n} rows, found {}", rows.len()),
        ));
    }
    Ok((n, rows))
}

pub fn distances_from_csv<T: Weight>(text: &str) -> Result<DistanceMatrix<T>, FormatError> {
    let (n, rows) = csv_rows(text)?;
    let mut data = Vec::with_capacity(n * n);
    for (row, (line_no, line)) in rows.into_iter().enumerate() {
        let before = data.len();
        for (col, field) in line.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = match field {
                "inf" | "+inf" => f64::INFINITY,
                _ => field
                    .parse()
                    .map_err(|_| csv_err(line_no, alloc::format!("bad number {field:?}")))?,
            };
            if value.is_nan() {
                return Err(FormatError::NaNPayload { row, col });
            }
            data.push(T::from_f64(value));
        }
        if data.len() - before != n {
            return Err(csv_err(
                line_no,
                alloc::format!("expected {n} fields, found {}", data.len() - before),
            ));
        }
    }
    Ok(DistanceMatrix::from_vec(n, data)?)
}

pub fn predecessors_from_csv(text: &str) -> Result<PredecessorMatrix, FormatError> {
    let (n, rows) = csv_rows(text)?;
    let mut data = vec![NO_PREDECESSOR; n * n];
    for (row, (line_no, line)) in rows.into_iter().enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n {
            return Err(csv_err(
                line_no,
                alloc::format!("expected {n} fields, found {}", fields.len()),
            ));
        }
        for (col, field) in fields.into_iter().enumerate() {
            if field != "-" {
                let k: u32 = field.parse().map_err(|_| FormatError::BadPredecessor { row, col })?;
                data[row * n + col] = k;
            }
        }
    }
    PredecessorMatrix::from_vec(n, data).map_err(|e| match e {
        MatrixError::BadPredecessor { row, col, .. } => FormatError::BadPredecessor { row, col },
        other => other.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphGenSpec};

    #[test]
    fn binary_round_trip_both_dtypes() {
        let spec = GraphGenSpec::new(64, 7);
        let a = generate::<f32>(&spec).unwrap();
        let back = decode_distances(&encode_distances(&a)).unwrap();
        assert!(back.bit_eq(&AnyDistanceMatrix::F32(a)));
        let b = generate::<f64>(&spec).unwrap();
        let back = decode_distances_as::<f64>(&encode_distances(&b)).unwrap();
        assert!(back.bit_eq(&b));
    }

    #[test]
    fn header_layout() {
        let m = DistanceMatrix::<f64>::unconnected(3).unwrap();
        let bytes = encode_distances(&m);
        assert_eq!(&bytes[..4], b"APSP");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6], 2);
        assert_eq!(bytes[7], 0);
        assert_eq!(&bytes[8..16], &3u64.to_le_bytes());
        assert_eq!(bytes.len(), 16 + 9 * 8);
        assert_eq!(&bytes[16..24], &0.0f64.to_le_bytes());
        assert_eq!(&bytes[24..32], &f64::INFINITY.to_le_bytes());
    }

    #[test]
    fn distinct_decode_errors() {
        let m = DistanceMatrix::<f32>::unconnected(2).unwrap();
        let good = encode_distances(&m);

        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(decode_distances(&bad).unwrap_err(), FormatError::BadMagic);

        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(decode_distances(&bad).unwrap_err(), FormatError::UnsupportedVersion(2));

        let mut bad = good.clone();
        bad[6] = 9;
        assert_eq!(decode_distances(&bad).unwrap_err(), FormatError::UnknownDType(9));

        let mut bad = good.clone();
        bad.pop();
        assert!(matches!(
            decode_distances(&bad).unwrap_err(),
            FormatError::SizeMismatch {
                expected: 16,
                actual: 15
            }
        ));

        let mut bad = good.clone();
        bad[16 + 4..16 + 8].copy_from_slice(&f32::NAN.to_le_bytes());
        assert_eq!(
            decode_distances(&bad).unwrap_err(),
            FormatError::NaNPayload { row: 0, col: 1 }
        );

        assert!(matches!(
            decode_distances(&good[..10]).unwrap_err(),
            FormatError::TruncatedHeader(10)
        ));

        assert!(matches!(
            decode_distances_as::<f64>(&good).unwrap_err(),
            FormatError::DTypeMismatch { .. }
        ));
    }

    #[test]
    fn csv_renders_inf_token() {
        let m = DistanceMatrix::from_rows(&[[0.0f32, 5.0, f32::INFINITY], [3.0, 0.0, 2.0], [1.0, 6.0, 0.0]]).unwrap();
        let csv = distances_to_csv(&m).unwrap();
        assert_eq!(csv, "3\n0,5,inf\n3,0,2\n1,6,0\n");
        let back = distances_from_csv::<f32>(&csv).unwrap();
        assert!(back.bit_eq(&m));
    }

    #[test]
    fn csv_round_trip_fractional() {
        let m = DistanceMatrix::from_rows(&[[0.0f64, 0.1], [1.0 / 3.0, 0.0]]).unwrap();
        let back = distances_from_csv::<f64>(&distances_to_csv(&m).unwrap()).unwrap();
        assert!(back.bit_eq(&m));
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            distances_from_csv::<f32>("2\n0,1\n1\n").unwrap_err(),
            FormatError::Csv { line: 3, .. }
        ));
        assert!(matches!(
            distances_from_csv::<f32>("2\n0,NaN\n1,0\n").unwrap_err(),
            FormatError::NaNPayload { row: 0, col: 1 }
        ));
        assert!(matches!(
            distances_from_csv::<f32>("x\n").unwrap_err(),
            FormatError::Csv { line: 1, .. }
        ));
        let big = DistanceMatrix::<f32>::unconnected(CSV_MAX_N + 1).unwrap();
        assert!(matches!(
            distances_to_csv(&big).unwrap_err(),
            FormatError::CsvTooLarge { .. }
        ));
    }

    #[test]
    fn predecessor_round_trips() {
        let mut p = PredecessorMatrix::new(3).unwrap();
        p.set_raw(0, 2, 1);
        p.set_raw(2, 1, 0);
        let back = decode_predecessors(&encode_predecessors(&p)).unwrap();
        assert_eq!(back, p);
        let csv = predecessors_to_csv(&p).unwrap();
        assert_eq!(csv, "3\n-,-,1\n-,-,-\n-,0,-\n");
        assert_eq!(predecessors_from_csv(&csv).unwrap(), p);
    }

    #[test]
    fn predecessor_file_is_not_a_distance_file() {
        let p = PredecessorMatrix::new(2).unwrap();
        assert!(matches!(
            decode_distances(&encode_predecessors(&p)).unwrap_err(),
            FormatError::DTypeMismatch { .. }
        ));
        let m = DistanceMatrix::<f32>::unconnected(2).unwrap();
        assert!(matches!(
            decode_predecessors(&encode_distances(&m)).unwrap_err(),
            FormatError::DTypeMismatch { .. }
        ));
    }
}
