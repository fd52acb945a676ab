//! Dense row-major distance and predecessor matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::MatrixError;
use crate::weight::{DType, Weight};

/// Largest supported vertex count; predecessor entries are `u32` and
/// `u32::MAX` is reserved for [`NO_PREDECESSOR`].
pub const MAX_VERTICES: usize = u32::MAX as usize - 1;

/// Predecessor entry meaning "direct edge, no intermediate vertex".
pub const NO_PREDECESSOR: u32 = u32::MAX;

/// Dense `n x n` distance matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Weight> DistanceMatrix<T> {
    /// Matrix with zero diagonal and every other entry infinite.
    pub fn unconnected(n: usize) -> Result<Self, MatrixError> {
        check_n(n)?;
        let mut data = vec![T::INFINITY; n * n];
        for i in 0..n {
            data[i * n + i] = T::ZERO;
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Wraps a row-major buffer, rejecting wrong lengths and NaN entries.
    pub fn from_vec(n: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        check_n(n)?;
        if data.len() != n * n {
            return Err(MatrixError::ShapeMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| v.is_nan()) {
            return Err(MatrixError::NaN {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Builds a matrix from nested rows; handy in tests.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self, MatrixError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(MatrixError::ShapeMismatch {
                    expected: n * n,
                    actual: n * row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(n, data)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dtype(&self) -> DType {
        T::DTYPE
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Mutable access to the raw buffer. Callers must not write NaN.
    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// First NaN entry, if any.
    pub fn find_nan(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| v.is_nan())
            .map(|pos| (pos / self.n, pos % self.n))
    }

    /// `true` if every finite entry is an integer, so sums along paths are exact.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| !v.is_finite() || v.is_integral())
    }

    /// Bitwise equality, distinguishing `-0.0` from `0.0`.
    pub fn bit_eq(&self, other: &Self) -> bool {
        self.n == other.n && self.data.iter().zip(&other.data).all(|(a, b)| a.bits() == b.bits())
    }

    /// Grows the matrix to the next multiple of `tb` with unreachable vertices.
    ///
    /// New diagonal entries are 0 and every other new entry is infinite, so
    /// shortest paths among the original vertices are unaffected. Returns a
    /// clone when `n` is already a multiple of `tb`.
    pub fn pad_to_multiple(&self, tb: usize) -> Self {
        assert!(tb >= 1, "tile size must be positive");
        let padded = self.n.div_ceil(tb) * tb;
        if padded == self.n {
            return self.clone();
        }
        let mut data = vec![T::INFINITY; padded * padded];
        for i in 0..self.n {
            data[i * padded..i * padded + self.n].copy_from_slice(self.row(i));
        }
        for i in self.n..padded {
            data[i * padded + i] = T::ZERO;
        }
        DistanceMatrix { n: padded, data }
    }

    /// Top-left `n x n` block; inverse of [`pad_to_multiple`](Self::pad_to_multiple).
    pub fn truncate(&self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.n, "truncate size out of range");
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            data.extend_from_slice(&self.row(i)[..n]);
        }
        DistanceMatrix { n, data }
    }
}

impl<T: Weight> core::fmt::Debug for DistanceMatrix<T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "DistanceMatrix<{}>(n = {})", T::DTYPE, self.n)?;
        if self.n <= 16 {
            for i in 0..self.n {
                writeln!(f, "  {:?}", self.row(i))?;
            }
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<(), MatrixError> {
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    if n > MAX_VERTICES {
        return Err(MatrixError::TooLarge(n));
    }
    Ok(())
}

/// Dense `n x n` matrix of last intermediate vertices.
///
/// An entry is either [`NO_PREDECESSOR`] (the shortest path is the direct
/// edge) or the index of the last vertex that strictly improved the path.
#[derive(Clone, PartialEq, Eq)]
pub struct PredecessorMatrix {
    n: usize,
    data: Vec<u32>,
}

impl PredecessorMatrix {
    pub fn new(n: usize) -> Result<Self, MatrixError> {
        check_n(n)?;
        Ok(PredecessorMatrix {
            n,
            data: vec![NO_PREDECESSOR; n * n],
        })
    }

    /// Wraps raw entries, validating the structural invariants.
    pub fn from_vec(n: usize, data: Vec<u32>) -> Result<Self, MatrixError> {
        check_n(n)?;
        if data.len() != n * n {
            return Err(MatrixError::ShapeMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        for (pos, &value) in data.iter().enumerate() {
            let (row, col) = (pos / n, pos % n);
            if value == NO_PREDECESSOR {
                continue;
            }
            if value as usize >= n || value as usize == row || value as usize == col {
                return Err(MatrixError::BadPredecessor { row, col, value });
            }
        }
        Ok(PredecessorMatrix { n, data })
    }

    /// Wraps raw entries without validation. The verifier uses this to
    /// inspect deliberately malformed matrices.
    pub fn from_vec_unchecked(n: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), n * n);
        PredecessorMatrix { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Intermediate vertex of `(i, j)`, or `None` for a direct edge.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        match self.data[i * self.n + j] {
            NO_PREDECESSOR => None,
            k => Some(k as usize),
        }
    }

    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set_raw(&mut self, i: usize, j: usize, value: u32) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [u32] {
        &mut self.data
    }

    pub fn truncate(&self, n: usize) -> Self {
        assert!(n >= 1 && n <= self.n, "truncate size out of range");
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            data.extend_from_slice(&self.data[i * self.n..i * self.n + n]);
        }
        PredecessorMatrix { n, data }
    }
}

impl core::fmt::Debug for PredecessorMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "PredecessorMatrix(n = {})", self.n)?;
        if self.n <= 16 {
            for i in 0..self.n {
                let row: Vec<Option<usize>> = (0..self.n).map(|j| self.get(i, j)).collect();
                writeln!(f, "  {row:?}")?;
            }
        }
        Ok(())
    }
}

/// A distance matrix whose element type is only known at runtime.
#[derive(Clone, PartialEq, Debug)]
pub enum AnyDistanceMatrix {
    F32(DistanceMatrix<f32>),
    F64(DistanceMatrix<f64>),
}

impl AnyDistanceMatrix {
    pub fn n(&self) -> usize {
        match self {
            AnyDistanceMatrix::F32(m) => m.n(),
            AnyDistanceMatrix::F64(m) => m.n(),
        }
    }

    pub fn dtype(&self) -> DType {
        match self {
            AnyDistanceMatrix::F32(_) => DType::F32,
            AnyDistanceMatrix::F64(_) => DType::F64,
        }
    }

    pub fn bit_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (AnyDistanceMatrix::F32(a), AnyDistanceMatrix::F32(b)) => a.bit_eq(b),
            (AnyDistanceMatrix::F64(a), AnyDistanceMatrix::F64(b)) => a.bit_eq(b),
            _ => false,
        }
    }
}

impl From<DistanceMatrix<f32>> for AnyDistanceMatrix {
    fn from(m: DistanceMatrix<f32>) -> Self {
        AnyDistanceMatrix::F32(m)
    }
}

impl From<DistanceMatrix<f64>> for AnyDistanceMatrix {
    fn from(m: DistanceMatrix<f64>) -> Self {
        AnyDistanceMatrix::F64(m)
    }
}

/// Runs `$body` with `$m` bound to the typed matrix inside an
/// [`AnyDistanceMatrix`].
#[macro_export]
macro_rules! with_matrix {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            $crate::AnyDistanceMatrix::F32($m) => $body,
            $crate::AnyDistanceMatrix::F64($m) => $body,
        }
    };
}
