//! Reference triple-loop Floyd-Warshall.

use crate::error::MatrixError;
use crate::matrix::{DistanceMatrix, PredecessorMatrix};
use crate::weight::Weight;

/// Classic `k, i, j` Floyd-Warshall on a copy of `input`.
///
/// `D[i][j]` is replaced by `D[i][k] + D[k][j]` and `P[i][j]` set to `k`
/// only on strict improvement, so ties keep the earlier path and an infinite
/// candidate never fires. `D[i][k]` is read once per `(k, i)`.
///
/// A negative cycle leaves a negative diagonal entry; see
/// [`detect_negative_cycle`].
pub fn fw_naive<T: Weight>(input: &DistanceMatrix<T>) -> Result<(DistanceMatrix<T>, PredecessorMatrix), MatrixError> {
    if let Some((row, col)) = input.find_nan() {
        return Err(MatrixError::NaN { row, col });
    }
    let n = input.n();
    let mut dist = input.clone();
    let mut pred = PredecessorMatrix::new(n)?;
    let d = dist.as_mut_slice();
    let p = pred.as_mut_slice();
    for k in 0..n {
        for i in 0..n {
            let d_ik = d[i * n + k];
            for j in 0..n {
                let cand = d_ik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                    p[i * n + j] = k as u32;
                }
            }
        }
    }
    Ok((dist, pred))
}

/// Some vertex on a negative cycle of a solved matrix, if any exists.
pub fn detect_negative_cycle<T: Weight>(solved: &DistanceMatrix<T>) -> Option<usize> {
    (0..solved.n()).find(|&i| solved.get(i, i) < T::ZERO)
}
