//! Shortest-path machinery that shares no code with the Floyd-Warshall
//! solvers: Dijkstra from every source, and path expansion from a
//! predecessor matrix.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{OracleError, PathError};
use crate::matrix::{DistanceMatrix, PredecessorMatrix};
use crate::weight::Weight;

#[derive(Clone, Copy)]
struct Frontier<T> {
    dist: T,
    vertex: usize,
}

impl<T: Weight> PartialEq for Frontier<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Weight> Eq for Frontier<T> {}

impl<T: Weight> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Weight> Ord for Frontier<T> {
    // reversed so the max-heap pops the nearest vertex
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .to_f64()
            .total_cmp(&self.dist.to_f64())
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// All-pairs distances by running Dijkstra from every source over the dense
/// adjacency interpretation of `input` (finite off-diagonal entry = edge).
pub fn dijkstra_apsp<T: Weight>(input: &DistanceMatrix<T>) -> Result<DistanceMatrix<T>, OracleError> {
    let n = input.n();
    for i in 0..n {
        for (j, &w) in input.row(i).iter().enumerate() {
            if w < T::ZERO {
                return Err(OracleError::NegativeWeight { row: i, col: j });
            }
        }
    }
    let mut out = DistanceMatrix::<T>::unconnected(n).expect("n > 0 for a valid matrix");
    let mut dist = vec![T::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for source in 0..n {
        dist.fill(T::INFINITY);
        done.fill(false);
        heap.clear();
        dist[source] = T::ZERO;
        heap.push(Frontier {
            dist: T::ZERO,
            vertex: source,
        });
        while let Some(Frontier { dist: du, vertex: u }) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for (v, &w) in input.row(u).iter().enumerate() {
                if v == u || done[v] || !w.is_finite() {
                    continue;
                }
                let candidate = du + w;
                if candidate < dist[v] {
                    dist[v] = candidate;
                    heap.push(Frontier {
                        dist: candidate,
                        vertex: v,
                    });
                }
            }
        }
        for (v, &d) in dist.iter().enumerate() {
            out.set(source, v, d);
        }
    }
    Ok(out)
}

/// A concrete path and its cost summed from the input edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace<T> {
    pub vertices: Vec<usize>,
    pub total_cost: T,
}

/// Expands the path `i -> j` recorded in `preds`.
///
/// A segment `(a, b)` with no predecessor is the direct edge `a -> b`; a
/// segment with predecessor `m` splits into `(a, m)` and `(m, b)`. Returns
/// `None` when `i` cannot reach `j`. Expansion is iterative and stops with an
/// error once it would need more than `2n` segments or revisits a vertex.
pub fn reconstruct_path<T: Weight>(
    preds: &PredecessorMatrix,
    input: &DistanceMatrix<T>,
    i: usize,
    j: usize,
) -> Result<Option<PathTrace<T>>, PathError> {
    let n = preds.n();
    if input.n() != n || i >= n || j >= n {
        return Err(PathError::OutOfRange { row: i, col: j, n });
    }
    if i == j {
        return Ok(Some(PathTrace {
            vertices: vec![i],
            total_cost: T::ZERO,
        }));
    }
    if preds.get(i, j).is_none() && !input.get(i, j).is_finite() {
        return Ok(None);
    }

    let mut vertices = vec![i];
    let mut visited = vec![false; n];
    visited[i] = true;
    let mut cost = T::ZERO;
    let mut stack = vec![(i, j)];
    let limit = 2 * n;
    let mut segments = 0usize;
    while let Some((a, b)) = stack.pop() {
        segments += 1;
        if segments > limit {
            return Err(PathError::TooDeep { from: i, to: j, limit });
        }
        match preds.get(a, b) {
            None => {
                let w = input.get(a, b);
                if !w.is_finite() {
                    return Err(PathError::MissingEdge { row: a, col: b });
                }
                if visited[b] {
                    return Err(PathError::Cycle {
                        from: i,
                        to: j,
                        vertex: b,
                    });
                }
                visited[b] = true;
                vertices.push(b);
                cost = cost + w;
            }
            Some(m) => {
                if m >= n || m == a || m == b {
                    return Err(PathError::BadIntermediate {
                        row: a,
                        col: b,
                        value: preds.raw(a, b),
                    });
                }
                stack.push((m, b));
                stack.push((a, m));
            }
        }
    }
    Ok(Some(PathTrace {
        vertices,
        total_cost: cost,
    }))
}
