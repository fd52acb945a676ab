//! Tile-major working copy used by the blocked solvers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{MatrixError, PlanError};
use crate::kernel::{tile_update_with, Isa, TileSources};
use crate::matrix::{DistanceMatrix, PredecessorMatrix, NO_PREDECESSOR};
use crate::plan::{BlockedPlan, TileCoord};
use crate::weight::Weight;

/// Distances and predecessors stored tile by tile: tile `(bi, bj)` occupies
/// `tb * tb` contiguous elements in row-major order, tiles in row-major order.
#[derive(Clone)]
pub struct TiledMatrix<T> {
    plan: BlockedPlan,
    dist: Vec<T>,
    preds: Vec<u32>,
}

impl<T: Weight> TiledMatrix<T> {
    /// Copies a row-major matrix into tile-major order.
    pub fn from_row_major(matrix: &DistanceMatrix<T>, plan: BlockedPlan) -> Self {
        assert_eq!(matrix.n(), plan.n, "plan does not match matrix");
        let (n, tb) = (plan.n, plan.tb);
        let mut dist = Vec::with_capacity(n * n);
        for bi in 0..plan.rounds {
            for bj in 0..plan.rounds {
                for ii in 0..tb {
                    let row = matrix.row(bi * tb + ii);
                    dist.extend_from_slice(&row[bj * tb..(bj + 1) * tb]);
                }
            }
        }
        TiledMatrix {
            plan,
            dist,
            preds: vec![NO_PREDECESSOR; n * n],
        }
    }

    /// Converts back to row-major distance and predecessor matrices.
    pub fn into_row_major(self) -> Result<(DistanceMatrix<T>, PredecessorMatrix), MatrixError> {
        let (n, tb) = (self.plan.n, self.plan.tb);
        let mut dist = Vec::with_capacity(n * n);
        let mut preds = Vec::with_capacity(n * n);
        for i in 0..n {
            let (bi, ii) = (i / tb, i % tb);
            for bj in 0..self.plan.rounds {
                let off = self.plan.tile_offset(TileCoord::new(bi, bj)) + ii * tb;
                dist.extend_from_slice(&self.dist[off..off + tb]);
                preds.extend_from_slice(&self.preds[off..off + tb]);
            }
        }
        Ok((
            DistanceMatrix::from_vec(n, dist)?,
            PredecessorMatrix::from_vec_unchecked(n, preds),
        ))
    }

    pub fn plan(&self) -> &BlockedPlan {
        &self.plan
    }

    /// Raw tile-major buffers, for schedulers that partition tiles themselves.
    pub fn buffers_mut(&mut self) -> (&mut [T], &mut [u32]) {
        (&mut self.dist, &mut self.preds)
    }

    pub fn tile(&self, tile: TileCoord) -> &[T] {
        let off = self.plan.tile_offset(tile);
        &self.dist[off..off + self.plan.tile_len()]
    }

    /// Applies round `round`'s update to one tile.
    pub fn update_tile(&mut self, isa: Isa, tile: TileCoord, round: usize) {
        let plan = self.plan;
        let len = plan.tile_len();
        let k_base = (round * plan.tb) as u32;
        let w = plan.tile_offset(tile) / len;
        let (row_src, col_src) = tile.sources_in(round);
        let (a, b) = (plan.tile_offset(row_src) / len, plan.tile_offset(col_src) / len);

        let (before, rest) = self.dist.split_at_mut(w * len);
        let (write, after) = rest.split_at_mut(len);
        let source = |idx: usize| -> &[T] {
            if idx < w {
                &before[idx * len..(idx + 1) * len]
            } else {
                &after[(idx - w - 1) * len..(idx - w) * len]
            }
        };
        let sources = match tile.role_in(round) {
            crate::TileRole::Pivot => TileSources::Pivot,
            crate::TileRole::Row => TileSources::Row { pivot: source(a) },
            crate::TileRole::Col => TileSources::Col { pivot: source(b) },
            crate::TileRole::Outer => TileSources::Outer {
                row_src: source(a),
                col_src: source(b),
            },
        };
        let preds = &mut self.preds[w * len..(w + 1) * len];
        tile_update_with(isa, write, preds, sources, plan.tb, k_base);
    }
}

/// Single-threaded blocked Floyd-Warshall.
///
/// Runs the rounds in order with the same tile kernel as the parallel
/// scheduler; useful as a reference and on targets without threads.
pub fn fw_blocked_serial<T: Weight>(
    input: &DistanceMatrix<T>,
    tb: usize,
    isa: Isa,
) -> Result<(DistanceMatrix<T>, PredecessorMatrix), PlanError> {
    let plan = BlockedPlan::new(input.n(), tb, 1)?;
    let mut tiled = TiledMatrix::from_row_major(input, plan);
    for round in 0..plan.rounds {
        let phases = plan.phase_plan(round);
        tiled.update_tile(isa, phases.pivot, round);
        for &(tile, _) in &phases.row_col {
            tiled.update_tile(isa, tile, round);
        }
        for &tile in &phases.outer {
            tiled.update_tile(isa, tile, round);
        }
    }
    Ok(tiled
        .into_row_major()
        .expect("tile kernels never produce NaN from NaN-free input"))
}
