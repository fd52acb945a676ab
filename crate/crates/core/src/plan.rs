//! Round and phase structure of blocked Floyd-Warshall.
//!
//! The matrix is cut into `tb x tb` tiles, `r = n / tb` per side. Round `k`
//! first closes the pivot tile `(k, k)`, then every tile in block-row `k` and
//! block-column `k` against the pivot, then every remaining tile against its
//! block-row and block-column neighbours.

use alloc::vec::Vec;

use crate::error::PlanError;
use crate::kernel::TileRole;

/// Validated parameters of one blocked solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockedPlan {
    pub n: usize,
    pub tb: usize,
    pub rounds: usize,
    pub threads: usize,
}

impl BlockedPlan {
    pub fn new(n: usize, tb: usize, threads: usize) -> Result<Self, PlanError> {
        if tb == 0 {
            return Err(PlanError::ZeroTile);
        }
        if threads == 0 {
            return Err(PlanError::ZeroThreads);
        }
        if !n.is_multiple_of(tb) {
            return Err(PlanError::TileDoesNotDivide { n, tb });
        }
        Ok(BlockedPlan {
            n,
            tb,
            rounds: n / tb,
            threads,
        })
    }

    /// Tiles touched per round: one pivot, `2(r-1)` row/column, `(r-1)^2` outer.
    pub fn tiles_per_round(&self) -> usize {
        let r = self.rounds;
        1 + 2 * (r - 1) + (r - 1) * (r - 1)
    }

    pub fn tile_len(&self) -> usize {
        self.tb * self.tb
    }

    /// Offset of a tile inside a tile-major buffer.
    pub fn tile_offset(&self, tile: TileCoord) -> usize {
        (tile.row * self.rounds + tile.col) * self.tile_len()
    }

    pub fn phase_plan(&self, round: usize) -> PhasePlan {
        assert!(round < self.rounds);
        let r = self.rounds;
        let mut row_col = Vec::with_capacity(2 * (r - 1));
        row_col.extend(
            (0..r)
                .filter(|&j| j != round)
                .map(|j| (TileCoord::new(round, j), TileRole::Row)),
        );
        row_col.extend(
            (0..r)
                .filter(|&i| i != round)
                .map(|i| (TileCoord::new(i, round), TileRole::Col)),
        );
        let mut outer = Vec::with_capacity((r - 1) * (r - 1));
        for i in (0..r).filter(|&i| i != round) {
            for j in (0..r).filter(|&j| j != round) {
                outer.push(TileCoord::new(i, j));
            }
        }
        PhasePlan {
            round,
            pivot: TileCoord::new(round, round),
            row_col,
            outer,
        }
    }
}

/// Block coordinates of a tile (block-row, block-column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TileCoord {
    pub row: usize,
    pub col: usize,
}

impl TileCoord {
    pub const fn new(row: usize, col: usize) -> Self {
        TileCoord { row, col }
    }

    /// Role of this tile in round `round`.
    pub fn role_in(self, round: usize) -> TileRole {
        match (self.row == round, self.col == round) {
            (true, true) => TileRole::Pivot,
            (true, false) => TileRole::Row,
            (false, true) => TileRole::Col,
            (false, false) => TileRole::Outer,
        }
    }

    /// Tiles read by this tile's update in round `round`, as
    /// `(row source, column source)`.
    pub fn sources_in(self, round: usize) -> (TileCoord, TileCoord) {
        (TileCoord::new(self.row, round), TileCoord::new(round, self.col))
    }
}

/// The three dependency-ordered scheduling waves of one round.
///
/// Row and column tiles share a wave: both depend only on the pivot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    pub round: usize,
    pub pivot: TileCoord,
    pub row_col: Vec<(TileCoord, TileRole)>,
    pub outer: Vec<TileCoord>,
}
