//! Dense all-pairs shortest paths by blocked Floyd-Warshall.
//!
//! This crate is `no_std` (it needs `alloc`) and holds everything that does
//! not touch threads, clocks, or files:
//!
//! - [`DistanceMatrix`] / [`PredecessorMatrix`] and their binary and CSV
//!   encodings ([`format`]);
//! - seeded graph generation ([`generate()`]);
//! - the reference solver [`fw_naive`] and the branch-free tile kernel
//!   [`tile_update`] used by every blocked phase;
//! - round/phase planning ([`BlockedPlan`]) and a tile-major working copy
//!   ([`TiledMatrix`]) with a single-threaded blocked solver;
//! - independent oracles: [`dijkstra_apsp`], [`reconstruct_path`], and
//!   [`verify_solution`];
//! - the [`gflops`] metric.
//!
//! The `apsp` crate adds the multi-threaded scheduler, file IO, the
//! benchmark harness, and the command line.

#![no_std]
// `!(a < b)` is deliberate where NaN must take the "not less" branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod format;
mod generate;
pub mod kernel;
mod matrix;
mod metrics;
mod naive;
pub mod oracle;
mod plan;
#[cfg(target_arch = "x86_64")]
mod simd;
mod tiled;
pub mod verify;
mod weight;

pub use error::{FormatError, MatrixError, OracleError, PathError, PlanError};
pub use generate::{generate, GraphGenSpec};
pub use kernel::{relax_row, relax_row_in_place, tile_update, tile_update_with, Isa, IsaLevel, TileRole, TileSources};
pub use matrix::{AnyDistanceMatrix, DistanceMatrix, PredecessorMatrix, MAX_VERTICES, NO_PREDECESSOR};
pub use metrics::{gflops, MetricError};
pub use naive::{detect_negative_cycle, fw_naive};
pub use oracle::{dijkstra_apsp, reconstruct_path, PathTrace};
pub use plan::{BlockedPlan, PhasePlan, TileCoord};
pub use tiled::{fw_blocked_serial, TiledMatrix};
pub use verify::{verify_solution, CheckResult, VerifyOptions, VerifyReport};
pub use weight::{DType, Weight};
