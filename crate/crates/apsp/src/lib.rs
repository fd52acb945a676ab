//! Multi-threaded blocked Floyd-Warshall on top of `apsp-core`, plus file IO,
//! a benchmark harness, and report rendering for the `apsp` command line.

// `!(a < b)` is deliberate where NaN must take the "not less" branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod team;

pub mod bench;
pub mod cli;
pub mod io;
pub mod report;
pub mod solver;
pub mod tune;

pub use apsp_core as core;
pub use bench::{run_sweep, run_sweep_with, BenchConfig, BenchRecord, Clock, MonotonicClock, SweepResult, SweepSolver};
pub use report::{render, ReportFormat};
pub use solver::{
    default_threads, detect_isa, fw_blocked, fw_blocked_with, fw_naive_parallel, phase1_intrablock, solve, solve_any,
    AnySolveResult, SolveError, SolveOptions, SolveResult, SolveSpec, SolverKind, TileEvent, TileRoleTag, Wave,
    DEFAULT_TB,
};
pub use tune::{autotune_tb, TuneConfig, TuneResult};
