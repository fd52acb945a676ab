//! Multi-threaded Floyd-Warshall solvers.
//!
//! [`fw_blocked`] runs the rounds of blocked Floyd-Warshall on a team of
//! workers. Each round is three waves separated by full barriers:
//!
//! 1. the pivot tile, with its rows split across all workers and a barrier
//!    after every `k` step;
//! 2. every block-row and block-column tile, claimed one at a time from a
//!    shared counter;
//! 3. every remaining tile, claimed the same way.
//!
//! Within a wave no two tiles overlap and no tile written in the wave is read
//! by another tile of the same wave, so workers never alias.

use std::slice;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use apsp_core::{
    relax_row, relax_row_in_place, tile_update_with, with_matrix, AnyDistanceMatrix, BlockedPlan, DistanceMatrix, Isa,
    IsaLevel, MatrixError, PhasePlan, PlanError, PredecessorMatrix, TileCoord, TileRole, TileSources, TiledMatrix,
    Weight,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::team::{run_team, WorkQueue, Worker};

/// Default tile edge.
pub const DEFAULT_TB: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Best kernel instruction set supported by the running CPU.
pub fn detect_isa() -> Isa {
    #[cfg(target_arch = "x86_64")]
    {
        if is_x86_feature_detected!("avx512f")
            && is_x86_feature_detected!("avx512bw")
            && is_x86_feature_detected!("avx512vl")
            && is_x86_feature_detected!("avx512dq")
        {
            // SAFETY: features checked above.
            return unsafe { Isa::new_unchecked(IsaLevel::Avx512) };
        }
        if is_x86_feature_detected!("avx2") && is_x86_feature_detected!("fma") {
            // SAFETY: features checked above.
            return unsafe { Isa::new_unchecked(IsaLevel::Avx2) };
        }
    }
    Isa::compile_time()
}

/// Logical core count, falling back to 1.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub isa: Isa,
    /// Record a [`TileEvent`] per tile (and per worker for the pivot wave).
    pub trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            isa: detect_isa(),
            trace: false,
        }
    }
}

/// Scheduling wave within a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wave {
    Pivot,
    RowCol,
    Outer,
}

/// One traced tile update. `start` and `end` are ticks of a global counter
/// shared by all workers, so they order events across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileEvent {
    pub round: usize,
    pub wave: Wave,
    pub tile: TileCoord,
    pub role: TileRoleTag,
    pub worker: usize,
    pub start: u64,
    pub end: u64,
}

/// Serializable mirror of [`TileRole`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TileRoleTag {
    Pivot,
    Row,
    Col,
    Outer,
}

impl From<TileRole> for TileRoleTag {
    fn from(r: TileRole) -> Self {
        match r {
            TileRole::Pivot => TileRoleTag::Pivot,
            TileRole::Row => TileRoleTag::Row,
            TileRole::Col => TileRoleTag::Col,
            TileRole::Outer => TileRoleTag::Outer,
        }
    }
}

#[derive(Default)]
struct Tracer {
    clock: AtomicU64,
    events: Mutex<Vec<TileEvent>>,
}

impl Tracer {
    fn tick(&self) -> u64 {
        self.clock.fetch_add(1, Ordering::SeqCst)
    }

    fn record(&self, event: TileEvent) {
        self.events.lock().unwrap().push(event);
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult<T: Weight> {
    pub distances: DistanceMatrix<T>,
    pub predecessors: PredecessorMatrix,
    /// Seconds, including the tile-major conversions.
    pub wall_time: f64,
    pub plan: BlockedPlan,
    pub trace: Option<Vec<TileEvent>>,
}

/// Unsynchronized view of one `tb x tb` row-major tile.
#[derive(Clone, Copy)]
struct RawTile<T> {
    dist: *mut T,
    preds: *mut u32,
    tb: usize,
}

// SAFETY: workers only dereference disjoint rows or rows nobody writes in
// the current step; see phase1_in_team.
unsafe impl<T: Send> Send for RawTile<T> {}
unsafe impl<T: Sync> Sync for RawTile<T> {}

impl<T: Weight> RawTile<T> {
    unsafe fn get(&self, i: usize, j: usize) -> T {
        *self.dist.add(i * self.tb + j)
    }

    unsafe fn row<'a>(&self, i: usize) -> &'a [T] {
        slice::from_raw_parts(self.dist.add(i * self.tb), self.tb)
    }

    unsafe fn pred_row<'a>(&self, i: usize) -> &'a [u32] {
        slice::from_raw_parts(self.preds.add(i * self.tb), self.tb)
    }

    unsafe fn row_mut<'a>(&self, i: usize) -> (&'a mut [T], &'a mut [u32]) {
        (
            slice::from_raw_parts_mut(self.dist.add(i * self.tb), self.tb),
            slice::from_raw_parts_mut(self.preds.add(i * self.tb), self.tb),
        )
    }
}

struct Phase1Scratch<T> {
    old: Vec<T>,
    new: Vec<T>,
    preds: Vec<u32>,
}

impl<T: Weight> Phase1Scratch<T> {
    fn new(tb: usize) -> Self {
        Phase1Scratch {
            old: vec![T::ZERO; tb],
            new: vec![T::ZERO; tb],
            preds: vec![0; tb],
        }
    }
}

/// Pivot-tile update with the rows of each `kk` step split across the team.
///
/// Workers own fixed row ranges and meet at a barrier before every step
/// after the first; the caller provides the trailing barrier. If
/// `pivot[kk][kk] >= 0` the update of row `kk` is a no-op, so row `kk` is
/// read-only for the step. Otherwise every worker first snapshots row `kk`
/// before and after its own update, the team syncs, and only then is the
/// row written back; rows above `kk` use the old copy and rows below the
/// new one, matching the sequential kernel bit for bit.
///
/// # Safety
///
/// Every team member must call this with the same arguments, and no one else
/// may access the tile until the trailing barrier.
unsafe fn phase1_in_team<T: Weight>(
    w: &Worker<'_>,
    tile: RawTile<T>,
    k_base: u32,
    isa: Isa,
    scratch: &mut Phase1Scratch<T>,
) {
    let tb = tile.tb;
    let (lo, hi) = w.static_share(tb);
    for kk in 0..tb {
        if kk > 0 {
            w.sync();
        }
        let k = k_base + kk as u32;
        let diag = tile.get(kk, kk);
        if !(diag < T::ZERO) {
            let src = tile.row(kk);
            for ii in (lo..hi).filter(|&ii| ii != kk) {
                let via = tile.get(ii, kk);
                let (dst, pred) = tile.row_mut(ii);
                relax_row(isa, dst, pred, via, src, k);
            }
        } else {
            let owner = (lo..hi).contains(&kk);
            scratch.old.copy_from_slice(tile.row(kk));
            scratch.new.copy_from_slice(&scratch.old);
            if owner {
                scratch.preds.copy_from_slice(tile.pred_row(kk));
            }
            relax_row_in_place(isa, &mut scratch.new, &mut scratch.preds, diag, k);
            w.sync();
            if owner {
                let (dst, pred) = tile.row_mut(kk);
                dst.copy_from_slice(&scratch.new);
                pred.copy_from_slice(&scratch.preds);
            }
            for ii in (lo..hi).filter(|&ii| ii != kk) {
                let via = tile.get(ii, kk);
                let src = if ii < kk { &scratch.old } else { &scratch.new };
                let (dst, pred) = tile.row_mut(ii);
                relax_row(isa, dst, pred, via, src, k);
            }
        }
    }
}

/// Pivot-tile update distributed over `workers` threads.
///
/// Bit-identical to `tile_update` with [`TileSources::Pivot`].
pub fn phase1_intrablock<T: Weight>(
    pivot: &mut [T],
    preds: &mut [u32],
    tb: usize,
    k_base: u32,
    workers: usize,
    isa: Isa,
) {
    assert!(workers >= 1, "worker count must be positive");
    assert!(pivot.len() >= tb * tb && preds.len() >= tb * tb);
    let tile = RawTile {
        dist: pivot.as_mut_ptr(),
        preds: preds.as_mut_ptr(),
        tb,
    };
    run_team(workers, |w| {
        let mut scratch = Phase1Scratch::new(tb);
        // SAFETY: the whole team runs phase1_in_team on a tile borrowed
        // mutably for the duration of run_team.
        unsafe { phase1_in_team(w, tile, k_base, isa, &mut scratch) };
        w.sync();
    });
}

/// Tile-major buffers shared by the team during the row/column and outer
/// waves.
struct SharedTiles<T> {
    dist: *mut T,
    preds: *mut u32,
    plan: BlockedPlan,
}

// SAFETY: see SharedTiles::update.
unsafe impl<T: Send> Send for SharedTiles<T> {}
unsafe impl<T: Sync> Sync for SharedTiles<T> {}

impl<T: Weight> SharedTiles<T> {
    fn pivot(&self, round: usize) -> RawTile<T> {
        let off = self.plan.tile_offset(TileCoord::new(round, round));
        // SAFETY: offset lies inside the n*n buffers.
        unsafe {
            RawTile {
                dist: self.dist.add(off),
                preds: self.preds.add(off),
                tb: self.plan.tb,
            }
        }
    }

    /// Updates a non-pivot tile for `round`.
    ///
    /// # Safety
    ///
    /// No other thread may access `tile` concurrently, and the tile's sources
    /// must not be written concurrently. The wave structure guarantees both:
    /// a wave writes each of its tiles once and reads only tiles finished in
    /// an earlier wave.
    unsafe fn update(&self, isa: Isa, tile: TileCoord, round: usize) {
        let plan = &self.plan;
        let len = plan.tile_len();
        let off = plan.tile_offset(tile);
        let write = slice::from_raw_parts_mut(self.dist.add(off), len);
        let preds = slice::from_raw_parts_mut(self.preds.add(off), len);
        let (a, b) = tile.sources_in(round);
        let source = |c: TileCoord| -> &[T] { slice::from_raw_parts(self.dist.add(plan.tile_offset(c)), len) };
        let sources = match tile.role_in(round) {
            TileRole::Row => TileSources::Row { pivot: source(a) },
            TileRole::Col => TileSources::Col { pivot: source(b) },
            TileRole::Outer => TileSources::Outer {
                row_src: source(a),
                col_src: source(b),
            },
            TileRole::Pivot => unreachable!("pivot tiles are handled by the pivot wave"),
        };
        tile_update_with(isa, write, preds, sources, plan.tb, (round * plan.tb) as u32);
    }
}

fn check_input<T: Weight>(input: &DistanceMatrix<T>) -> Result<(), SolveError> {
    if let Some((row, col)) = input.find_nan() {
        return Err(MatrixError::NaN { row, col }.into());
    }
    Ok(())
}

/// Blocked Floyd-Warshall with tile edge `tb` on `threads` workers.
///
/// `n` must be a multiple of `tb`; pad with `DistanceMatrix::pad_to_multiple`
/// otherwise. Distances equal those of `fw_naive` exactly on integer-valued
/// input.
pub fn fw_blocked<T: Weight>(
    input: &DistanceMatrix<T>,
    tb: usize,
    threads: usize,
) -> Result<SolveResult<T>, SolveError> {
    fw_blocked_with(input, tb, threads, &SolveOptions::default())
}

pub fn fw_blocked_with<T: Weight>(
    input: &DistanceMatrix<T>,
    tb: usize,
    threads: usize,
    options: &SolveOptions,
) -> Result<SolveResult<T>, SolveError> {
    let plan = BlockedPlan::new(input.n(), tb, threads)?;
    check_input(input)?;
    let start = Instant::now();
    let isa = options.isa;
    let mut tiled = TiledMatrix::from_row_major(input, plan);
    let phases: Vec<PhasePlan> = (0..plan.rounds).map(|k| plan.phase_plan(k)).collect();
    let queues: Vec<WorkQueue> = (0..2 * plan.rounds).map(|_| WorkQueue::default()).collect();
    let tracer = options.trace.then(Tracer::default);
    {
        let (dist, preds) = tiled.buffers_mut();
        let shared = SharedTiles {
            dist: dist.as_mut_ptr(),
            preds: preds.as_mut_ptr(),
            plan,
        };
        let tracer = tracer.as_ref();
        run_team(threads, |w| {
            let mut scratch = Phase1Scratch::new(tb);
            for (round, phase) in phases.iter().enumerate() {
                let start = tracer.map_or(0, Tracer::tick);
                // SAFETY: the whole team enters the pivot wave together; the
                // pivot tile is the only tile touched until the next barrier.
                unsafe { phase1_in_team(w, shared.pivot(round), (round * tb) as u32, isa, &mut scratch) };
                if let Some(t) = tracer {
                    t.record(TileEvent {
                        round,
                        wave: Wave::Pivot,
                        tile: phase.pivot,
                        role: TileRoleTag::Pivot,
                        worker: w.id,
                        start,
                        end: t.tick(),
                    });
                }
                w.sync();

                let waves: [(&WorkQueue, Wave, usize); 2] = [
                    (&queues[2 * round], Wave::RowCol, phase.row_col.len()),
                    (&queues[2 * round + 1], Wave::Outer, phase.outer.len()),
                ];
                for (queue, wave, len) in waves {
                    while let Some(idx) = queue.claim(len) {
                        let tile = match wave {
                            Wave::RowCol => phase.row_col[idx].0,
                            _ => phase.outer[idx],
                        };
                        let start = tracer.map_or(0, Tracer::tick);
                        // SAFETY: each index is claimed by exactly one worker,
                        // and the wave's sources were finished before the barrier.
                        unsafe { shared.update(isa, tile, round) };
                        if let Some(t) = tracer {
                            t.record(TileEvent {
                                round,
                                wave,
                                tile,
                                role: tile.role_in(round).into(),
                                worker: w.id,
                                start,
                                end: t.tick(),
                            });
                        }
                    }
                    w.sync();
                }
            }
        });
    }
    let (distances, predecessors) = tiled.into_row_major()?;
    let wall_time = start.elapsed().as_secs_f64().max(1e-9);
    Ok(SolveResult {
        distances,
        predecessors,
        wall_time,
        plan,
        trace: tracer.map(|t| t.events.into_inner().unwrap()),
    })
}

/// Unblocked Floyd-Warshall on `threads` workers: each `k` step splits the
/// rows across the team, with a barrier between steps. Bit-identical to
/// `fw_naive`, predecessors included.
pub fn fw_naive_parallel<T: Weight>(
    input: &DistanceMatrix<T>,
    threads: usize,
    options: &SolveOptions,
) -> Result<SolveResult<T>, SolveError> {
    let n = input.n();
    let plan = BlockedPlan::new(n, n, threads)?;
    check_input(input)?;
    let start = Instant::now();
    let mut distances = input.clone();
    let mut predecessors = PredecessorMatrix::new(n)?;
    phase1_intrablock(
        distances.as_mut_slice(),
        predecessors.as_mut_slice(),
        n,
        0,
        threads,
        options.isa,
    );
    let wall_time = start.elapsed().as_secs_f64().max(1e-9);
    Ok(SolveResult {
        distances,
        predecessors,
        wall_time,
        plan,
        trace: None,
    })
}

/// Solver selection for the command line and the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Row-parallel unblocked Floyd-Warshall (tile = whole matrix).
    Naive,
    /// Blocked Floyd-Warshall.
    Blocked,
}

impl SolverKind {
    pub fn token(self) -> &'static str {
        match self {
            SolverKind::Naive => "naive",
            SolverKind::Blocked => "blocked",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveSpec {
    pub solver: SolverKind,
    pub tb: usize,
    pub threads: usize,
    /// Pad to a multiple of `tb` instead of refusing; results are truncated
    /// back to the input size.
    pub pad: bool,
    pub options: SolveOptions,
}

impl SolveSpec {
    pub fn blocked(tb: usize, threads: usize) -> Self {
        SolveSpec {
            solver: SolverKind::Blocked,
            tb,
            threads,
            pad: false,
            options: SolveOptions::default(),
        }
    }

    pub fn naive(threads: usize) -> Self {
        SolveSpec {
            solver: SolverKind::Naive,
            tb: 0,
            threads,
            pad: false,
            options: SolveOptions::default(),
        }
    }

    /// Tile edge actually used for an `n`-vertex input.
    pub fn effective_tb(&self, n: usize) -> usize {
        match self.solver {
            SolverKind::Naive => n,
            SolverKind::Blocked => self.tb,
        }
    }
}

/// Runs the selected solver, padding first when requested.
pub fn solve<T: Weight>(input: &DistanceMatrix<T>, spec: &SolveSpec) -> Result<SolveResult<T>, SolveError> {
    match spec.solver {
        SolverKind::Naive => fw_naive_parallel(input, spec.threads, &spec.options),
        SolverKind::Blocked => {
            let n = input.n();
            if spec.tb == 0 {
                return Err(PlanError::ZeroTile.into());
            }
            if spec.pad && !n.is_multiple_of(spec.tb) {
                let padded = input.pad_to_multiple(spec.tb);
                let mut result = fw_blocked_with(&padded, spec.tb, spec.threads, &spec.options)?;
                result.distances = result.distances.truncate(n);
                result.predecessors = result.predecessors.truncate(n);
                Ok(result)
            } else {
                fw_blocked_with(input, spec.tb, spec.threads, &spec.options)
            }
        }
    }
}

/// [`SolveResult`] with a runtime element type.
#[derive(Debug, Clone)]
pub struct AnySolveResult {
    pub distances: AnyDistanceMatrix,
    pub predecessors: PredecessorMatrix,
    pub wall_time: f64,
    pub plan: BlockedPlan,
}

pub fn solve_any(input: &AnyDistanceMatrix, spec: &SolveSpec) -> Result<AnySolveResult, SolveError> {
    with_matrix!(input, m => {
        let r = solve(m, spec)?;
        Ok(AnySolveResult {
            distances: r.distances.into(),
            predecessors: r.predecessors,
            wall_time: r.wall_time,
            plan: r.plan,
        })
    })
}
