//! Timed parameter sweeps.
//!
//! Every point of the cartesian product sizes x tile sizes x thread counts x
//! element types gets one seeded matrix, one untimed warm-up solve, and
//! `reps` timed solves. Only the solve call sits between the two clock
//! reads.

use std::time::{Duration, Instant};

use apsp_core::verify::VerifyOptions;
use apsp_core::{generate, gflops, verify_solution, with_matrix, AnyDistanceMatrix, DType, GraphGenSpec, MatrixError};
use serde::{Deserialize, Serialize};

use crate::solver::{default_threads, solve_any, AnySolveResult, SolveError, SolveOptions, SolveSpec, SolverKind};

/// Default repetition count per point.
pub const DEFAULT_REPS: usize = 15;
/// Largest `n` whose first timed result is checked against the oracles.
pub const VERIFY_MAX_N: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub tile_sizes: Vec<usize>,
    pub thread_counts: Vec<usize>,
    pub elem_types: Vec<DType>,
    pub reps: usize,
    pub seed: u64,
    pub solver: SolverKind,
    /// Pad sizes that a tile size does not divide.
    pub pad: bool,
    /// Check the first timed result of points with `n <= 512`.
    pub verify: bool,
    pub density: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![1024],
            tile_sizes: vec![crate::solver::DEFAULT_TB],
            thread_counts: vec![default_threads()],
            elem_types: vec![DType::F32, DType::F64],
            reps: DEFAULT_REPS,
            seed: 1,
            solver: SolverKind::Blocked,
            pad: false,
            verify: false,
            density: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("reps must be at least 1")]
    ZeroReps,
    #[error("{0} list is empty")]
    EmptyList(&'static str),
    #[error("{0} must be positive")]
    Zero(&'static str),
    #[error("tile size {tb} does not divide n = {n}; enable padding")]
    NeedsPadding { n: usize, tb: usize },
    #[error("density must lie in [0, 1], got {0}")]
    Density(f64),
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.reps == 0 {
            return Err(ConfigError::ZeroReps);
        }
        let lists = [
            ("sizes", self.sizes.is_empty()),
            (
                "tile_sizes",
                self.tile_sizes.is_empty() && self.solver == SolverKind::Blocked,
            ),
            ("thread_counts", self.thread_counts.is_empty()),
            ("elem_types", self.elem_types.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            return Err(ConfigError::EmptyList(name));
        }
        if self.sizes.contains(&0) {
            return Err(ConfigError::Zero("n"));
        }
        if self.thread_counts.contains(&0) {
            return Err(ConfigError::Zero("threads"));
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(ConfigError::Density(self.density));
        }
        if self.solver == SolverKind::Blocked {
            if self.tile_sizes.contains(&0) {
                return Err(ConfigError::Zero("tb"));
            }
            if !self.pad {
                for &n in &self.sizes {
                    if let Some(&tb) = self.tile_sizes.iter().find(|&&tb| n % tb != 0) {
                        return Err(ConfigError::NeedsPadding { n, tb });
                    }
                }
            }
        }
        Ok(())
    }

    /// Sweep points in run order. The naive solver ignores `tile_sizes` and
    /// reports `tb = n`.
    pub fn points(&self) -> Vec<BenchPoint> {
        let mut out = Vec::new();
        for &n in &self.sizes {
            let tbs = match self.solver {
                SolverKind::Naive => vec![n],
                SolverKind::Blocked => self.tile_sizes.clone(),
            };
            for tb in tbs {
                for &threads in &self.thread_counts {
                    for &dtype in &self.elem_types {
                        out.push(BenchPoint { n, tb, threads, dtype });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: usize,
    pub tb: usize,
    pub threads: usize,
    pub dtype: DType,
}

/// One measured point. Serializes to exactly the report columns; the
/// per-rep times stay in memory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub n: usize,
    pub tb: usize,
    pub threads: usize,
    pub dtype: DType,
    pub reps: usize,
    pub mean_s: f64,
    pub min_s: f64,
    pub stddev_s: f64,
    pub gflops_mean: f64,
    pub gflops_peak: f64,
    #[serde(skip)]
    pub rep_times: Vec<f64>,
}

impl BenchRecord {
    /// Derives the statistics from `rep_times`. The standard deviation is
    /// the sample one (zero for a single rep).
    pub fn from_times(point: BenchPoint, rep_times: Vec<f64>) -> Result<Self, BenchError> {
        if rep_times.is_empty() {
            return Err(BenchError::NoTimes);
        }
        let reps = rep_times.len();
        let mean_s = rep_times.iter().sum::<f64>() / reps as f64;
        let min_s = rep_times.iter().copied().fold(f64::INFINITY, f64::min);
        let stddev_s = if reps > 1 {
            let ss: f64 = rep_times.iter().map(|t| (t - mean_s) * (t - mean_s)).sum();
            (ss / (reps - 1) as f64).sqrt()
        } else {
            0.0
        };
        let rate = |t: f64| gflops(point.n, t).map_err(|_| BenchError::BadTime(t));
        Ok(BenchRecord {
            n: point.n,
            tb: point.tb,
            threads: point.threads,
            dtype: point.dtype,
            reps,
            mean_s,
            min_s,
            stddev_s,
            gflops_mean: rate(mean_s)?,
            gflops_peak: rate(min_s)?,
            rep_times,
        })
    }

    pub fn point(&self) -> BenchPoint {
        BenchPoint {
            n: self.n,
            tb: self.tb,
            threads: self.threads,
            dtype: self.dtype,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("non-positive elapsed time {0}")]
    BadTime(f64),
    #[error("no timed repetitions")]
    NoTimes,
    #[error("verification failed: {0}")]
    Verification(String),
}

/// A point that could not be measured.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub point: BenchPoint,
    pub error: BenchError,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub records: Vec<BenchRecord>,
    pub failures: Vec<PointFailure>,
}

/// Time source for the harness.
pub trait Clock {
    /// Time since an arbitrary fixed origin.
    fn now(&mut self) -> Duration;
}

/// `std::time::Instant`-backed clock.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl Default for MonotonicClock {
    fn default() -> Self {
        MonotonicClock { origin: Instant::now() }
    }
}

impl Clock for MonotonicClock {
    fn now(&mut self) -> Duration {
        self.origin.elapsed()
    }
}

/// The solve under test.
pub trait SweepSolver {
    fn solve(&mut self, input: &AnyDistanceMatrix, spec: &SolveSpec) -> Result<AnySolveResult, SolveError>;
}

/// [`solve_any`] itself.
#[derive(Debug, Clone, Copy, Default)]
pub struct DirectSolver;

impl SweepSolver for DirectSolver {
    fn solve(&mut self, input: &AnyDistanceMatrix, spec: &SolveSpec) -> Result<AnySolveResult, SolveError> {
        solve_any(input, spec)
    }
}

pub fn run_sweep(config: &BenchConfig) -> Result<SweepResult, ConfigError> {
    run_sweep_with(config, &mut MonotonicClock::default(), &mut DirectSolver, |_| {})
}

/// [`run_sweep`] with an explicit clock and solver. `progress` sees each
/// point before it runs.
pub fn run_sweep_with(
    config: &BenchConfig,
    clock: &mut dyn Clock,
    solver: &mut dyn SweepSolver,
    mut progress: impl FnMut(&BenchPoint),
) -> Result<SweepResult, ConfigError> {
    config.validate()?;
    let mut result = SweepResult::default();
    for point in config.points() {
        progress(&point);
        match run_point(config, point, clock, solver) {
            Ok(record) => result.records.push(record),
            Err(error) => result.failures.push(PointFailure { point, error }),
        }
    }
    Ok(result)
}

fn generate_any(dtype: DType, spec: &GraphGenSpec) -> Result<AnyDistanceMatrix, MatrixError> {
    Ok(match dtype {
        DType::F32 => generate::<f32>(spec)?.into(),
        DType::F64 => generate::<f64>(spec)?.into(),
    })
}

fn run_point(
    config: &BenchConfig,
    point: BenchPoint,
    clock: &mut dyn Clock,
    solver: &mut dyn SweepSolver,
) -> Result<BenchRecord, BenchError> {
    let gen = GraphGenSpec::new(point.n, config.seed).with_density(config.density);
    let input = generate_any(point.dtype, &gen)?;
    // padding happens here, outside the timed region
    let padded = match config.solver {
        SolverKind::Blocked if !point.n.is_multiple_of(point.tb) => {
            with_matrix!(&input, m => AnyDistanceMatrix::from(m.pad_to_multiple(point.tb)))
        }
        _ => input.clone(),
    };
    let spec = SolveSpec {
        solver: config.solver,
        tb: point.tb,
        threads: point.threads,
        pad: false,
        options: SolveOptions::default(),
    };

    solver.solve(&padded, &spec)?;

    let mut times = Vec::with_capacity(config.reps);
    for rep in 0..config.reps {
        let start = clock.now();
        let out = solver.solve(&padded, &spec)?;
        let elapsed = clock.now().saturating_sub(start).as_secs_f64();
        if !(elapsed > 0.0) {
            return Err(BenchError::BadTime(elapsed));
        }
        times.push(elapsed);
        if rep == 0 && config.verify && point.n <= VERIFY_MAX_N {
            verify_point(&input, out)?;
        }
    }
    BenchRecord::from_times(point, times)
}

fn verify_point(input: &AnyDistanceMatrix, out: AnySolveResult) -> Result<(), BenchError> {
    let n = input.n();
    let preds = out.predecessors.truncate(n);
    let report = match (input, &out.distances) {
        (AnyDistanceMatrix::F32(i), AnyDistanceMatrix::F32(d)) => {
            verify_solution(i, &d.truncate(n), &preds, &VerifyOptions::default())
        }
        (AnyDistanceMatrix::F64(i), AnyDistanceMatrix::F64(d)) => {
            verify_solution(i, &d.truncate(n), &preds, &VerifyOptions::default())
        }
        _ => return Err(BenchError::Verification("element type changed during solve".into())),
    };
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(BenchError::Verification(failed.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Advances one millisecond per read and counts reads.
    #[derive(Default)]
    struct StepClock {
        reads: usize,
    }

    impl Clock for StepClock {
        fn now(&mut self) -> Duration {
            self.reads += 1;
            Duration::from_millis(self.reads as u64)
        }
    }

    fn small() -> BenchConfig {
        BenchConfig {
            sizes: vec![64],
            tile_sizes: vec![16],
            thread_counts: vec![1],
            elem_types: vec![DType::F32],
            reps: 3,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn record_stats_consistent() {
        let p = BenchPoint {
            n: 1024,
            tb: 64,
            threads: 1,
            dtype: DType::F32,
        };
        let r = BenchRecord::from_times(p, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.mean_s, 2.0);
        assert_eq!(r.min_s, 1.0);
        assert_eq!(r.stddev_s, 1.0);
        assert_eq!(r.gflops_mean, gflops(1024, 2.0).unwrap());
        assert_eq!(r.gflops_peak, 2.147483648);
        assert!(r.gflops_peak >= r.gflops_mean);
        assert_eq!(BenchRecord::from_times(p, vec![]), Err(BenchError::NoTimes));
        assert_eq!(BenchRecord::from_times(p, vec![0.5]).unwrap().stddev_s, 0.0);
    }

    #[test]
    fn structural_contract() {
        let mut clock = StepClock::default();
        let r = run_sweep_with(&small(), &mut clock, &mut DirectSolver, |_| {}).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.records.len(), 1);
        let rec = &r.records[0];
        assert_eq!(rec.rep_times, vec![0.001; 3]);
        assert_eq!(rec.reps, 3);
        // two reads per timed rep, none for the warm-up
        assert_eq!(clock.reads, 6);
    }

    #[test]
    fn config_validation() {
        let mut c = small();
        c.reps = 0;
        assert_eq!(c.validate(), Err(ConfigError::ZeroReps));
        let mut c = small();
        c.tile_sizes = vec![48];
        assert_eq!(c.validate(), Err(ConfigError::NeedsPadding { n: 64, tb: 48 }));
        c.pad = true;
        assert_eq!(c.validate(), Ok(()));
        let mut c = small();
        c.elem_types.clear();
        assert_eq!(c.validate(), Err(ConfigError::EmptyList("elem_types")));
        let mut c = small();
        c.solver = SolverKind::Naive;
        c.tile_sizes.clear();
        assert_eq!(c.validate(), Ok(()));
        assert_eq!(c.points()[0].tb, 64);
    }

    #[test]
    fn points_cover_the_product() {
        let c = BenchConfig {
            sizes: vec![64, 128],
            tile_sizes: vec![16, 32],
            thread_counts: vec![1, 2],
            elem_types: vec![DType::F32, DType::F64],
            ..BenchConfig::default()
        };
        assert_eq!(c.points().len(), 16);
    }

    #[test]
    fn padded_point_verifies() {
        let c = BenchConfig {
            sizes: vec![50],
            tile_sizes: vec![16],
            pad: true,
            verify: true,
            reps: 1,
            ..small()
        };
        let r = run_sweep(&c).unwrap();
        assert!(r.failures.is_empty(), "{:?}", r.failures);
        assert_eq!(r.records[0].n, 50);
    }
}
