use std::time::Duration;

use apsp::bench::{BenchConfig, BenchError, Clock, DirectSolver, SweepSolver, DEFAULT_REPS};
use apsp::core::{gflops, AnyDistanceMatrix, DType};
use apsp::{run_sweep, run_sweep_with, AnySolveResult, SolveError, SolveSpec, SolverKind};

/// Counts solves and remembers how many clock reads had happened before
/// each one.
#[derive(Default)]
struct Recorder {
    clock_reads: usize,
    solves_seen_at: Vec<usize>,
}

struct SharedClock<'a>(&'a std::cell::RefCell<Recorder>);

impl Clock for SharedClock<'_> {
    fn now(&mut self) -> Duration {
        let mut r = self.0.borrow_mut();
        r.clock_reads += 1;
        Duration::from_millis(10 * r.clock_reads as u64)
    }
}

struct CountingSolver<'a>(&'a std::cell::RefCell<Recorder>);

impl SweepSolver for CountingSolver<'_> {
    fn solve(&mut self, input: &AnyDistanceMatrix, spec: &SolveSpec) -> Result<AnySolveResult, SolveError> {
        let reads = self.0.borrow().clock_reads;
        self.0.borrow_mut().solves_seen_at.push(reads);
        DirectSolver.solve(input, spec)
    }
}

fn tiny(reps: usize) -> BenchConfig {
    BenchConfig {
        sizes: vec![32],
        tile_sizes: vec![16],
        thread_counts: vec![1],
        elem_types: vec![DType::F32],
        reps,
        ..BenchConfig::default()
    }
}

#[test]
fn default_protocol_is_one_warmup_and_fifteen_timed() {
    let config = BenchConfig {
        reps: BenchConfig::default().reps,
        ..tiny(0)
    };
    assert_eq!(config.reps, 15);
    assert_eq!(DEFAULT_REPS, 15);
    let rec = std::cell::RefCell::new(Recorder::default());
    let r = run_sweep_with(&config, &mut SharedClock(&rec), &mut CountingSolver(&rec), |_| {}).unwrap();
    let rec = rec.into_inner();
    assert_eq!(rec.solves_seen_at.len(), 16);
    assert_eq!(rec.clock_reads, 30);
    // the warm-up runs before any clock read; each timed solve sits between
    // a pair of reads
    assert_eq!(rec.solves_seen_at[0], 0);
    for (i, &reads) in rec.solves_seen_at[1..].iter().enumerate() {
        assert_eq!(reads, 2 * i + 1);
    }
    let record = &r.records[0];
    assert_eq!(record.reps, 15);
    assert_eq!(record.rep_times, vec![0.01; 15]);
}

#[test]
fn stats_follow_rep_times() {
    let r = run_sweep(&tiny(4)).unwrap();
    let rec = &r.records[0];
    assert_eq!(rec.rep_times.len(), 4);
    let mean = rec.rep_times.iter().sum::<f64>() / 4.0;
    assert!((rec.mean_s - mean).abs() <= 1e-15);
    assert_eq!(rec.min_s, rec.rep_times.iter().copied().fold(f64::INFINITY, f64::min));
    assert_eq!(rec.gflops_mean, gflops(32, rec.mean_s).unwrap());
    assert_eq!(rec.gflops_peak, gflops(32, rec.min_s).unwrap());
    assert!(rec.gflops_peak >= rec.gflops_mean);
}

#[test]
fn sweep_outputs_are_reproducible() {
    struct Keep(Vec<AnySolveResult>);
    impl SweepSolver for Keep {
        fn solve(&mut self, input: &AnyDistanceMatrix, spec: &SolveSpec) -> Result<AnySolveResult, SolveError> {
            let r = DirectSolver.solve(input, spec)?;
            self.0.push(r.clone());
            Ok(r)
        }
    }
    let mut runs = Vec::new();
    for _ in 0..2 {
        let mut keep = Keep(Vec::new());
        run_sweep_with(&tiny(2), &mut apsp::MonotonicClock::default(), &mut keep, |_| {}).unwrap();
        runs.push(keep.0);
    }
    assert_eq!(runs[0].len(), 3);
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        assert!(a.distances.bit_eq(&b.distances));
        assert_eq!(a.predecessors, b.predecessors);
    }
}

#[test]
fn failing_point_does_not_stop_the_sweep() {
    struct FailOn(usize);
    impl SweepSolver for FailOn {
        fn solve(&mut self, input: &AnyDistanceMatrix, spec: &SolveSpec) -> Result<AnySolveResult, SolveError> {
            if input.n() == self.0 {
                return Err(SolveError::Plan(apsp::core::PlanError::ZeroThreads));
            }
            DirectSolver.solve(input, spec)
        }
    }
    let config = BenchConfig {
        sizes: vec![16, 32, 48],
        ..tiny(1)
    };
    let r = run_sweep_with(&config, &mut apsp::MonotonicClock::default(), &mut FailOn(32), |_| {}).unwrap();
    assert_eq!(r.records.iter().map(|r| r.n).collect::<Vec<_>>(), [16, 48]);
    assert_eq!(r.failures.len(), 1);
    assert_eq!(r.failures[0].point.n, 32);
    assert!(matches!(r.failures[0].error, BenchError::Solve(_)));
}

#[test]
fn blocked_not_slower_than_naive_on_larger_size() {
    let threads = apsp::default_threads();
    let base = BenchConfig {
        sizes: vec![512],
        tile_sizes: vec![32],
        thread_counts: vec![threads],
        elem_types: vec![DType::F32],
        reps: 3,
        ..BenchConfig::default()
    };
    let blocked = run_sweep(&base).unwrap().records[0].mean_s;
    let naive = run_sweep(&BenchConfig {
        solver: SolverKind::Naive,
        ..base
    })
    .unwrap()
    .records[0]
        .mean_s;
    assert!(blocked <= naive, "blocked {blocked} s, naive {naive} s");
}
