//! Full verification of an APSP solution against the independent oracles.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{DistanceMatrix, PredecessorMatrix};
use crate::oracle::{dijkstra_apsp, reconstruct_path};
use crate::weight::{DType, Weight};

/// Relative tolerance for non-integral single-precision inputs.
pub const F32_REL_TOL: f64 = 1e-6;
/// Relative tolerance for non-integral double-precision inputs.
pub const F64_REL_TOL: f64 = 1e-12;

pub const CHECK_SHAPE: &str = "shape";
pub const CHECK_DISTANCES: &str = "distance_equality";
pub const CHECK_PATHS: &str = "path_reconstruction";
pub const CHECK_MONOTONE: &str = "monotonicity";
pub const CHECK_CONSISTENT: &str = "path_consistency";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Pairs sampled for path checks when `n > exhaustive_up_to`.
    pub samples: usize,
    pub seed: u64,
    pub exhaustive_up_to: usize,
    /// Failure coordinates listed per check; the count is always exact.
    pub max_listed: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 10_000,
            seed: 0x5eed,
            exhaustive_up_to: 256,
            max_listed: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Number of entries, pairs, or triples examined.
    pub checked: u64,
    pub failure_count: u64,
    /// `(i, j)` of the first failures.
    pub failures: Vec<(usize, usize)>,
    pub note: Option<String>,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            checked: 0,
            failure_count: 0,
            failures: Vec::new(),
            note: None,
        }
    }

    fn fail(&mut self, i: usize, j: usize, max_listed: usize) {
        self.passed = false;
        self.failure_count += 1;
        if self.failures.len() < max_listed {
            self.failures.push((i, j));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VerifyReport {
    pub n: usize,
    pub dtype: DType,
    /// Exact comparisons (integer-valued input) or relative tolerance.
    pub exact: bool,
    pub tolerance: f64,
    /// `true` when path checks used seeded samples instead of all pairs.
    pub sampled: bool,
    pub seed: u64,
    pub pairs_checked: u64,
    /// Non-trivial paths successfully expanded.
    pub reconstructed_paths: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Human-readable summary, one line per check.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "verify n={} dtype={} mode={} pairs={}{} reconstructed={}\n",
            self.n,
            self.dtype,
            if self.exact { "exact" } else { "tolerance" },
            self.pairs_checked,
            if self.sampled {
                format!(" (sampled, seed {})", self.seed)
            } else {
                String::new()
            },
            self.reconstructed_paths,
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  {:<20} {}  checked={} failures={}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.checked,
                c.failure_count
            ));
            if !c.failures.is_empty() {
                let shown: Vec<String> = c.failures.iter().take(8).map(|(i, j)| format!("({i},{j})")).collect();
                out.push_str(&format!(" first={}", shown.join(",")));
            }
            if let Some(note) = &c.note {
                out.push_str(&format!(" note={note}"));
            }
            out.push('\n');
        }
        out.push_str(if self.passed() {
            "result: PASS\n"
        } else {
            "result: FAIL\n"
        });
        out
    }
}

struct Compare {
    exact: bool,
    tol: f64,
}

impl Compare {
    fn eq<T: Weight>(&self, a: T, b: T) -> bool {
        if !a.is_finite() || !b.is_finite() || self.exact {
            return a == b;
        }
        let (a, b) = (a.to_f64(), b.to_f64());
        abs(a - b) <= self.tol * max(abs(a), abs(b))
    }

    fn le<T: Weight>(&self, a: T, b: T) -> bool {
        if a <= b {
            return true;
        }
        if self.exact || !a.is_finite() || !b.is_finite() {
            return false;
        }
        let (a, b) = (a.to_f64(), b.to_f64());
        a - b <= self.tol * max(abs(a), abs(b))
    }
}

fn abs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}

fn max(a: f64, b: f64) -> f64 {
    if a > b {
        a
    } else {
        b
    }
}

/// Checks a solved distance/predecessor pair against `input`.
///
/// 1. distances equal [`dijkstra_apsp`] (exact on integer-valued input);
/// 2. every checked pair expands to a path costing its solved distance, and
///    unreachable pairs expand to nothing;
/// 3. no solved distance exceeds its input entry;
/// 4. `D[i][j] <= D[i][k] + D[k][j]` for checked `(i, j)` and every `k`.
///
/// Pairs are exhaustive up to `options.exhaustive_up_to` vertices and
/// `options.samples` seeded pairs beyond. Failures are report contents.
pub fn verify_solution<T: Weight>(
    input: &DistanceMatrix<T>,
    distances: &DistanceMatrix<T>,
    preds: &PredecessorMatrix,
    options: &VerifyOptions,
) -> VerifyReport {
    let n = input.n();
    let exact = input.is_integral();
    let tol = match T::DTYPE {
        DType::F32 => F32_REL_TOL,
        DType::F64 => F64_REL_TOL,
    };
    let cmp = Compare { exact, tol };
    let sampled = n > options.exhaustive_up_to;
    let mut report = VerifyReport {
        n,
        dtype: T::DTYPE,
        exact,
        tolerance: if exact { 0.0 } else { tol },
        sampled,
        seed: options.seed,
        pairs_checked: 0,
        reconstructed_paths: 0,
        checks: Vec::new(),
    };

    let mut shape = CheckResult::new(CHECK_SHAPE);
    shape.checked = 2;
    if distances.n() != n || preds.n() != n {
        shape.passed = false;
        shape.failure_count = 1;
        shape.note = Some(format!(
            "input n={n}, distances n={}, predecessors n={}",
            distances.n(),
            preds.n()
        ));
        report.checks.push(shape);
        return report;
    }
    report.checks.push(shape);

    let mut dist_check = CheckResult::new(CHECK_DISTANCES);
    match dijkstra_apsp(input) {
        Ok(oracle) => {
            for i in 0..n {
                for j in 0..n {
                    dist_check.checked += 1;
                    if !cmp.eq(distances.get(i, j), oracle.get(i, j)) {
                        dist_check.fail(i, j, options.max_listed);
                    }
                }
            }
        }
        Err(e) => {
            dist_check.passed = false;
            dist_check.note = Some(format!("oracle unavailable: {e}"));
        }
    }
    report.checks.push(dist_check);

    let pairs: Vec<(usize, usize)> = if sampled {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        (0..options.samples)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
            .collect()
    } else {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect()
    };
    report.pairs_checked = pairs.len() as u64;

    let mut path_check = CheckResult::new(CHECK_PATHS);
    for &(i, j) in &pairs {
        path_check.checked += 1;
        let solved = distances.get(i, j);
        let ok = match reconstruct_path(preds, input, i, j) {
            Ok(None) => !solved.is_finite(),
            Ok(Some(trace)) => {
                if i != j {
                    report.reconstructed_paths += 1;
                }
                solved.is_finite() && cmp.eq(trace.total_cost, solved)
            }
            Err(e) => {
                if path_check.note.is_none() {
                    path_check.note = Some(format!("{e}"));
                }
                false
            }
        };
        if !ok {
            path_check.fail(i, j, options.max_listed);
        }
    }
    report.checks.push(path_check);

    let mut mono = CheckResult::new(CHECK_MONOTONE);
    for i in 0..n {
        for j in 0..n {
            mono.checked += 1;
            if !(distances.get(i, j) <= input.get(i, j)) {
                mono.fail(i, j, options.max_listed);
            }
        }
    }
    report.checks.push(mono);

    let mut consistent = CheckResult::new(CHECK_CONSISTENT);
    for &(i, j) in &pairs {
        let dij = distances.get(i, j);
        let mut bad = false;
        for k in 0..n {
            consistent.checked += 1;
            if !cmp.le(dij, distances.get(i, k) + distances.get(k, j)) {
                bad = true;
            }
        }
        if bad {
            consistent.fail(i, j, options.max_listed);
        }
    }
    report.checks.push(consistent);
    report
}
