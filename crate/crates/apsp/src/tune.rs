//! Tile-size selection by measurement.

use apsp_core::{generate, with_matrix, AnyDistanceMatrix, DType, GraphGenSpec, MatrixError, PlanError};
use serde::{Deserialize, Serialize};

use crate::solver::{solve, SolveError, SolveOptions, SolveSpec, SolverKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuneTiming {
    pub tb: usize,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: usize,
    /// One entry per candidate, in candidate order.
    pub timings: Vec<TuneTiming>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneConfig {
    pub n: usize,
    pub threads: usize,
    pub dtype: DType,
    pub seed: u64,
    pub density: f64,
    /// Pad when a candidate does not divide `n`.
    pub pad: bool,
}

impl TuneConfig {
    pub fn new(n: usize, threads: usize) -> Self {
        TuneConfig {
            n,
            threads,
            dtype: DType::F32,
            seed: 1,
            density: 0.5,
            pad: false,
        }
    }
}

/// Times one blocked solve per candidate on a seeded random graph and
/// returns the fastest. Ties go to the earlier candidate.
pub fn autotune_tb(config: &TuneConfig, candidates: &[usize]) -> Result<TuneResult, SolveError> {
    if candidates.is_empty() {
        return Err(PlanError::NoCandidates.into());
    }
    // check every candidate before spending time on any of them
    for &tb in candidates {
        if tb == 0 {
            return Err(PlanError::ZeroTile.into());
        }
        if !config.pad && !config.n.is_multiple_of(tb) {
            return Err(PlanError::TileDoesNotDivide { n: config.n, tb }.into());
        }
    }
    let spec = GraphGenSpec::new(config.n, config.seed).with_density(config.density);
    let input: AnyDistanceMatrix = match config.dtype {
        DType::F32 => generate::<f32>(&spec).map(Into::into),
        DType::F64 => generate::<f64>(&spec).map(Into::into),
    }
    .map_err(|e: MatrixError| SolveError::from(e))?;

    let options = SolveOptions::default();
    let mut timings = Vec::with_capacity(candidates.len());
    for &tb in candidates {
        let solve_spec = SolveSpec {
            solver: SolverKind::Blocked,
            tb,
            threads: config.threads,
            pad: config.pad,
            options,
        };
        let time_s = with_matrix!(&input, m => solve(m, &solve_spec)?.wall_time);
        timings.push(TuneTiming { tb, time_s });
    }
    let best = timings
        .iter()
        .fold(None::<TuneTiming>, |acc, t| match acc {
            Some(a) if a.time_s <= t.time_s => Some(a),
            _ => Some(*t),
        })
        .map(|t| t.tb)
        .unwrap_or(candidates[0]);
    Ok(TuneResult { best, timings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_candidate() {
        let r = autotune_tb(&TuneConfig::new(128, 1), &[64]).unwrap();
        assert_eq!(r.best, 64);
        assert_eq!(r.timings.len(), 1);
    }

    #[test]
    fn all_candidates_timed() {
        let r = autotune_tb(&TuneConfig::new(128, 2), &[16, 32, 64]).unwrap();
        assert_eq!(r.timings.iter().map(|t| t.tb).collect::<Vec<_>>(), [16, 32, 64]);
        assert!(r.timings.iter().all(|t| t.time_s > 0.0));
        let min = r.timings.iter().map(|t| t.time_s).fold(f64::INFINITY, f64::min);
        assert_eq!(r.timings.iter().find(|t| t.tb == r.best).unwrap().time_s, min);
    }

    #[test]
    fn rejects_bad_candidates() {
        let cfg = TuneConfig::new(64, 1);
        assert_eq!(autotune_tb(&cfg, &[]), Err(SolveError::Plan(PlanError::NoCandidates)));
        assert_eq!(
            autotune_tb(&cfg, &[16, 48]),
            Err(SolveError::Plan(PlanError::TileDoesNotDivide { n: 64, tb: 48 }))
        );
        let padded = TuneConfig { pad: true, ..cfg };
        assert_eq!(autotune_tb(&padded, &[48]).unwrap().best, 48);
    }
}
