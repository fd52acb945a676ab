//! Throughput metric.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MetricError {
    #[error("elapsed time must be positive and finite, got {0}")]
    BadTime(f64),
    #[error("vertex count must be positive")]
    EmptyGraph,
}

/// `2 n^3 / (t * 10^9)`: one addition and one comparison per innermost
/// iteration, `n^3` iterations, `t` seconds.
pub fn gflops(n: usize, seconds: f64) -> Result<f64, MetricError> {
    if n == 0 {
        return Err(MetricError::EmptyGraph);
    }
    if !(seconds > 0.0) || !seconds.is_finite() {
        return Err(MetricError::BadTime(seconds));
    }
    // exact in f64 for n < 2^17
    let n = n as f64;
    Ok(2.0 * n * n * n / (seconds * 1e9))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_evaluation() {
        assert_eq!(gflops(1024, 1.0).unwrap(), 2.147483648);
        assert_eq!(gflops(4096, 2.0).unwrap(), 68.719476736);
    }

    #[test]
    fn doubling_n_is_eight_times() {
        for n in [64usize, 1000, 4096] {
            for t in [0.5, 1.0, 3.0] {
                assert_eq!(gflops(2 * n, t).unwrap(), 8.0 * gflops(n, t).unwrap());
            }
        }
    }

    #[test]
    fn rejects_bad_time() {
        assert_eq!(gflops(10, 0.0), Err(MetricError::BadTime(0.0)));
        assert_eq!(gflops(10, -1.0), Err(MetricError::BadTime(-1.0)));
        assert!(gflops(10, f64::NAN).is_err());
        assert_eq!(gflops(0, 1.0), Err(MetricError::EmptyGraph));
    }
}
