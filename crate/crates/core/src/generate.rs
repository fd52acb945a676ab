//! Seeded random dense graphs with integer-valued weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::MatrixError;
use crate::matrix::DistanceMatrix;
use crate::weight::Weight;

/// Parameters of a random directed graph.
///
/// Each ordered pair `i != j` carries an edge with probability `density`;
/// edge weights are integers drawn uniformly from `weight_min..=weight_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphGenSpec {
    pub n: usize,
    pub density: f64,
    pub weight_min: u32,
    pub weight_max: u32,
    pub seed: u64,
}

impl GraphGenSpec {
    /// Density 0.5 and weights in `[1, 100]`.
    pub fn new(n: usize, seed: u64) -> Self {
        GraphGenSpec {
            n,
            density: 0.5,
            weight_min: 1,
            weight_max: 100,
            seed,
        }
    }

    pub fn with_density(mut self, density: f64) -> Self {
        self.density = density;
        self
    }

    pub fn with_weights(mut self, min: u32, max: u32) -> Self {
        self.weight_min = min;
        self.weight_max = max;
        self
    }

    pub fn validate(&self) -> Result<(), MatrixError> {
        if self.n == 0 {
            return Err(MatrixError::Empty);
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(MatrixError::InvalidSpec("density must lie in [0, 1]"));
        }
        if self.weight_min < 1 {
            return Err(MatrixError::InvalidSpec("minimum weight must be at least 1"));
        }
        if self.weight_min > self.weight_max {
            return Err(MatrixError::InvalidSpec("minimum weight exceeds maximum weight"));
        }
        Ok(())
    }
}

/// Generates the matrix described by `spec`. A pure function of `spec`.
///
/// Pairs are visited in row-major order; for each off-diagonal pair one
/// Bernoulli draw decides the edge and, if present, one draw picks the weight.
pub fn generate<T: Weight>(spec: &GraphGenSpec) -> Result<DistanceMatrix<T>, MatrixError> {
    spec.validate()?;
    let n = spec.n;
    let mut matrix = DistanceMatrix::<T>::unconnected(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data = matrix.as_mut_slice();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if rng.random_bool(spec.density) {
                let w = rng.random_range(spec.weight_min..=spec.weight_max);
                data[i * n + j] = T::from_u32(w);
            }
        }
    }
    Ok(matrix)
}
