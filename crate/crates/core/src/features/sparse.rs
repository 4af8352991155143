use super::FeatureError;

/// Sparse vector of positive integer counts with strictly ascending indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    counts: Vec<u32>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            counts: Vec::new(),
        }
    }

    /// Builds a vector from `(index, count)` pairs that are already sorted,
    /// unique, in range and positive.
    pub fn from_pairs(dim: usize, pairs: &[(usize, u32)]) -> Result<Self, FeatureError> {
        let mut prev: Option<usize> = None;
        for &(i, c) in pairs {
            if i >= dim {
                return Err(FeatureError::InvalidVector(format!(
                    "index {i} >= dimension {dim}"
                )));
            }
            if c == 0 {
                return Err(FeatureError::InvalidVector(format!(
                    "zero count at index {i}"
                )));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(FeatureError::InvalidVector(
                    "indices not strictly ascending".into(),
                ));
            }
            prev = Some(i);
        }
        Ok(SparseVector {
            dim,
            indices: pairs.iter().map(|&(i, _)| i as u32).collect(),
            counts: pairs.iter().map(|&(_, c)| c).collect(),
        })
    }

    /// Accumulates raw feature indices (any order, repeats allowed) into counts.
    pub fn from_occurrences(dim: usize, mut occurrences: Vec<u32>) -> Self {
        occurrences.sort_unstable();
        let mut indices = Vec::new();
        let mut counts: Vec<u32> = Vec::new();
        for i in occurrences {
            debug_assert!((i as usize) < dim);
            if indices.last() == Some(&i) {
                *counts.last_mut().unwrap() += 1;
            } else {
                indices.push(i);
                counts.push(1);
            }
        }
        SparseVector {
            dim,
            indices,
            counts,
        }
    }

    pub fn from_dense(counts: &[u32]) -> Self {
        let pairs: Vec<(usize, u32)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
            .collect();
        SparseVector::from_pairs(counts.len(), &pairs).expect("dense input is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.indices
            .iter()
            .zip(&self.counts)
            .map(|(&i, &c)| (i as usize, c))
    }

    pub fn get(&self, index: usize) -> u32 {
        match self.indices.binary_search(&(index as u32)) {
            Ok(pos) => self.counts[pos],
            Err(_) => 0,
        }
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.counts.iter().map(|&c| (c as f64) * (c as f64)).sum()
    }

    /// Dot product with a dense weight vector of length `dim`.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        debug_assert_eq!(weights.len(), self.dim);
        self.iter().map(|(i, c)| weights[i] * c as f64).sum()
    }

    /// `target += scale * self`.
    pub fn add_scaled_to(&self, target: &mut [f64], scale: f64) {
        for (i, c) in self.iter() {
            target[i] += scale * c as f64;
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.add_scaled_to(&mut out, 1.0);
        out
    }

    /// Multiplies every count by `factor` (> 0).
    pub fn scaled(&self, factor: u32) -> SparseVector {
        assert!(factor > 0);
        SparseVector {
            dim: self.dim,
            indices: self.indices.clone(),
            counts: self.counts.iter().map(|c| c * factor).collect(),
        }
    }
}
