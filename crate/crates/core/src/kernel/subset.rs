use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonempty set of coordinate indices of `R^n`, stored sorted.
///
/// Indices are zero-based: the subset `{0, 2}` of `R^3` spans the first and
/// third standard basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoordSubset {
    n: usize,
    indices: Vec<usize>,
}

impl CoordSubset {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        let ok = !indices.is_empty()
            && indices.windows(2).all(|w| w[0] < w[1])
            && indices.last().is_some_and(|&m| m < n);
        if !ok {
            return Err(Error::InvalidSubset { n, indices });
        }
        Ok(Self { n, indices })
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            indices: (0..n).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Keeps the coordinates in the subset.
    pub fn restrict<T: Clone>(&self, x: &[T]) -> Vec<T> {
        self.indices.iter().map(|&i| x[i].clone()).collect()
    }

    /// Places subset coordinates back into `R^n`, filling the rest with `zero`.
    pub fn embed<T: Clone>(&self, y: &[T], zero: T) -> Vec<T> {
        let mut x = vec![zero; self.n];
        for (&i, v) in self.indices.iter().zip(y) {
            x[i] = v.clone();
        }
        x
    }

    /// All `k`-element subsets of `{0, …, n-1}` in lexicographic order.
    pub fn all_of_size(n: usize, k: usize) -> Vec<CoordSubset> {
        let mut out = Vec::new();
        if k == 0 || k > n {
            return out;
        }
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(CoordSubset {
                n,
                indices: idx.clone(),
            });
            let mut i = k;
            while i > 0 && idx[i - 1] == n - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                return out;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
}
