//! Symmetric banded matrices and their Cholesky factorization.
//!
//! The reduced LDG system on a structured mesh couples each cell only to
//! itself and its edge/corner neighbors within one mesh row, so all nonzeros
//! live within `6 * nx + 5` subdiagonals. Storage is the lower band in
//! column-major order: entry `(i, j)` with `j <= i <= j + bw` lives at
//! `data[j * (bw + 1) + (i - j)]`.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

/// Cholesky factor of a [`BandMatrix`]; same storage, same bandwidth.
#[derive(Clone, Debug)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        BandMatrix { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Adds to entry `(i, j)` of the lower triangle (`i >= j`).
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i >= j && i - j <= self.bw, "entry ({i}, {j}) outside band {}", self.bw);
        self.data[j * (self.bw + 1) + (i - j)] += v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i >= j { (j, i) } else { (i, j) };
        if hi - lo > self.bw {
            0.0
        } else {
            self.data[lo * (self.bw + 1) + (hi - lo)]
        }
    }

    /// Right-looking in-place Cholesky. Consumes the matrix; fails with the
    /// pivot index if the matrix is not positive definite.
    pub fn cholesky(mut self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        let w = bw + 1;
        for j in 0..n {
            let reach = bw.min(n - 1 - j);
            let d = self.data[j * w];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::SolverFailure(format!(
                    "banded Cholesky pivot {d:e} at index {j} (matrix not positive definite)"
                )));
            }
            let d = d.sqrt();
            self.data[j * w] = d;
            let inv = 1.0 / d;
            for r in 1..=reach {
                self.data[j * w + r] *= inv;
            }
            // Trailing update: column i gets the outer-product contribution
            // of column j restricted to the band.
            for r in 1..=reach {
                let c = self.data[j * w + r];
                if c == 0.0 {
                    continue;
                }
                let i = j + r;
                let base_i = i * w;
                let base_j = j * w + r;
                for s in 0..=(reach - r) {
                    self.data[base_i + s] -= c * self.data[base_j + s];
                }
            }
        }
        Ok(BandCholesky { n, bw, data: self.data })
    }
}

impl BandCholesky {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        // Forward: column-oriented so factor columns stream contiguously.
        for k in 0..n {
            let yk = b[k] / self.data[k * w];
            b[k] = yk;
            let reach = bw.min(n - 1 - k);
            let base = k * w;
            for r in 1..=reach {
                b[k + r] -= self.data[base + r] * yk;
            }
        }
        // Backward.
        for j in (0..n).rev() {
            let reach = bw.min(n - 1 - j);
            let base = j * w;
            let mut s = b[j];
            for r in 1..=reach {
                s -= self.data[base + r] * b[j + r];
            }
            b[j] = s / self.data[base];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
