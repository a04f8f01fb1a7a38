//! Dense kernels for the 6x6 per-cell blocks.

use super::basis::N_BASIS;
use crate::error::{Error, Result};

pub(crate) type Mat6 = [[f64; N_BASIS]; N_BASIS];

/// Cholesky factor (lower triangular) of a symmetric positive definite 6x6
/// matrix. Fails on a nonpositive pivot.
pub(crate) fn cholesky6(a: &Mat6) -> Result<Mat6> {
    let mut l = [[0.0; N_BASIS]; N_BASIS];
    for j in 0..N_BASIS {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) {
            return Err(Error::SolverFailure(format!(
                "6x6 cell block is not positive definite (pivot {d:e} at index {j})"
            )));
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in j + 1..N_BASIS {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L L^T x = b` given the Cholesky factor `L`.
#[inline]
pub(crate) fn chol_solve6(l: &Mat6, b: &[f64; N_BASIS]) -> [f64; N_BASIS] {
    let mut y = [0.0; N_BASIS];
    for i in 0..N_BASIS {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i][k] * y[k];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; N_BASIS];
    for i in (0..N_BASIS).rev() {
        let mut s = y[i];
        for k in i + 1..N_BASIS {
            s -= l[k][i] * x[k];
        }
        x[i] = s / l[i][i];
    }
    x
}

#[inline]
pub(crate) fn matvec6(a: &Mat6, x: &[f64; N_BASIS]) -> [f64; N_BASIS] {
    let mut y = [0.0; N_BASIS];
    for i in 0..N_BASIS {
        let mut s = 0.0;
        for j in 0..N_BASIS {
            s += a[i][j] * x[j];
        }
        y[i] = s;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_an_spd_system() {
        // A = B^T B + I is SPD for any B.
        let b: Mat6 = [
            [1.0, 2.0, 0.5, -1.0, 0.0, 0.3],
            [0.0, 1.5, 1.0, 0.2, -0.7, 0.1],
            [2.0, -0.3, 1.0, 0.0, 0.4, -0.2],
            [0.1, 0.1, 0.1, 2.0, 1.0, 0.0],
            [-0.5, 0.6, 0.0, 1.0, 1.0, 1.0],
            [0.2, 0.0, -0.4, 0.3, 0.9, 1.1],
        ];
        let mut a = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    a[i][j] += b[k][i] * b[k][j];
                }
            }
            a[i][i] += 1.0;
        }
        let x_true = [1.0, -2.0, 3.0, -4.0, 5.0, -6.0];
        let rhs = matvec6(&a, &x_true);
        let l = cholesky6(&a).unwrap();
        let x = chol_solve6(&l, &rhs);
        for i in 0..6 {
            assert!((x[i] - x_true[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite_blocks() {
        let mut a = [[0.0; 6]; 6];
        for i in 0..6 {
            a[i][i] = 1.0;
        }
        a[3][3] = -1.0;
        assert!(cholesky6(&a).is_err());
    }
}
