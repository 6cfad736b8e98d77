//! Small dense matrices, Cholesky factorization, and a Jacobi symmetric
//! eigensolver used for the eigenvalue-flooring repair of estimated
//! correlation matrices. Dimensions here are tiny (visits, or dose-arm
//! counts), so everything is plain row-major `Vec<f64>`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use libm::sqrt;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Matrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Sum of all entries; for a covariance block this is the quadratic
    /// form J'MJ with J the all-ones vector.
    pub fn grand_sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn transposed(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// L · Lᵀ for a lower-triangular factor.
    pub fn lower_times_transpose(&self) -> Matrix {
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..=i.min(j) {
                    s += self[(i, k)] * self[(j, k)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    /// y = L·g for a lower-triangular factor, writing into `out`.
    pub fn lower_mul_vec(&self, g: &[f64], out: &mut [f64]) {
        let n = self.rows;
        debug_assert_eq!(g.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..=i {
                s += self[(i, k)] * g[k];
            }
            out[i] = s;
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    NotPositiveDefinite { pivot: usize },
    NotSquare,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            LinalgError::NotSquare => write!(f, "matrix is not square"),
        }
    }
}

impl core::error::Error for LinalgError {}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
pub fn cholesky(m: &Matrix) -> Result<Matrix, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NotSquare);
    }
    let n = m.rows;
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(LinalgError::NotPositiveDefinite { pivot: i });
                }
                l[(i, i)] = sqrt(s);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix via cyclic
/// Jacobi rotations.
pub fn sym_eigen(m: &Matrix) -> (Vec<f64>, Matrix) {
    assert_eq!(m.rows, m.cols, "sym_eigen needs a square matrix");
    let n = m.rows;
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale: f64 = a.data.iter().map(|x| x * x).sum::<f64>().max(1.0);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[(i, i)]).collect();
    (vals, v)
}

/// Minimum eigenvalue kept by the non-PSD repair.
pub const EIGENVALUE_FLOOR: f64 = 1e-10;

/// Symmetric matrix with unit diagonal holding the estimated component
/// correlations. `repair` floors its spectrum so Cholesky factorization and
/// sampling always succeed.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    m: Matrix,
}

impl CorrelationMatrix {
    /// Build from an entry function over `(i, j)`, `i < j`; the diagonal is
    /// set to 1 and entries are mirrored.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::identity(dim);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let r = f(i, j);
                m[(i, j)] = r;
                m[(j, i)] = r;
            }
        }
        CorrelationMatrix { m }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    /// Lower Cholesky factor; fails when the matrix is not positive
    /// definite (call [`CorrelationMatrix::repair`] first in that case).
    pub fn cholesky(&self) -> Result<Matrix, LinalgError> {
        cholesky(&self.m)
    }

    /// Floor the eigenvalues at [`EIGENVALUE_FLOOR`] and reconstruct.
    /// Returns `true` when the matrix actually changed. The diagonal may
    /// move away from 1 by O(floor); it is not re-normalized so the floored
    /// spectrum is preserved exactly.
    pub fn repair(&mut self) -> bool {
        let (vals, vecs) = sym_eigen(&self.m);
        if vals.iter().all(|&v| v >= EIGENVALUE_FLOOR) {
            return false;
        }
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (e, val) in vals.iter().enumerate() {
                    s += vecs[(i, e)] * val.max(EIGENVALUE_FLOOR) * vecs[(j, e)];
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        self.m = out;
        true
    }
}
