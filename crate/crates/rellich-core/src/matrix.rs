//! Minimal dense symmetric linear algebra for the small (n <= 16) matrices
//! appearing in anisotropic norms and fundamental tensors.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense square matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    /// Builds an `n x n` matrix from row-major entries.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self {
            n,
            data: vec![T::zero(); n * n],
        };
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Zero matrix.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Matrix-vector product.
    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n, "matvec dimension mismatch");
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Largest relative asymmetry |a_ij - a_ji| / scale.
    pub fn asymmetry(&self) -> T {
        let mut scale = T::zero();
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                scale = scale.max(self.get(i, j).abs());
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        if scale > T::zero() {
            worst / scale
        } else {
            T::zero()
        }
    }

    /// Cholesky factorization `A = L L^T`. Fails unless the matrix is
    /// symmetric positive definite (up to roundoff).
    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        let n = self.n;
        let mut l = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum = sum - l.get(i, k) * l.get(j, k);
                }
                if i == j {
                    if sum <= T::zero() {
                        return Err(Error::NotPositiveDefinite(format!("pivot {i} is {sum}")));
                    }
                    l.set(i, j, sum.sqrt());
                } else {
                    l.set(i, j, sum / l.get(j, j));
                }
            }
        }
        Ok(Cholesky { l })
    }
}

/// Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: SquareMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.l.n;
        assert_eq!(b.len(), n, "solve dimension mismatch");
        // Forward: L y = b.
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum = sum - self.l.get(i, k) * y[k];
            }
            y[i] = sum / self.l.get(i, i);
        }
        // Backward: L^T x = y.
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut sum = y[i];
            for k in i + 1..n {
                sum = sum - self.l.get(k, i) * x[k];
            }
            x[i] = sum / self.l.get(i, i);
        }
        x
    }

    /// Determinant of the original matrix.
    pub fn det(&self) -> T {
        let mut d = T::one();
        for i in 0..self.l.n {
            let p = self.l.get(i, i);
            d = d * p * p;
        }
        d
    }

    /// Inverse of the original matrix.
    pub fn inverse(&self) -> SquareMatrix<T> {
        let n = self.l.n;
        let mut inv = SquareMatrix::zeros(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        inv
    }
}
