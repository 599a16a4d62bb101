//! Small dense row-major matrices over a [`Scalar`].

use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::{Real, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        &self.data
    }

}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs.data[k * rhs.cols + j].clone();
                    let slot = &mut out.data[i * rhs.cols + j];
                    *slot = slot.clone() + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    /// Entrywise max-norm of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> T::Real {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a.clone() - b.clone()).modulus())
            .fold(T::Real::zero(), |m, x| m.max(x))
    }

    pub fn max_abs(&self) -> T::Real {
        self.data.iter().map(|a| a.modulus()).fold(T::Real::zero(), |m, x| m.max(x))
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| {
                    a[r * n + col]
                        .modulus()
                        .partial_cmp(&a[s * n + col].modulus())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            if a[pivot * n + col].is_zero() {
                return T::zero();
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = T::zero() - det;
            }
            let p = a[col * n + col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let factor = a[r * n + col].clone() / p.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j].clone();
                    a[r * n + j] = a[r * n + j].clone() - factor.clone() * v;
                }
            }
        }
        det
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Gram-Schmidt on the columns of a square real matrix, then flips the first
/// column if needed so the result lies in SO(k).
pub fn orthonormalize_special<S: Real>(m: &Matrix<S>) -> Matrix<S> {
    let n = m.rows();
    let mut cols: Vec<Vec<S>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let dot = cols[j].iter().zip(&cols[k]).fold(S::zero(), |a, (x, y)| a + *x * *y);
            let basis = cols[k].clone();
            for (x, b) in cols[j].iter_mut().zip(basis) {
                *x = *x - dot * b;
            }
        }
        let norm = cols[j].iter().fold(S::zero(), |a, x| a + *x * *x).sqrt();
        for x in cols[j].iter_mut() {
            *x = *x / norm;
        }
    }
    let mut q = Matrix::from_fn(n, n, |i, j| cols[j][i]);
    if q.determinant() < S::zero() {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}
