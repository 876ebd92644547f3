//! Dense row-major matrix with the small set of operations the estimators use.

use std::ops::{Index, IndexMut};

use crate::error::{CoatError, Result};
use crate::num::{c, Real};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    /// Matrix of zeros.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    /// Build from a function of the index pair.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    /// Wrap an existing backing vector; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(CoatError::Dimension(format!(
                "backing vector has {} entries, expected {}",
                data.len(),
                rows * cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != p {
                return Err(CoatError::Dimension(format!(
                    "row {i} has {} entries, expected {p}",
                    r.len()
                )));
            }
        }
        let mut data = Vec::with_capacity(n * p);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: n,
            cols: p,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Borrow row `i` as a slice.
    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Flat view of the backing storage, row-major.
    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    /// New matrix keeping only the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Entry-wise map.
    pub fn map(&self, f: impl Fn(F) -> F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    /// Largest absolute entry-wise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> F {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(F::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    /// Entry-wise `L_inf` norm.
    pub fn norm_max(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    /// Matrix `L_1` norm: the maximum absolute column sum.
    pub fn norm_l1(&self) -> F {
        let mut best = F::zero();
        for j in 0..self.cols {
            let mut s = F::zero();
            for i in 0..self.rows {
                s += self[(i, j)].abs();
            }
            best = best.max(s);
        }
        best
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> F {
        self.data
            .iter()
            .fold(F::zero(), |acc, &v| acc + v * v)
            .sqrt()
    }

    /// Squared Frobenius norm, summed in storage order.
    pub fn norm_fro_sq(&self) -> F {
        self.data.iter().fold(F::zero(), |acc, &v| acc + v * v)
    }

    /// Largest absolute asymmetry `|a_ij - a_ji|` over the upper triangle.
    pub fn sym_error(&self) -> F {
        debug_assert!(self.is_square());
        let mut worst = F::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Replace the matrix by `(A + A^T) / 2`.
    pub fn symmetrize(&mut self) {
        debug_assert!(self.is_square());
        let half = c::<F>(0.5);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let m = (self[(i, j)] + self[(j, i)]) * half;
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    /// True when every entry is finite.
    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Number of nonzero off-diagonal entries (square matrices).
    pub fn nnz_offdiag(&self) -> usize {
        debug_assert!(self.is_square());
        let mut count = 0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && self[(i, j)] != F::zero() {
                    count += 1;
                }
            }
        }
        count
    }
}

impl<F> Index<(usize, usize)> for Mat<F> {
    type Output = F;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Mat<F> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_norm_is_max_column_sum() {
        let m = Mat::from_rows(&[vec![1.0, -2.0], vec![3.0, 0.5]]).unwrap();
        assert_eq!(m.norm_l1(), 4.0);
    }

    #[test]
    fn symmetrize_averages_mirror_entries() {
        let mut m = Mat::from_rows(&[vec![1.0, 2.0], vec![4.0, 1.0]]).unwrap();
        m.symmetrize();
        assert_eq!(m[(0, 1)], 3.0);
        assert_eq!(m[(1, 0)], 3.0);
    }

    #[test]
    fn select_rows_preserves_order() {
        let m = Mat::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let s = m.select_rows(&[2, 0]);
        assert_eq!(s.row(0), &[5.0, 6.0]);
        assert_eq!(s.row(1), &[1.0, 2.0]);
    }

    #[test]
    fn fro_norm_matches_hand_value() {
        let m = Mat::from_rows(&[vec![3.0_f64, 4.0]]).unwrap();
        assert!((m.norm_fro() - 5.0).abs() < 1e-15);
    }
}
