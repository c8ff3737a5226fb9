//! Small dense helpers: row-major matrices, orthonormal row bases and
//! low-coherence line packing.

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Panics when `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self * v` for a vector of length `cols`.
    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.cols);
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), v);
        }
    }

    /// `self^T * v` for a vector of length `rows`.
    pub fn mul_t_vec(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, self.row(i), out);
            }
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

fn normalize(a: &mut [f64]) {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|v| *v /= n);
    }
}

pub fn gaussian(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| StandardNormal.sample(rng)).collect();
    Matrix::from_vec(rows, cols, data)
}

/// `rows x cols` matrix with orthonormal rows (`rows <= cols`), from a
/// Gaussian draw orthogonalized by modified Gram-Schmidt.
pub fn orthonormal_rows(rng: &mut Rng, rows: usize, cols: usize) -> Matrix {
    assert!(rows <= cols, "cannot fit {rows} orthonormal rows in R^{cols}");
    loop {
        let mut m = gaussian(rng, rows, cols);
        let mut ok = true;
        for i in 0..rows {
            for j in 0..i {
                let (head, tail) = m.data.split_at_mut(i * cols);
                let prev = &head[j * cols..(j + 1) * cols];
                let cur = &mut tail[..cols];
                let p = dot(cur, prev);
                axpy(-p, prev, cur);
            }
            if norm(m.row(i)) < 1e-8 {
                ok = false;
                break;
            }
            normalize(m.row_mut(i));
        }
        if ok {
            return m;
        }
    }
}

/// Largest absolute inner product between distinct rows.
pub fn coherence(m: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.rows {
        for j in 0..i {
            worst = worst.max(libm::fabs(dot(m.row(i), m.row(j))));
        }
    }
    worst
}

/// `count` unit vectors in `R^dim` pushed apart by gradient steps on the
/// potential `sum |<a_i, a_j>|^10` until their coherence is at most
/// `target` or `max_iter` steps have run. Returns the packing and its
/// coherence.
pub fn pack_lines(rng: &mut Rng, count: usize, dim: usize, target: f64, max_iter: usize) -> (Matrix, f64) {
    let mut a = gaussian(rng, count, dim);
    for i in 0..count {
        normalize(a.row_mut(i));
    }
    const STEP: f64 = 0.05;
    let mut gram = vec![0.0; count * count];
    let mut coh = coherence(&a);
    for _ in 0..max_iter {
        if coh <= target || count < 2 {
            break;
        }
        for i in 0..count {
            for j in 0..count {
                gram[i * count + j] = if i == j { 0.0 } else { dot(a.row(i), a.row(j)) };
            }
        }
        let mut next = a.clone();
        for i in 0..count {
            for j in 0..count {
                let w = libm::pow(gram[i * count + j] / coh, 9.0);
                if w != 0.0 {
                    axpy(-STEP * w, a.row(j), next.row_mut(i));
                }
            }
            normalize(next.row_mut(i));
        }
        a = next;
        coh = coherence(&a);
    }
    (a, coh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from;

    #[test]
    fn rows_are_orthonormal() {
        let mut rng = rng_from(1);
        let q = orthonormal_rows(&mut rng, 8, 64);
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot(q.row(i), q.row(j)) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn packing_reaches_target() {
        let mut rng = rng_from(2);
        let (a, coh) = pack_lines(&mut rng, 30, 8, 0.45, 2000);
        assert!(coh <= 0.45, "coherence {coh}");
        assert!((coherence(&a) - coh).abs() < 1e-15);
        for i in 0..30 {
            assert!((norm(a.row(i)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transpose_product() {
        let m = Matrix::from_vec(2, 3, alloc::vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let mut out = [0.0; 2];
        m.mul_vec(&[1.0, 0.0, -1.0], &mut out);
        assert_eq!(out, [-2.0, -2.0]);
        let mut out = [0.0; 3];
        m.mul_t_vec(&[1.0, 1.0], &mut out);
        assert_eq!(out, [5.0, 7.0, 9.0]);
    }
}
