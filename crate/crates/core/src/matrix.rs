//! Small dense matrices for pointwise constitutive evaluations.
//!
//! `Mat` is a d×d matrix (d ≤ 3) stored row-major on the stack. `Hessian`
//! is the d²×d² matrix of second derivatives of a stored energy, flattened
//! row-major over matrix indices: entry `(i*d + a, j*d + b)` is
//! ∂²W/∂F_{ia}∂F_{jb}.

use std::ops::{Add, Mul, Sub};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat {
    dim: usize,
    a: [f64; MAX_DIM * MAX_DIM],
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "dimension {dim} unsupported");
        Mat { dim, a: [0.0; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_row_major(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        let mut m = Mat::zeros(dim);
        m.a[..dim * dim].copy_from_slice(entries);
        m
    }

    pub fn scalar(u: f64) -> Self {
        Mat::from_row_major(1, &[u])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.a[i * self.dim + j] = value;
    }

    /// Entries in row-major order.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.a[..self.dim * self.dim]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        let n = self.dim * self.dim;
        &mut self.a[..n]
    }

    /// Frobenius inner product (F, G) = tr F Gᵀ.
    #[inline]
    pub fn dot(&self, other: &Mat) -> f64 {
        self.as_slice().iter().zip(other.as_slice()).map(|(x, y)| x * y).sum()
    }

    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.as_mut_slice().iter_mut().for_each(|x| *x *= s);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }
}

impl Add for Mat {
    type Output = Mat;
    fn add(mut self, rhs: Mat) -> Mat {
        debug_assert_eq!(self.dim, rhs.dim);
        for (x, y) in self.as_mut_slice().iter_mut().zip(rhs.as_slice()) {
            *x += y;
        }
        self
    }
}

impl Sub for Mat {
    type Output = Mat;
    fn sub(mut self, rhs: Mat) -> Mat {
        debug_assert_eq!(self.dim, rhs.dim);
        for (x, y) in self.as_mut_slice().iter_mut().zip(rhs.as_slice()) {
            *x -= y;
        }
        self
    }
}

impl Mul<Mat> for f64 {
    type Output = Mat;
    fn mul(self, rhs: Mat) -> Mat {
        rhs.scale(self)
    }
}

/// Second derivative of a stored energy as a symmetric d²×d² matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian {
    dim: usize,
    a: [f64; 81],
}

impl Hessian {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Hessian { dim, a: [0.0; 81] }
    }

    /// c · Id on matrices.
    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut h = Hessian::zeros(dim);
        for i in 0..dim * dim {
            h.set(i, i, c);
        }
        h
    }

    /// Side length d² of the flattened matrix.
    #[inline]
    pub fn size(&self) -> usize {
        self.dim * self.dim
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.size() + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        let n = self.size();
        self.a[r * n + c] = value;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, value: f64) {
        let n = self.size();
        self.a[r * n + c] += value;
    }

    /// Returns `self + shift·Id`.
    pub fn shifted(mut self, shift: f64) -> Self {
        for i in 0..self.size() {
            self.add_at(i, i, shift);
        }
        self
    }

    /// Bilinear form D²W[G, H] = Σ G_r D_rc H_c.
    pub fn form(&self, g: &Mat, h: &Mat) -> f64 {
        let n = self.size();
        let (gs, hs) = (g.as_slice(), h.as_slice());
        let mut acc = 0.0;
        for r in 0..n {
            let row = &self.a[r * n..(r + 1) * n];
            let mut s = 0.0;
            for c in 0..n {
                s += row[c] * hs[c];
            }
            acc += gs[r] * s;
        }
        acc
    }

    /// Action on a matrix: (D²W H)_r = Σ_c D_rc H_c.
    pub fn apply(&self, h: &Mat) -> Mat {
        let n = self.size();
        let mut out = Mat::zeros(self.dim);
        let hs = h.as_slice();
        for r in 0..n {
            out.as_mut_slice()[r] = (0..n).map(|c| self.get(r, c) * hs[c]).sum();
        }
        out
    }

    pub fn max_asymmetry(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..r {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.a[..self.size() * self.size()].iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.a[..self.size() * self.size()].iter().all(|x| x.is_finite())
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.size();
        if n == 1 {
            return self.a[0];
        }
        let m = nalgebra::DMatrix::from_fn(n, n, |r, c| 0.5 * (self.get(r, c) + self.get(c, r)));
        m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_form_is_frobenius_product() {
        let h = Hessian::scaled_identity(2, 1.0);
        let g = Mat::from_row_major(2, &[1.0, 2.0, 3.0, 4.0]);
        let k = Mat::from_row_major(2, &[-1.0, 0.5, 2.0, 1.0]);
        assert_eq!(h.form(&g, &k), g.dot(&k));
        assert_eq!(h.apply(&g), g);
    }

    #[test]
    fn min_eigenvalue_of_diagonal() {
        let mut h = Hessian::scaled_identity(2, 3.0);
        h.set(2, 2, -0.5);
        assert!((h.min_eigenvalue() + 0.5).abs() < 1e-14);
    }
}
