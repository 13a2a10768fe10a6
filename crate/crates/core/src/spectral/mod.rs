//! Fourier–Galerkin representation of periodic fields on the torus [0, 2π)ᵈ.
//!
//! A field keeps the coefficients `c_k`, `|k_i| ≤ N`, of
//! `f(x) = Σ_k c_k e^{ik·x}` with `c_k = |𝕋ᵈ|⁻¹ ∫ f e^{−ik·x} dx`. Modes are
//! ordered lexicographically in `k` (first axis slowest), components are
//! stored one block after another.

mod calculus;
mod checkpoint;
mod norms;
mod transform;

pub use calculus::{curl, divergence, gradient, laplacian};
pub use checkpoint::{read_field, write_field, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use norms::{lp_norm, sobolev_norm, Norms};
pub use transform::{nonlinear_stress, nonlinear_stress_into, SpectralTransform};

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tensor rank of the values carried by a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Scalar,
    Vector,
    Matrix,
}

impl Shape {
    pub fn components(self, dim: usize) -> usize {
        match self {
            Shape::Scalar => 1,
            Shape::Vector => dim,
            Shape::Matrix => dim * dim,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            Shape::Scalar => 0,
            Shape::Vector => 1,
            Shape::Matrix => 2,
        }
    }

    pub fn from_code(code: u32) -> Option<Shape> {
        match code {
            0 => Some(Shape::Scalar),
            1 => Some(Shape::Vector),
            2 => Some(Shape::Matrix),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Scalar => "scalar",
            Shape::Vector => "vector",
            Shape::Matrix => "matrix",
        }
    }
}

/// Physical collocation grid: `m` points per axis on a 2π-periodic torus.
/// Point `j` has coordinates with the first axis fastest:
/// `j = j₁ + m·j₂`, `x_i = 2π j_i / m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    dim: usize,
    n: usize,
    m: usize,
}

fn next_smooth(mut m: usize) -> usize {
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize, m: usize) -> Result<Grid> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidParameter(format!("transforms support d = 1, 2; got {dim}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("mode budget N must be >= 1".into()));
        }
        if m < 2 * n + 1 {
            return Err(Error::InvalidParameter(format!("grid size {m} < 2N+1 = {}", 2 * n + 1)));
        }
        Ok(Grid { dim, n, m })
    }

    /// Smallest FFT-friendly grid resolving products of the given polynomial
    /// degree without aliasing into |k_i| ≤ N: M ≥ (q+1)N + 1. Without a
    /// degree the 3/2 rule is used.
    pub fn dealiased(dim: usize, n: usize, degree: Option<usize>) -> Result<Grid> {
        let min = match degree {
            Some(q) => (q.max(1) + 1) * n + 1,
            None => (3 * (2 * n + 1)).div_ceil(2),
        };
        Grid::new(dim, n, next_smooth(min.max(2 * n + 1)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modes_per_axis(&self) -> usize {
        2 * self.n + 1
    }

    pub fn mode_count(&self) -> usize {
        self.modes_per_axis().pow(self.dim as u32)
    }

    pub fn point_count(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    /// |𝕋ᵈ| = (2π)ᵈ.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Quadrature weight of one collocation point.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.point_count() as f64
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 2] {
        wavevector(self.dim, self.n, idx)
    }

    pub fn mode_index(&self, k: &[i64]) -> Option<usize> {
        mode_index(self.dim, self.n, k)
    }

    pub fn point(&self, j: usize) -> [f64; 2] {
        let h = 2.0 * PI / self.m as f64;
        match self.dim {
            1 => [h * j as f64, 0.0],
            _ => [h * (j % self.m) as f64, h * (j / self.m) as f64],
        }
    }
}

pub(crate) fn wavevector(dim: usize, n: usize, idx: usize) -> [i64; 2] {
    let l = 2 * n + 1;
    let n = n as i64;
    match dim {
        1 => [idx as i64 - n, 0],
        _ => [(idx / l) as i64 - n, (idx % l) as i64 - n],
    }
}

pub(crate) fn mode_index(dim: usize, n: usize, k: &[i64]) -> Option<usize> {
    let l = 2 * n + 1;
    let ni = n as i64;
    if k.len() < dim || k[..dim].iter().any(|&ki| ki.abs() > ni) {
        return None;
    }
    let mut idx = 0usize;
    for &ki in &k[..dim] {
        idx = idx * l + (ki + ni) as usize;
    }
    Some(idx)
}

/// Real periodic field held through Hermitian-symmetric Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    dim: usize,
    n: usize,
    shape: Shape,
    coeffs: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(dim: usize, n: usize, shape: Shape) -> Self {
        let modes = (2 * n + 1).pow(dim as u32);
        SpectralField { dim, n, shape, coeffs: vec![C64::new(0.0, 0.0); modes * shape.components(dim)] }
    }

    pub fn from_coeffs(dim: usize, n: usize, shape: Shape, coeffs: Vec<C64>) -> Result<Self> {
        let f = SpectralField::zeros(dim, n, shape);
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} coefficients", f.coeffs.len()),
                got: format!("{}", coeffs.len()),
            });
        }
        Ok(SpectralField { coeffs, ..f })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn components(&self) -> usize {
        self.shape.components(self.dim)
    }

    pub fn mode_count(&self) -> usize {
        (2 * self.n + 1).pow(self.dim as u32)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[C64] {
        let m = self.mode_count();
        &self.coeffs[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C64] {
        let m = self.mode_count();
        &mut self.coeffs[c * m..(c + 1) * m]
    }

    pub fn wavevector(&self, idx: usize) -> [i64; 2] {
        wavevector(self.dim, self.n, idx)
    }

    pub fn mode_index(&self, k: &[i64]) -> Option<usize> {
        mode_index(self.dim, self.n, k)
    }

    pub fn zero_mode_index(&self) -> usize {
        (self.mode_count() - 1) / 2
    }

    /// Coefficient of component `c` at wavevector `k` (zero outside the budget).
    pub fn get(&self, c: usize, k: &[i64]) -> C64 {
        self.mode_index(k).map(|i| self.component(c)[i]).unwrap_or_default()
    }

    /// Sets `c_k` and its mirror `c_{−k} = conj(c_k)`.
    pub fn set_mode(&mut self, c: usize, k: &[i64], value: C64) {
        let idx = self.mode_index(k).expect("wavevector outside mode budget");
        let mirror = self.mode_count() - 1 - idx;
        let comp = self.component_mut(c);
        if idx == mirror {
            comp[idx] = C64::new(value.re, 0.0);
        } else {
            comp[idx] = value;
            comp[mirror] = value.conj();
        }
    }

    /// Mean value of each component.
    pub fn mean(&self) -> Vec<f64> {
        let z = self.zero_mode_index();
        (0..self.components()).map(|c| self.component(c)[z].re).collect()
    }

    /// Symmetrizes `c_{−k} = conj(c_k)` by averaging the pair.
    pub fn enforce_hermitian(&mut self) {
        let m = self.mode_count();
        for c in 0..self.components() {
            let comp = self.component_mut(c);
            for i in 0..m / 2 {
                let j = m - 1 - i;
                let avg = 0.5 * (comp[i] + comp[j].conj());
                comp[i] = avg;
                comp[j] = avg.conj();
            }
            comp[m / 2].im = 0.0;
        }
    }

    /// Largest |c_k − conj(c_{−k})|.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.mode_count();
        let mut worst = 0.0f64;
        for c in 0..self.components() {
            let comp = self.component(c);
            for i in 0..m {
                worst = worst.max((comp[i] - comp[m - 1 - i].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_compatible(&self, other: &SpectralField) {
        assert!(
            self.dim == other.dim && self.n == other.n && self.shape == other.shape,
            "incompatible fields: ({}, {}, {:?}) vs ({}, {}, {:?})",
            self.dim,
            self.n,
            self.shape,
            other.dim,
            other.n,
            other.shape
        );
    }

    /// self += a · other
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        self.check_compatible(other);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
    }

    pub fn scaled(&self, a: f64) -> SpectralField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|x| *x *= a);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Copies coefficients into a field with mode budget `n`, truncating or
    /// zero-padding as needed.
    pub fn resized(&self, n: usize) -> SpectralField {
        let mut out = SpectralField::zeros(self.dim, n, self.shape);
        for c in 0..self.components() {
            for idx in 0..self.mode_count() {
                let k = self.wavevector(idx);
                if let Some(j) = out.mode_index(&k) {
                    out.component_mut(c)[j] = self.component(c)[idx];
                }
            }
        }
        out
    }

    /// Σ over components and modes of |c_k|² w(k).
    pub fn weighted_energy(&self, weight: impl Fn([i64; 2]) -> f64) -> f64 {
        let m = self.mode_count();
        let w: Vec<f64> = (0..m).map(|i| weight(self.wavevector(i))).collect();
        (0..self.components())
            .map(|c| self.component(c).iter().zip(&w).map(|(z, w)| z.norm_sqr() * w).sum::<f64>())
            .sum()
    }

    /// Largest coefficient difference, for fields of equal layout.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.check_compatible(other);
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_mode_order() {
        let g = Grid::new(2, 2, 8).unwrap();
        assert_eq!(g.wavevector(0), [-2, -2]);
        assert_eq!(g.wavevector(1), [-2, -1]);
        assert_eq!(g.wavevector(12), [0, 0]);
        for idx in 0..g.mode_count() {
            assert_eq!(g.mode_index(&g.wavevector(idx)), Some(idx));
        }
        assert_eq!(g.mode_index(&[3, 0]), None);
    }

    #[test]
    fn dealiasing_sizes() {
        assert!(Grid::dealiased(2, 64, Some(3)).unwrap().m() >= 257);
        assert_eq!(Grid::dealiased(1, 8, Some(1)).unwrap().m(), 18);
        assert!(Grid::dealiased(1, 10, None).unwrap().m() >= 32);
        assert!(Grid::new(1, 4, 8).is_err());
    }

    #[test]
    fn set_mode_writes_mirror() {
        let mut f = SpectralField::zeros(2, 3, Shape::Vector);
        f.set_mode(1, &[1, -2], C64::new(0.5, 0.25));
        assert_eq!(f.get(1, &[-1, 2]), C64::new(0.5, -0.25));
        assert_eq!(f.hermitian_defect(), 0.0);
    }

    #[test]
    fn resize_keeps_shared_modes() {
        let mut f = SpectralField::zeros(2, 2, Shape::Scalar);
        f.set_mode(0, &[2, 1], C64::new(1.0, 2.0));
        f.set_mode(0, &[1, 0], C64::new(3.0, 0.0));
        let up = f.resized(5);
        assert_eq!(up.get(0, &[2, 1]), C64::new(1.0, 2.0));
        let down = up.resized(1);
        assert_eq!(down.get(0, &[1, 0]), C64::new(3.0, 0.0));
        assert_eq!(down.get(0, &[2, 1]), C64::default());
    }
}
