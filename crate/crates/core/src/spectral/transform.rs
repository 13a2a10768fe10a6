//! Pruned real-to-complex transforms between coefficients and grid values.
//!
//! Only the retained modes |k_i| ≤ N are touched: in 2D the inverse runs
//! N+1 complex transforms along the second axis (for k₁ ≥ 0) followed by M
//! complex-to-real transforms along the first axis; the forward transform
//! mirrors this. Negative k₁ follow from Hermitian symmetry.

use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use super::{Grid, Shape, SpectralField};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::stored_energy::StoredEnergyModel;

type C64 = Complex64;

/// Transform plans and scratch buffers for one grid. Reuse one instance per
/// thread; all methods take `&mut self` because scratch is shared.
pub struct SpectralTransform {
    grid: Grid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fwd: Option<Arc<dyn Fft<f64>>>,
    inv: Option<Arc<dyn Fft<f64>>>,
    half: Vec<C64>,
    line: Vec<f64>,
    rows: Vec<C64>,
    real_scratch: Vec<C64>,
    complex_scratch: Vec<C64>,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform").field("grid", &self.grid).finish()
    }
}

impl Clone for SpectralTransform {
    fn clone(&self) -> Self {
        SpectralTransform::new(self.grid)
    }
}

impl SpectralTransform {
    pub fn new(grid: Grid) -> Self {
        let m = grid.m();
        let mut real_planner = RealFftPlanner::<f64>::new();
        let r2c = real_planner.plan_fft_forward(m);
        let c2r = real_planner.plan_fft_inverse(m);
        let (fwd, inv) = if grid.dim() == 2 {
            let mut planner = FftPlanner::<f64>::new();
            (Some(planner.plan_fft_forward(m)), Some(planner.plan_fft_inverse(m)))
        } else {
            (None, None)
        };
        let real_len = r2c.get_scratch_len().max(c2r.get_scratch_len());
        let complex_len = fwd
            .iter()
            .chain(inv.iter())
            .map(|p| p.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        let rows = if grid.dim() == 2 { (grid.n() + 1) * m } else { 0 };
        SpectralTransform {
            grid,
            r2c,
            c2r,
            fwd,
            inv,
            half: vec![C64::default(); m / 2 + 1],
            line: vec![0.0; m],
            rows: vec![C64::default(); rows],
            real_scratch: vec![C64::default(); real_len],
            complex_scratch: vec![C64::default(); complex_len],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Grid values of one scalar component from its `(2N+1)ᵈ` coefficients.
    pub fn inverse_scalar(&mut self, coeffs: &[C64], out: &mut [f64]) {
        let (n, m) = (self.grid.n(), self.grid.m());
        let l = 2 * n + 1;
        assert_eq!(coeffs.len(), self.grid.mode_count());
        assert_eq!(out.len(), self.grid.point_count());
        match self.grid.dim() {
            1 => {
                self.half.fill(C64::default());
                self.half[..=n].copy_from_slice(&coeffs[n..]);
                self.half[0].im = 0.0;
                if m % 2 == 0 {
                    self.half[m / 2].im = 0.0;
                }
                self.c2r
                    .process_with_scratch(&mut self.half, out, &mut self.real_scratch)
                    .expect("c2r buffer sizes");
            }
            _ => {
                self.rows.fill(C64::default());
                for r in 0..=n {
                    let row = &mut self.rows[r * m..(r + 1) * m];
                    let src = &coeffs[(r + n) * l..(r + n + 1) * l];
                    for (j, &c) in src.iter().enumerate() {
                        let k2 = j as i64 - n as i64;
                        row[k2.rem_euclid(m as i64) as usize] = c;
                    }
                }
                let inv = self.inv.as_ref().expect("2D plan");
                inv.process_with_scratch(&mut self.rows, &mut self.complex_scratch);
                for j2 in 0..m {
                    self.half.fill(C64::default());
                    for r in 0..=n {
                        self.half[r] = self.rows[r * m + j2];
                    }
                    self.half[0].im = 0.0;
                    self.c2r
                        .process_with_scratch(&mut self.half, &mut out[j2 * m..(j2 + 1) * m], &mut self.real_scratch)
                        .expect("c2r buffer sizes");
                }
            }
        }
    }

    /// Coefficients `|k_i| ≤ N` of grid values, normalized so that
    /// `forward ∘ inverse` is the identity on the retained modes.
    pub fn forward_scalar(&mut self, values: &[f64], out: &mut [C64]) {
        let (n, m) = (self.grid.n(), self.grid.m());
        let l = 2 * n + 1;
        assert_eq!(values.len(), self.grid.point_count());
        assert_eq!(out.len(), self.grid.mode_count());
        match self.grid.dim() {
            1 => {
                self.line.copy_from_slice(values);
                self.r2c
                    .process_with_scratch(&mut self.line, &mut self.half, &mut self.real_scratch)
                    .expect("r2c buffer sizes");
                let s = 1.0 / m as f64;
                out[n] = C64::new(self.half[0].re * s, 0.0);
                for k in 1..=n {
                    let c = self.half[k] * s;
                    out[n + k] = c;
                    out[n - k] = c.conj();
                }
            }
            _ => {
                for j2 in 0..m {
                    self.line.copy_from_slice(&values[j2 * m..(j2 + 1) * m]);
                    self.r2c
                        .process_with_scratch(&mut self.line, &mut self.half, &mut self.real_scratch)
                        .expect("r2c buffer sizes");
                    for r in 0..=n {
                        self.rows[r * m + j2] = self.half[r];
                    }
                }
                let fwd = self.fwd.as_ref().expect("2D plan");
                fwd.process_with_scratch(&mut self.rows, &mut self.complex_scratch);
                let s = 1.0 / (m * m) as f64;
                let mm = m as i64;
                for r in 0..=n {
                    let row = &self.rows[r * m..(r + 1) * m];
                    for j in 0..l {
                        let k2 = j as i64 - n as i64;
                        let c = row[k2.rem_euclid(mm) as usize] * s;
                        out[(r + n) * l + j] = c;
                        if r > 0 {
                            out[(n - r) * l + (l - 1 - j)] = c.conj();
                        }
                    }
                }
                // the k₁ = 0 row is computed on both sides of k₂; symmetrize it
                let row = &mut out[n * l..(n + 1) * l];
                for j in 0..n {
                    let avg = 0.5 * (row[j] + row[l - 1 - j].conj());
                    row[j] = avg;
                    row[l - 1 - j] = avg.conj();
                }
                row[n].im = 0.0;
            }
        }
    }

    /// Grid values of every component, one vector per component.
    pub fn to_physical(&mut self, field: &SpectralField) -> Vec<Vec<f64>> {
        self.check(field);
        (0..field.components())
            .map(|c| {
                let mut out = vec![0.0; self.grid.point_count()];
                self.inverse_scalar(field.component(c), &mut out);
                out
            })
            .collect()
    }

    pub fn from_physical(&mut self, shape: Shape, values: &[Vec<f64>]) -> Result<SpectralField> {
        let (d, n) = (self.grid.dim(), self.grid.n());
        let mut field = SpectralField::zeros(d, n, shape);
        if values.len() != field.components() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} components", field.components()),
                got: format!("{}", values.len()),
            });
        }
        for (c, v) in values.iter().enumerate() {
            if v.len() != self.grid.point_count() {
                return Err(Error::ShapeMismatch {
                    expected: format!("{} grid values", self.grid.point_count()),
                    got: format!("{}", v.len()),
                });
            }
            self.forward_scalar(v, field.component_mut(c));
        }
        Ok(field)
    }

    /// Samples `f` at the grid points and projects onto the retained modes.
    pub fn project(&mut self, shape: Shape, f: impl Fn([f64; 2]) -> Vec<f64>) -> Result<SpectralField> {
        let comps = shape.components(self.grid.dim());
        let mut values = vec![vec![0.0; self.grid.point_count()]; comps];
        for j in 0..self.grid.point_count() {
            let v = f(self.grid.point(j));
            for c in 0..comps {
                values[c][j] = v[c];
            }
        }
        self.from_physical(shape, &values)
    }

    fn check(&self, field: &SpectralField) {
        assert!(
            field.dim() == self.grid.dim() && field.n() == self.grid.n(),
            "field (d={}, N={}) does not match transform grid (d={}, N={})",
            field.dim(),
            field.n(),
            self.grid.dim(),
            self.grid.n()
        );
    }

    /// Grid values of a matrix field as one `Mat` per point.
    pub fn matrices(&mut self, field: &SpectralField, offset: &Mat) -> Vec<Mat> {
        assert_eq!(field.shape(), Shape::Matrix);
        let comps = self.to_physical(field);
        let d = self.grid.dim();
        (0..self.grid.point_count())
            .map(|j| {
                let mut f = *offset;
                for (c, v) in comps.iter().enumerate() {
                    f.as_mut_slice()[c] += v[j];
                }
                debug_assert_eq!(f.dim(), d);
                f
            })
            .collect()
    }
}

/// Coefficients of S(F̄ + F) where the fluctuation F is given spectrally and
/// F̄ is a constant matrix. Pointwise evaluation on the transform grid, so the
/// product is free of aliasing when the grid resolves the stress degree.
/// Also returns the grid quadrature of W.
pub fn nonlinear_stress(
    tr: &mut SpectralTransform,
    model: &StoredEnergyModel,
    offset: &Mat,
    f: &SpectralField,
) -> Result<(SpectralField, f64)> {
    let mut out = SpectralField::zeros(f.dim(), f.n(), Shape::Matrix);
    let mut buf = Vec::new();
    let energy = nonlinear_stress_into(tr, model, offset, f, &mut out, &mut buf)?;
    Ok((out, energy))
}

/// Allocation-free form of [`nonlinear_stress`]; `buf` is grid scratch.
pub fn nonlinear_stress_into(
    tr: &mut SpectralTransform,
    model: &StoredEnergyModel,
    offset: &Mat,
    f: &SpectralField,
    out: &mut SpectralField,
    buf: &mut Vec<Vec<f64>>,
) -> Result<f64> {
    let d = f.dim();
    if model.dim() != d || f.shape() != Shape::Matrix || offset.dim() != d {
        return Err(Error::ShapeMismatch {
            expected: format!("{}-dimensional matrix field", model.dim()),
            got: format!("{}-dimensional {} field", d, f.shape().name()),
        });
    }
    tr.check(f);
    let points = tr.grid.point_count();
    let comps = d * d;
    buf.resize_with(comps, Vec::new);
    for (c, values) in buf.iter_mut().enumerate() {
        values.resize(points, 0.0);
        tr.inverse_scalar(f.component(c), values);
    }
    let base = offset.as_slice();
    let energy = match model {
        // hot path: closed forms with the model dispatch hoisted out of the loop
        StoredEnergyModel::Quartic { alpha, .. } => {
            let alpha = *alpha;
            pointwise(buf, base, points, |f| {
                let n2: f64 = f.iter().map(|x| x * x).sum();
                let g = n2 - alpha;
                f.iter_mut().for_each(|x| *x *= g);
                0.25 * n2 * n2 - 0.5 * alpha * n2
            })
        }
        StoredEnergyModel::Quadratic { mu, .. } => {
            let mu = *mu;
            pointwise(buf, base, points, |f| {
                let n2: f64 = f.iter().map(|x| x * x).sum();
                f.iter_mut().for_each(|x| *x *= mu);
                0.5 * mu * n2
            })
        }
        _ => {
            let mut m = *offset;
            pointwise(buf, base, points, |f| {
                m.as_mut_slice().copy_from_slice(f);
                let (s, w) = model.stress_and_energy(&m);
                f.copy_from_slice(s.as_slice());
                w
            })
        }
    };
    if !energy.is_finite() || buf.iter().any(|b| b.iter().any(|x| !x.is_finite())) {
        let j = (0..points).find(|&j| buf.iter().any(|b| !b[j].is_finite())).unwrap_or(0);
        let x = tr.grid.point(j);
        return Err(Error::NonFinite {
            quantity: "stress",
            sample: format!("x = ({:.6}, {:.6}), energy = {energy}", x[0], x[1]),
        });
    }
    for c in 0..comps {
        tr.forward_scalar(&buf[c], out.component_mut(c));
    }
    Ok(energy * tr.grid.cell_volume())
}

/// Applies `kernel` to F = base + buf at every grid point, overwriting buf
/// with the returned stress entries; returns Σ W.
fn pointwise(buf: &mut [Vec<f64>], base: &[f64], points: usize, mut kernel: impl FnMut(&mut [f64]) -> f64) -> f64 {
    let comps = base.len();
    let mut f = [0.0f64; 9];
    let mut energy = 0.0;
    match comps {
        1 => {
            for x in buf[0][..points].iter_mut() {
                f[0] = base[0] + *x;
                energy += kernel(&mut f[..1]);
                *x = f[0];
            }
        }
        4 => {
            let [b0, b1, b2, b3] = buf else { unreachable!() };
            let (b0, b1, b2, b3) = (&mut b0[..points], &mut b1[..points], &mut b2[..points], &mut b3[..points]);
            for j in 0..points {
                f[0] = base[0] + b0[j];
                f[1] = base[1] + b1[j];
                f[2] = base[2] + b2[j];
                f[3] = base[3] + b3[j];
                energy += kernel(&mut f[..4]);
                b0[j] = f[0];
                b1[j] = f[1];
                b2[j] = f[2];
                b3[j] = f[3];
            }
        }
        _ => {
            for j in 0..points {
                for c in 0..comps {
                    f[c] = base[c] + buf[c][j];
                }
                energy += kernel(&mut f[..comps]);
                for c in 0..comps {
                    buf[c][j] = f[c];
                }
            }
        }
    }
    energy
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn random_field(dim: usize, n: usize, shape: Shape, seed: u64) -> SpectralField {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(dim, n, shape);
        for c in 0..f.components() {
            for idx in 0..f.mode_count() {
                let k = f.wavevector(idx);
                let v = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                f.set_mode(c, &k[..dim], v);
            }
        }
        f
    }

    #[test]
    fn round_trip_1d_and_2d() {
        for (dim, n, m) in [(1, 7, 15), (1, 8, 27), (2, 5, 11), (2, 6, 20)] {
            let grid = Grid::new(dim, n, m).unwrap();
            let mut tr = SpectralTransform::new(grid);
            let f = random_field(dim, n, Shape::Vector, 3);
            let phys = tr.to_physical(&f);
            let back = tr.from_physical(Shape::Vector, &phys).unwrap();
            assert!(f.max_abs_diff(&back) < 1e-13, "d={dim} N={n} M={m}");
        }
    }

    #[test]
    fn inverse_matches_direct_sum() {
        let grid = Grid::new(2, 2, 7).unwrap();
        let mut tr = SpectralTransform::new(grid);
        let f = random_field(2, 2, Shape::Scalar, 9);
        let phys = tr.to_physical(&f);
        for j in 0..grid.point_count() {
            let x = grid.point(j);
            let mut s = C64::default();
            for idx in 0..grid.mode_count() {
                let k = grid.wavevector(idx);
                let arg = k[0] as f64 * x[0] + k[1] as f64 * x[1];
                s += f.component(0)[idx] * C64::new(arg.cos(), arg.sin());
            }
            assert!(s.im.abs() < 1e-12);
            assert!((s.re - phys[0][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_of_trig_polynomial() {
        let grid = Grid::new(2, 3, 9).unwrap();
        let mut tr = SpectralTransform::new(grid);
        let f = tr.project(Shape::Scalar, |x| vec![2.0 * (x[0] - 2.0 * x[1]).sin() + 0.5]).unwrap();
        assert!((f.get(0, &[1, -2]) - C64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((f.get(0, &[0, 0]).re - 0.5).abs() < 1e-14);
        let g = tr.project(Shape::Scalar, |x| vec![(3.0 * x[0]).cos() * (2.0 * PI).cos()]).unwrap();
        assert!((g.get(0, &[3, 0]).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cubic_stress_is_unaliased_on_padded_grid() {
        // S(F) = |F|² F for a single-mode F has modes up to 3N; with the padded
        // grid the retained coefficients match a far finer grid.
        let n = 4;
        let model = StoredEnergyModel::quartic(2, 0.0);
        let f = random_field(2, n, Shape::Matrix, 1).scaled(0.1);
        let mut coarse = SpectralTransform::new(Grid::dealiased(2, n, Some(3)).unwrap());
        let mut fine = SpectralTransform::new(Grid::new(2, n, 64).unwrap());
        let id = Mat::identity(2);
        let (a, ea) = nonlinear_stress(&mut coarse, &model, &id, &f).unwrap();
        let (b, eb) = nonlinear_stress(&mut fine, &model, &id, &f).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-13);
        assert!((ea - eb).abs() < 1e-11 * eb.abs().max(1.0));
    }
}
