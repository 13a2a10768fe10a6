//! Lᵖ and Sobolev norms of spectral fields. Pointwise values use the
//! Euclidean (vector) or Frobenius (matrix) norm.

use std::f64::consts::PI;

use super::{SpectralField, SpectralTransform};

/// ‖f‖_{Hˢ} = (|𝕋ᵈ| Σ_k (1+|k|²)ˢ |c_k|²)^{1/2}; s = 0 gives L² by Parseval.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let vol = (2.0 * PI).powi(f.dim() as i32);
    let sum = f.weighted_energy(|k| (1.0 + (k[0] * k[0] + k[1] * k[1]) as f64).powf(s));
    (vol * sum).sqrt()
}

/// Lᵖ norm by grid quadrature on the transform grid; `p = ∞` gives the max.
pub fn lp_norm(tr: &mut SpectralTransform, f: &SpectralField, p: f64) -> f64 {
    let comps = tr.to_physical(f);
    let points = tr.grid().point_count();
    let pointwise = (0..points).map(|j| comps.iter().map(|c| c[j] * c[j]).sum::<f64>().sqrt());
    if p.is_infinite() {
        return pointwise.fold(0.0, f64::max);
    }
    let sum: f64 = pointwise.map(|v| v.powf(p)).sum();
    (sum * tr.grid().cell_volume()).powf(1.0 / p)
}

/// The norms tracked along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl Norms {
    pub fn of(f: &SpectralField) -> Norms {
        Norms {
            l2: sobolev_norm(f, 0.0),
            h1: sobolev_norm(f, 1.0),
            h2: sobolev_norm(f, 2.0),
            h3: sobolev_norm(f, 3.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, Shape};

    #[test]
    fn parseval_matches_quadrature() {
        let grid = Grid::new(2, 6, 27).unwrap();
        let mut tr = SpectralTransform::new(grid);
        let f = tr
            .project(Shape::Vector, |x| vec![(x[0] - x[1]).sin() + 0.3, (2.0 * x[1]).cos() * x[0].sin()])
            .unwrap();
        let l2_spec = sobolev_norm(&f, 0.0);
        let l2_grid = lp_norm(&mut tr, &f, 2.0);
        assert!((l2_spec - l2_grid).abs() < 1e-12 * l2_spec);
        // ‖sin(x₁ − x₂) + 0.3‖² + ‖cos 2x₂ sin x₁‖² = (2π)²(½ + 0.09 + ¼)
        let exact = ((2.0 * PI).powi(2) * (0.5 + 0.09 + 0.25)).sqrt();
        assert!((l2_spec - exact).abs() < 1e-12);
    }

    #[test]
    fn sobolev_weights_single_mode() {
        let mut f = SpectralField::zeros(1, 4, Shape::Scalar);
        f.set_mode(0, &[3], num_complex::Complex64::new(0.5, 0.0));
        // cos 3x: ‖·‖²_{Hˢ} = 2π · ½ · 10ˢ
        let n = Norms::of(&f);
        assert!((n.h2.powi(2) - PI * 100.0).abs() < 1e-10);
        assert!((n.l2.powi(2) - PI).abs() < 1e-12);
    }
}
