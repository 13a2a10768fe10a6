//! Differential operators as Fourier multipliers. Exact on the retained modes.

use num_complex::Complex64;

use super::{Shape, SpectralField};
use crate::error::{Error, Result};

fn k_f64(k: [i64; 2], axis: usize) -> f64 {
    k[axis] as f64
}

/// Gradient, appending one index: scalar → vector, vector → matrix with
/// `(∇v)_{iα} = ∂_α v_i` stored at component `i·d + α`.
pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    let d = f.dim();
    let shape = match f.shape() {
        Shape::Scalar => Shape::Vector,
        Shape::Vector => Shape::Matrix,
        Shape::Matrix => return Err(Error::InvalidParameter("gradient of a matrix field".into())),
    };
    let mut out = SpectralField::zeros(d, f.n(), shape);
    for i in 0..f.components() {
        for a in 0..d {
            let src = f.component(i).to_vec();
            let dst = out.component_mut(i * d + a);
            for (idx, (o, c)) in dst.iter_mut().zip(&src).enumerate() {
                let k = super::wavevector(d, f.n(), idx);
                *o = c * Complex64::new(0.0, k_f64(k, a));
            }
        }
    }
    Ok(out)
}

/// Divergence over the last index: vector → scalar, matrix → vector with
/// `(div F)_i = Σ_α ∂_α F_{iα}`.
pub fn divergence(f: &SpectralField) -> Result<SpectralField> {
    let d = f.dim();
    let shape = match f.shape() {
        Shape::Vector => Shape::Scalar,
        Shape::Matrix => Shape::Vector,
        Shape::Scalar => return Err(Error::InvalidParameter("divergence of a scalar field".into())),
    };
    let mut out = SpectralField::zeros(d, f.n(), shape);
    let modes = f.mode_count();
    for i in 0..out.components() {
        for a in 0..d {
            let src = f.component(i * d + a).to_vec();
            let dst = out.component_mut(i);
            for idx in 0..modes {
                let k = super::wavevector(d, f.n(), idx);
                dst[idx] += src[idx] * Complex64::new(0.0, k_f64(k, a));
            }
        }
    }
    Ok(out)
}

/// Componentwise Laplacian, multiplier −|k|².
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    let (d, n) = (f.dim(), f.n());
    for c in 0..f.components() {
        for (idx, z) in out.component_mut(c).iter_mut().enumerate() {
            let k = super::wavevector(d, n, idx);
            *z *= -((k[0] * k[0] + k[1] * k[1]) as f64);
        }
    }
    out
}

/// Two-dimensional curl over the last index: vector → scalar `∂₁v₂ − ∂₂v₁`,
/// matrix → vector `(curl F)_i = ∂₁F_{i2} − ∂₂F_{i1}`. Vanishes on gradients.
pub fn curl(f: &SpectralField) -> Result<SpectralField> {
    if f.dim() != 2 {
        return Err(Error::InvalidParameter(format!("curl needs d = 2, got d = {}", f.dim())));
    }
    let shape = match f.shape() {
        Shape::Vector => Shape::Scalar,
        Shape::Matrix => Shape::Vector,
        Shape::Scalar => return Err(Error::InvalidParameter("curl of a scalar field".into())),
    };
    let mut out = SpectralField::zeros(2, f.n(), shape);
    for i in 0..out.components() {
        let (f1, f2) = (f.component(2 * i).to_vec(), f.component(2 * i + 1).to_vec());
        for (idx, o) in out.component_mut(i).iter_mut().enumerate() {
            let k = super::wavevector(2, f.n(), idx);
            *o = Complex64::new(0.0, 1.0) * (f2[idx] * k[0] as f64 - f1[idx] * k[1] as f64);
        }
    }
    Ok(out)
}
