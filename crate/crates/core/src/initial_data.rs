//! Named smooth initial data used by the experiments.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::solver::KvState;

/// Band-limited 2-D data with modes |k_i| ≤ 3: velocity of size ~`amplitude`
/// and a deformation potential whose gradient is of size ~0.6·`amplitude`,
/// around F̄ = I. Representable for every N ≥ 3.
pub fn smooth_2d(n: usize, amplitude: f64) -> Result<KvState> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("smooth_2d needs N >= 3, got {n}")));
    }
    let a = amplitude;
    let c = |re: f64, im: f64| Complex64::new(re * a, im * a);
    let mut s = KvState::zeros(2, n, Mat::identity(2));
    // velocity
    s.v.set_mode(0, &[0, 1], c(0.0, -0.15));
    s.v.set_mode(0, &[1, 1], c(0.05, 0.0));
    s.v.set_mode(0, &[2, -1], c(0.02, 0.03));
    s.v.set_mode(1, &[2, 0], c(0.1, 0.0));
    s.v.set_mode(1, &[1, -3], c(0.0, 0.04));
    s.v.set_mode(1, &[0, 1], c(-0.03, 0.02));
    // deformation potential
    s.y.set_mode(0, &[1, 2], c(0.0, -0.05));
    s.y.set_mode(0, &[0, 3], c(0.015, 0.0));
    s.y.set_mode(0, &[1, 0], c(0.03, -0.02));
    s.y.set_mode(1, &[2, -1], c(0.04, 0.0));
    s.y.set_mode(1, &[1, 0], c(0.0, -0.02));
    s.y.set_mode(1, &[1, 1], c(-0.01, 0.015));
    Ok(s)
}

/// 1-D data with modes |k| ≤ 3 around F̄ = `mean`.
pub fn smooth_1d(n: usize, amplitude: f64, mean: f64) -> Result<KvState> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("smooth_1d needs N >= 3, got {n}")));
    }
    let a = amplitude;
    let mut s = KvState::zeros(1, n, Mat::scalar(mean));
    s.v.set_mode(0, &[1], Complex64::new(0.0, -0.2 * a));
    s.v.set_mode(0, &[2], Complex64::new(0.05 * a, 0.02 * a));
    s.y.set_mode(0, &[1], Complex64::new(0.08 * a, 0.0));
    s.y.set_mode(0, &[3], Complex64::new(0.0, 0.01 * a));
    Ok(s)
}

/// Looks up a profile by name: `smooth_2d` or `smooth_1d`.
pub fn by_name(name: &str, dim: usize, n: usize, amplitude: f64, mean: f64) -> Result<KvState> {
    match (name, dim) {
        ("smooth_2d", 2) => smooth_2d(n, amplitude),
        ("smooth_1d", 1) => smooth_1d(n, amplitude, mean),
        ("smooth_2d" | "smooth_1d", _) => {
            Err(Error::InvalidParameter(format!("profile `{name}` does not match dimension {dim}")))
        }
        _ => Err(Error::InvalidParameter(format!("unknown initial profile `{name}`"))),
    }
}
