//! Stored-energy models W(F) with stress S = DW and Hessian D²W, plus
//! sampling-based checks of the structural hypotheses (growth, semiconvexity,
//! monotonicity at infinity).

mod hypotheses;
mod piecewise;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use hypotheses::{
    check_ab_monotonicity, check_gradient_consistency, check_growth, check_hessian_consistency,
    check_hessian_symmetry, check_semiconvexity, random_matrices, random_pairs, shell_samples, GrowthReport,
    MonotonicityReport, MonotonicityVariant, SemiconvexityReport, SEMICONVEXITY_TOL,
};
pub use piecewise::{Interpolation, PiecewiseStress1D, Segment, IDENTITY_GRID};

use crate::error::{Error, Result};
use crate::matrix::{Hessian, Mat};
use crate::polynomial::Polynomial;

/// Catalog of stored energies. All evaluations are pure.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredEnergyModel {
    /// W = μ/2 |F|².
    Quadratic { dim: usize, mu: f64 },
    /// W = ¼|F|⁴ − ½α|F|².
    Quartic { dim: usize, alpha: f64 },
    /// One-dimensional W = u⁴/4 − u²/2, σ = u³ − u.
    DoubleWell,
    /// One-dimensional law with two branches sharing a common value.
    Piecewise(Arc<PiecewiseStress1D>),
}

impl StoredEnergyModel {
    pub fn quadratic(dim: usize, mu: f64) -> Self {
        StoredEnergyModel::Quadratic { dim, mu }
    }

    pub fn quartic(dim: usize, alpha: f64) -> Self {
        StoredEnergyModel::Quartic { dim, alpha }
    }

    pub fn piecewise(law: PiecewiseStress1D) -> Self {
        StoredEnergyModel::Piecewise(Arc::new(law))
    }

    /// Builds a model from its identifier and a parameter map.
    ///
    /// Recognized identifiers and parameters:
    /// `quadratic` (dim, mu), `quartic` (dim, alpha), `double_well`,
    /// `piecewise` (a, b, theta, r0..r3: coefficients of the right branch).
    pub fn from_id(id: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |k: &str, default: f64| params.get(k).copied().unwrap_or(default);
        let allowed: &[&str] = match id {
            "quadratic" => &["dim", "mu"],
            "quartic" => &["dim", "alpha"],
            "double_well" => &["dim"],
            "piecewise" => &["dim", "a", "b", "theta", "r0", "r1", "r2", "r3"],
            other => return Err(Error::InvalidParameter(format!("unknown model id `{other}`"))),
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter(format!("model `{id}` has no parameter `{k}`")));
        }
        let dim = get("dim", if matches!(id, "quadratic" | "quartic") { 2.0 } else { 1.0 });
        if dim.fract() != 0.0 || !(1.0..=3.0).contains(&dim) {
            return Err(Error::InvalidParameter(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        let dim = dim as usize;
        let model = match id {
            "quadratic" => {
                let mu = get("mu", 1.0);
                if mu < 0.0 {
                    return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
                }
                Self::quadratic(dim, mu)
            }
            "quartic" => Self::quartic(dim, get("alpha", 1.0)),
            "double_well" | "piecewise" if dim != 1 => {
                return Err(Error::InvalidParameter(format!("model `{id}` is one-dimensional")))
            }
            "double_well" => StoredEnergyModel::DoubleWell,
            _ => {
                let right = Polynomial::new(vec![get("r0", 0.0), get("r1", 1.0), get("r2", 0.0), get("r3", 0.0)]);
                Self::piecewise(PiecewiseStress1D::build(
                    get("a", 1.0),
                    get("b", 3.0),
                    get("theta", 0.5),
                    &right,
                    Interpolation::CubicHermite,
                )?)
            }
        };
        Ok(model)
    }

    pub fn id(&self) -> &'static str {
        match self {
            StoredEnergyModel::Quadratic { .. } => "quadratic",
            StoredEnergyModel::Quartic { .. } => "quartic",
            StoredEnergyModel::DoubleWell => "double_well",
            StoredEnergyModel::Piecewise(_) => "piecewise",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            StoredEnergyModel::Quadratic { dim, .. } | StoredEnergyModel::Quartic { dim, .. } => *dim,
            StoredEnergyModel::DoubleWell | StoredEnergyModel::Piecewise(_) => 1,
        }
    }

    #[inline]
    pub fn energy(&self, f: &Mat) -> f64 {
        match self {
            StoredEnergyModel::Quadratic { mu, .. } => 0.5 * mu * f.norm_sq(),
            StoredEnergyModel::Quartic { alpha, .. } => {
                let n2 = f.norm_sq();
                0.25 * n2 * n2 - 0.5 * alpha * n2
            }
            StoredEnergyModel::DoubleWell => {
                let u2 = f.get(0, 0) * f.get(0, 0);
                0.25 * u2 * u2 - 0.5 * u2
            }
            StoredEnergyModel::Piecewise(law) => law.energy(f.get(0, 0)),
        }
    }

    #[inline]
    pub fn stress(&self, f: &Mat) -> Mat {
        match self {
            StoredEnergyModel::Quadratic { mu, .. } => f.scale(*mu),
            StoredEnergyModel::Quartic { alpha, .. } => f.scale(f.norm_sq() - alpha),
            StoredEnergyModel::DoubleWell => {
                let u = f.get(0, 0);
                Mat::scalar(u * u * u - u)
            }
            StoredEnergyModel::Piecewise(law) => Mat::scalar(law.sigma(f.get(0, 0))),
        }
    }

    /// (S(F), W(F)) in one evaluation.
    #[inline]
    pub fn stress_and_energy(&self, f: &Mat) -> (Mat, f64) {
        match self {
            StoredEnergyModel::Quadratic { mu, .. } => (f.scale(*mu), 0.5 * mu * f.norm_sq()),
            StoredEnergyModel::Quartic { alpha, .. } => {
                let n2 = f.norm_sq();
                (f.scale(n2 - alpha), 0.25 * n2 * n2 - 0.5 * alpha * n2)
            }
            _ => (self.stress(f), self.energy(f)),
        }
    }

    /// D²W(F)[G, G].
    #[inline]
    pub fn hessian_form(&self, f: &Mat, g: &Mat) -> f64 {
        match self {
            StoredEnergyModel::Quadratic { mu, .. } => mu * g.norm_sq(),
            StoredEnergyModel::Quartic { alpha, .. } => {
                let fg = f.dot(g);
                (f.norm_sq() - alpha) * g.norm_sq() + 2.0 * fg * fg
            }
            _ => self.hessian(f).form(g, g),
        }
    }

    pub fn hessian(&self, f: &Mat) -> Hessian {
        match self {
            StoredEnergyModel::Quadratic { dim, mu } => Hessian::scaled_identity(*dim, *mu),
            StoredEnergyModel::Quartic { dim, alpha } => {
                let mut h = Hessian::scaled_identity(*dim, f.norm_sq() - alpha);
                let fs = f.as_slice();
                for r in 0..h.size() {
                    for c in 0..h.size() {
                        h.add_at(r, c, 2.0 * fs[r] * fs[c]);
                    }
                }
                h
            }
            StoredEnergyModel::DoubleWell => {
                let u = f.get(0, 0);
                Hessian::scaled_identity(1, 3.0 * u * u - 1.0)
            }
            StoredEnergyModel::Piecewise(law) => Hessian::scaled_identity(1, law.sigma_prime(f.get(0, 0))),
        }
    }

    /// Growth exponent p ≥ 2.
    pub fn growth_exponent(&self) -> f64 {
        match self {
            StoredEnergyModel::Quadratic { .. } | StoredEnergyModel::Piecewise(_) => 2.0,
            StoredEnergyModel::Quartic { .. } | StoredEnergyModel::DoubleWell => 4.0,
        }
    }

    /// Semiconvexity constant K: D²W + K·Id ≥ 0 everywhere.
    pub fn semiconvexity(&self) -> f64 {
        match self {
            StoredEnergyModel::Quadratic { .. } => 0.0,
            StoredEnergyModel::Quartic { alpha, .. } => alpha.max(0.0),
            StoredEnergyModel::DoubleWell => 1.0,
            StoredEnergyModel::Piecewise(law) => (-law.min_slope()).max(0.0),
        }
    }

    /// Constant C of the strengthened monotonicity condition, when the model
    /// satisfies it together with [`semiconvexity`](Self::semiconvexity).
    pub fn ab_prime_constant(&self) -> Option<f64> {
        match self {
            StoredEnergyModel::Quadratic { mu, .. } if *mu > 0.0 => Some(0.5 * mu),
            StoredEnergyModel::Quartic { .. } | StoredEnergyModel::DoubleWell => Some(0.5),
            _ => None,
        }
    }

    /// Polynomial degree of S, when S is a polynomial.
    pub fn stress_degree(&self) -> Option<usize> {
        match self {
            StoredEnergyModel::Quadratic { .. } => Some(1),
            StoredEnergyModel::Quartic { .. } | StoredEnergyModel::DoubleWell => Some(3),
            StoredEnergyModel::Piecewise(_) => None,
        }
    }

    /// inf W over all matrices.
    pub fn energy_lower_bound(&self) -> f64 {
        match self {
            StoredEnergyModel::Quadratic { .. } => 0.0,
            StoredEnergyModel::Quartic { alpha, .. } => {
                if *alpha > 0.0 {
                    -0.25 * alpha * alpha
                } else {
                    0.0
                }
            }
            StoredEnergyModel::DoubleWell => -0.25,
            StoredEnergyModel::Piecewise(law) => law.energy_lower_bound(),
        }
    }

    pub fn piecewise_law(&self) -> Option<&PiecewiseStress1D> {
        match self {
            StoredEnergyModel::Piecewise(law) => Some(law),
            _ => None,
        }
    }
}

/// The built-in catalog: one representative of every model family.
pub fn builtin_models() -> Vec<StoredEnergyModel> {
    vec![
        StoredEnergyModel::quadratic(2, 1.0),
        StoredEnergyModel::quartic(2, 1.0),
        StoredEnergyModel::DoubleWell,
        StoredEnergyModel::piecewise(PiecewiseStress1D::reference()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_stress_is_identity() {
        let m = StoredEnergyModel::quadratic(2, 1.0);
        let f = Mat::from_row_major(2, &[0.3, -1.0, 2.0, 0.1]);
        assert_eq!(m.stress(&f), f);
    }

    #[test]
    fn quartic_at_origin() {
        let m = StoredEnergyModel::quartic(2, 1.0);
        let z = Mat::zeros(2);
        assert_eq!(m.stress(&z), z);
        assert_eq!(m.hessian(&z), Hessian::scaled_identity(2, -1.0));
    }

    #[test]
    fn hessian_form_matches_full_hessian() {
        let f = Mat::from_row_major(2, &[0.3, -1.2, 0.7, 2.0]);
        let g = Mat::from_row_major(2, &[1.1, 0.4, -0.6, 0.25]);
        for m in [StoredEnergyModel::quadratic(2, 1.5), StoredEnergyModel::quartic(2, 0.7)] {
            let full = m.hessian(&f).form(&g, &g);
            assert!((m.hessian_form(&f, &g) - full).abs() < 1e-13 * full.abs().max(1.0));
        }
    }

    #[test]
    fn double_well_value() {
        assert_eq!(StoredEnergyModel::DoubleWell.energy(&Mat::scalar(1.0)), -0.25);
    }

    #[test]
    fn from_id_rejects_unknown() {
        let p = BTreeMap::new();
        assert!(StoredEnergyModel::from_id("ogden", &p).is_err());
        let mut q = BTreeMap::new();
        q.insert("beta".to_string(), 1.0);
        assert!(StoredEnergyModel::from_id("quartic", &q).is_err());
        let m = StoredEnergyModel::from_id("piecewise", &p).unwrap();
        assert_eq!(m.piecewise_law().unwrap(), &PiecewiseStress1D::reference());
    }

    #[test]
    fn piecewise_semiconvexity_constant_is_join_slope() {
        let m = StoredEnergyModel::piecewise(PiecewiseStress1D::reference());
        // Hermite join from (2, 8; slope 3) to (3, 3; slope 1):
        // σ′(2 + s) = 3 − 44 s + 42 s², minimum −179/21 at s = 11/21
        let k = m.semiconvexity();
        assert!((k - 179.0 / 21.0).abs() < 1e-12);
        let s: f64 = 11.0 / 21.0;
        let slope = 3.0 + 2.0 * (-3.0 * 8.0 - 6.0 + 9.0 - 1.0) * s + 3.0 * (16.0 + 3.0 - 6.0 + 1.0) * s * s;
        assert!((k + slope).abs() < 1e-12, "{k} vs {}", -slope);
    }
}
