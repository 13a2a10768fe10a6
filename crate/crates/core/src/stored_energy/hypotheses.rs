//! Sampling-based checks of the hypotheses on W. They quantify over all
//! matrices, so every check here runs on a finite sample set: a seeded
//! default or one supplied by the caller.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::StoredEnergyModel;
use crate::error::{Error, Result};
use crate::matrix::Mat;

/// Pass threshold for eigenvalues of D²W + K·Id.
pub const SEMICONVEXITY_TOL: f64 = 1e-10;

pub fn random_matrices(dim: usize, count: usize, range: f64, seed: u64) -> Vec<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = Mat::zeros(dim);
            for x in m.as_mut_slice() {
                *x = rng.random_range(-range..range);
            }
            m
        })
        .collect()
}

pub fn random_pairs(dim: usize, count: usize, range: f64, seed: u64) -> Vec<(Mat, Mat)> {
    let a = random_matrices(dim, count, range, seed);
    let b = random_matrices(dim, count, range, seed.wrapping_add(0x9e37_79b9));
    a.into_iter().zip(b).collect()
}

/// Matrices with log-uniformly distributed norms in `[r_min, r_max]`.
pub fn shell_samples(dim: usize, count: usize, r_min: f64, r_max: f64, seed: u64) -> Vec<Mat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = Mat::zeros(dim);
            for x in m.as_mut_slice() {
                *x = rng.random_range(-1.0..1.0);
            }
            let n = m.norm().max(1e-300);
            let r = (r_min.ln() + rng.random_range(0.0..1.0) * (r_max / r_min).ln()).exp();
            m.scale(r / n)
        })
        .collect()
}

fn sample_label(f: &Mat) -> String {
    format!("{:?}", f.as_slice())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiconvexityReport {
    pub min_eigenvalue: f64,
    pub worst_sample: usize,
    pub pass: bool,
}

/// Minimum eigenvalue of D²W(F) + K·Id over the samples.
pub fn check_semiconvexity(model: &StoredEnergyModel, samples: &[Mat]) -> Result<SemiconvexityReport> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("semiconvexity check needs at least one sample".into()));
    }
    let k = model.semiconvexity();
    let mut report = SemiconvexityReport { min_eigenvalue: f64::INFINITY, worst_sample: 0, pass: false };
    for (i, f) in samples.iter().enumerate() {
        let h = model.hessian(f);
        if !h.is_finite() {
            return Err(Error::NonFinite { quantity: "D2W", sample: sample_label(f) });
        }
        let ev = h.shifted(k).min_eigenvalue();
        if ev < report.min_eigenvalue {
            report.min_eigenvalue = ev;
            report.worst_sample = i;
        }
    }
    report.pass = report.min_eigenvalue >= -SEMICONVEXITY_TOL;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityVariant {
    /// (S(F₁)−S(F₂), F₁−F₂) ≥ −K|F₁−F₂|².
    AB,
    /// (S(F₁)−S(F₂), F₁−F₂) ≥ (C(|F₁|^{p−2}+|F₂|^{p−2}) − K)|F₁−F₂|².
    ABPrime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// Most negative slack (left side minus right side) over the pairs.
    pub worst_violation: f64,
    /// Most negative slack relative to the size of the compared terms.
    pub worst_relative: f64,
    pub pass: bool,
}

pub fn check_ab_monotonicity(
    model: &StoredEnergyModel,
    pairs: &[(Mat, Mat)],
    variant: MonotonicityVariant,
) -> Result<MonotonicityReport> {
    let k = model.semiconvexity();
    let p = model.growth_exponent();
    let c = match variant {
        MonotonicityVariant::AB => 0.0,
        MonotonicityVariant::ABPrime => model.ab_prime_constant().ok_or_else(|| {
            Error::InvalidParameter(format!("model `{}` does not claim the strengthened condition", model.id()))
        })?,
    };
    let mut worst = f64::INFINITY;
    let mut worst_rel = f64::INFINITY;
    for (f1, f2) in pairs {
        let (s1, s2) = (model.stress(f1), model.stress(f2));
        if !s1.is_finite() || !s2.is_finite() {
            let bad = if s1.is_finite() { f2 } else { f1 };
            return Err(Error::NonFinite { quantity: "S", sample: sample_label(bad) });
        }
        let df = *f1 - *f2;
        let lhs = (s1 - s2).dot(&df);
        let weight = c * (f1.norm().powf(p - 2.0) + f2.norm().powf(p - 2.0)) - k;
        let rhs = weight * df.norm_sq();
        let slack = lhs - rhs;
        worst = worst.min(slack);
        worst_rel = worst_rel.min(slack / (1.0 + lhs.abs() + rhs.abs()));
    }
    if pairs.is_empty() {
        worst = 0.0;
        worst_rel = 0.0;
    }
    Ok(MonotonicityReport { worst_violation: worst, worst_relative: worst_rel, pass: worst_rel >= -1e-12 })
}

/// Fitted constants of the growth bounds
/// `c|F|ᵖ − C₁ ≤ W(F) ≤ C_W(1+|F|ᵖ)` and `|S(F)| ≤ C_S(1+|F|^{p−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub lower_c: f64,
    pub lower_offset: f64,
    /// Constant to add to W so that `c(|F|ᵖ − 1) ≤ W` holds literally.
    pub energy_shift: f64,
    pub upper_energy: f64,
    pub upper_stress: f64,
    pub pass: bool,
}

/// Fits growth constants on shells with |F| up to `r_max`.
pub fn check_growth(model: &StoredEnergyModel, samples: &[Mat]) -> Result<GrowthReport> {
    let p = model.growth_exponent();
    let r_far = samples.iter().map(|f| f.norm()).fold(0.0, f64::max) / 10.0;
    let mut asymptotic = f64::INFINITY;
    for f in samples.iter().filter(|f| f.norm() >= r_far.max(1.0)) {
        let w = model.energy(f);
        if !w.is_finite() {
            return Err(Error::NonFinite { quantity: "W", sample: sample_label(f) });
        }
        asymptotic = asymptotic.min(w / f.norm().powf(p));
    }
    let lower_c = 0.5 * asymptotic;
    let mut lower_offset = f64::NEG_INFINITY;
    let mut upper_energy = 0.0f64;
    let mut upper_stress = 0.0f64;
    for f in samples {
        let (w, s, r) = (model.energy(f), model.stress(f), f.norm());
        if !s.is_finite() {
            return Err(Error::NonFinite { quantity: "S", sample: sample_label(f) });
        }
        lower_offset = lower_offset.max(lower_c * r.powf(p) - w);
        upper_energy = upper_energy.max(w.abs() / (1.0 + r.powf(p)));
        upper_stress = upper_stress.max(s.norm() / (1.0 + r.powf(p - 1.0)));
    }
    let pass = lower_c > 0.0 && lower_offset.is_finite() && upper_energy.is_finite() && upper_stress.is_finite();
    Ok(GrowthReport {
        lower_c,
        lower_offset,
        energy_shift: (lower_offset - lower_c).max(0.0),
        upper_energy,
        upper_stress,
        pass,
    })
}

/// Largest relative error between central differences of W and the entries of S.
pub fn check_gradient_consistency(model: &StoredEnergyModel, samples: &[Mat], step: f64) -> f64 {
    let mut worst = 0.0f64;
    for f in samples {
        let s = model.stress(f);
        for r in 0..f.as_slice().len() {
            let mut plus = *f;
            let mut minus = *f;
            plus.as_mut_slice()[r] += step;
            minus.as_mut_slice()[r] -= step;
            let fd = (model.energy(&plus) - model.energy(&minus)) / (2.0 * step);
            let exact = s.as_slice()[r];
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
    }
    worst
}

/// Largest relative error between central differences of S and D²W.
pub fn check_hessian_consistency(model: &StoredEnergyModel, samples: &[Mat], step: f64) -> f64 {
    let mut worst = 0.0f64;
    for f in samples {
        let h = model.hessian(f);
        let n = f.as_slice().len();
        for c in 0..n {
            let mut plus = *f;
            let mut minus = *f;
            plus.as_mut_slice()[c] += step;
            minus.as_mut_slice()[c] -= step;
            let (sp, sm) = (model.stress(&plus), model.stress(&minus));
            for r in 0..n {
                let fd = (sp.as_slice()[r] - sm.as_slice()[r]) / (2.0 * step);
                let exact = h.get(r, c);
                worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
            }
        }
    }
    worst
}

pub fn check_hessian_symmetry(model: &StoredEnergyModel, samples: &[Mat]) -> f64 {
    samples.iter().map(|f| model.hessian(f).max_asymmetry()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stored_energy::{builtin_models, PiecewiseStress1D};

    fn grid_1d(lo: f64, hi: f64, n: usize) -> Vec<Mat> {
        (0..n).map(|j| Mat::scalar(lo + (hi - lo) * j as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn quadratic_hessian_is_identity() {
        let m = StoredEnergyModel::quadratic(2, 1.0);
        let r = check_semiconvexity(&m, &random_matrices(2, 20, 3.0, 1)).unwrap();
        assert!((r.min_eigenvalue - 1.0).abs() < 1e-14);
        assert!(r.pass);
    }

    #[test]
    fn double_well_semiconvexity() {
        // grid contains u = 0 where 3u² − 1 + K is smallest
        let samples = grid_1d(-2.0, 2.0, 401);
        let r = check_semiconvexity(&StoredEnergyModel::DoubleWell, &samples).unwrap();
        assert!(r.min_eigenvalue.abs() < 1e-14);
        assert!(r.pass);
    }

    #[test]
    fn insufficient_shift_fails() {
        // σ = u³ − u modelled as a quartic in 1-D with α = 1; ask for K = 0.5
        let samples = grid_1d(-2.0, 2.0, 401);
        let h_min = samples
            .iter()
            .map(|f| StoredEnergyModel::DoubleWell.hessian(f).shifted(0.5).min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        assert!((h_min + 0.5).abs() < 1e-14);
        let quartic_half = StoredEnergyModel::quartic(1, 1.0);
        // quartic in 1-D: D²W = 3u² − α, same Hessian as the double well
        let r = check_semiconvexity(&quartic_half, &samples).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(check_semiconvexity(&StoredEnergyModel::DoubleWell, &[]).is_err());
    }

    #[test]
    fn non_finite_sample_named() {
        let err = check_semiconvexity(&StoredEnergyModel::DoubleWell, &[Mat::scalar(f64::INFINITY)]).unwrap_err();
        assert!(err.to_string().contains("inf"));
    }

    #[test]
    fn monotonicity_of_builtins() {
        let m = StoredEnergyModel::quadratic(2, 1.0);
        let r = check_ab_monotonicity(&m, &random_pairs(2, 200, 3.0, 5), MonotonicityVariant::AB).unwrap();
        assert!(r.pass && r.worst_violation > 0.0);

        let pairs: Vec<_> = random_pairs(1, 2000, 3.0, 9);
        let r = check_ab_monotonicity(&StoredEnergyModel::DoubleWell, &pairs, MonotonicityVariant::AB).unwrap();
        assert!(r.pass);

        let law = StoredEnergyModel::piecewise(PiecewiseStress1D::reference());
        let pairs: Vec<_> = random_pairs(1, 2000, 8.0, 11);
        assert!(check_ab_monotonicity(&law, &pairs, MonotonicityVariant::AB).unwrap().pass);
        assert!(check_ab_monotonicity(&law, &pairs, MonotonicityVariant::ABPrime).is_err());
    }

    #[test]
    fn builtins_have_consistent_derivatives() {
        for m in builtin_models() {
            let samples = random_matrices(m.dim(), 100, 3.0, 42);
            assert!(check_gradient_consistency(&m, &samples, 1e-5) < 1e-6, "{}", m.id());
            assert!(check_hessian_consistency(&m, &samples, 1e-5) < 1e-5, "{}", m.id());
            assert_eq!(check_hessian_symmetry(&m, &samples), 0.0);
        }
    }

    #[test]
    fn growth_constants_fit_for_builtins() {
        for m in builtin_models() {
            let samples = shell_samples(m.dim(), 2000, 1e-2, 1e3, 3);
            let r = check_growth(&m, &samples).unwrap();
            assert!(r.pass, "{}: {r:?}", m.id());
            assert!(r.upper_energy < 10.0 && r.upper_stress < 10.0, "{}: {r:?}", m.id());
        }
    }
}
