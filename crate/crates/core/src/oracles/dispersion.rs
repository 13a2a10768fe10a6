//! Single-mode solutions of the linear 1-D model `y_tt = κ y_xx + y_txx`.
//!
//! `y = e^{inx} e^{λt}` solves it iff `λ² + λn² + κn² = 0`. For n² ≥ 4κ both
//! roots are real and negative and the slow one behaves like
//! `−κ − κ²/n² − 2κ³/n⁴ + …` for large n; for n² < 4κ they are complex
//! with real part `−n²/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::solver::{run, KvState, Scheme, SolverConfig};
use crate::stored_energy::StoredEnergyModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRoots {
    pub n: u32,
    pub kappa: f64,
    /// Slow root (real part when complex).
    pub lambda_plus: f64,
    /// Fast root (real part when complex).
    pub lambda_minus: f64,
    /// |Im λ|; zero for real roots.
    pub imag: f64,
    pub complex: bool,
    /// Discriminant n⁴ − 4κn² vanishes.
    pub double: bool,
    /// Two-term large-n expansion −κ − κ²/n²; the remainder is O(n⁻⁴).
    pub asymptotic: f64,
}

impl DispersionRoots {
    pub fn plus(&self) -> Complex64 {
        Complex64::new(self.lambda_plus, self.imag)
    }

    pub fn minus(&self) -> Complex64 {
        Complex64::new(self.lambda_minus, -self.imag)
    }

    /// (|λ₊ + λ₋ + n²|, |λ₊λ₋ − κn²|), both relative to n².
    pub fn vieta_residuals(&self) -> (f64, f64) {
        let n2 = (self.n as f64).powi(2);
        let (p, m) = (self.plus(), self.minus());
        ((p + m + n2).norm() / n2, (p * m - self.kappa * n2).norm() / (self.kappa * n2))
    }
}

/// Roots of λ² + n²λ + κn² = 0. Real roots avoid cancellation by taking the
/// large one first and the slow one from the product.
pub fn dispersion_roots(n: u32, kappa: f64) -> Result<DispersionRoots> {
    if n == 0 || !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("need n >= 1 and κ > 0, got n = {n}, κ = {kappa}")));
    }
    let n2 = (n as f64).powi(2);
    let disc = n2 * n2 - 4.0 * kappa * n2;
    let asymptotic = -kappa - kappa * kappa / n2;
    let r = if disc >= 0.0 {
        let fast = -0.5 * (n2 + disc.sqrt());
        DispersionRoots {
            n,
            kappa,
            lambda_plus: kappa * n2 / fast,
            lambda_minus: fast,
            imag: 0.0,
            complex: false,
            double: disc == 0.0,
            asymptotic,
        }
    } else {
        DispersionRoots {
            n,
            kappa,
            lambda_plus: -0.5 * n2,
            lambda_minus: -0.5 * n2,
            imag: 0.5 * (-disc).sqrt(),
            complex: true,
            double: false,
            asymptotic,
        }
    };
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayFit {
    /// ln|v_n| on data along the slow eigenvector.
    SlowEigenvector,
    /// ln|y_n/t| for the Jordan solution y_n = t e^{λt}.
    JordanEnvelope,
    /// ln|v_n − λ₋y_n|, whose modulus decays exactly like e^{Re λ₊ t}.
    ComplexEnvelope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearDecay {
    pub roots: DispersionRoots,
    pub fit: DecayFit,
    pub measured_rate: f64,
    /// Re λ₊.
    pub reference: f64,
    pub rel_error: f64,
    /// Largest deviation of the log series from the fitted line.
    pub fit_residual: f64,
    pub times: Vec<f64>,
    pub log_amplitude: Vec<f64>,
}

/// Fits beyond this log-linear residual are rejected for real simple roots.
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Runs the solver with W = κ|F|²/2 (ε = 1) on one Fourier mode and measures
/// its decay rate. Records every `record_every` steps enter the fit.
pub fn verify_linear_decay(
    n: u32,
    kappa: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
    scheme: Scheme,
) -> Result<LinearDecay> {
    let roots = dispersion_roots(n, kappa)?;
    let modes = n as usize;
    let model = StoredEnergyModel::quadratic(1, kappa);
    let cfg = SolverConfig::new(model, modes, dt, t_end)
        .with_scheme(scheme)
        .with_record_every(record_every)
        .with_snapshots();
    let k = [n as i64];
    let mut init = KvState::zeros(1, modes, Mat::scalar(0.0));
    let fit = if roots.complex {
        init.y.set_mode(0, &k, Complex64::new(0.1, 0.0));
        DecayFit::ComplexEnvelope
    } else if roots.double {
        init.v.set_mode(0, &k, Complex64::new(0.1, 0.0));
        DecayFit::JordanEnvelope
    } else {
        // slow eigenvector: v = λ₊ y
        init.y.set_mode(0, &k, Complex64::new(0.1, 0.0));
        init.v.set_mode(0, &k, Complex64::new(0.1 * roots.lambda_plus, 0.0));
        DecayFit::SlowEigenvector
    };
    let out = run(&cfg, init, None)?;
    let mut times = Vec::new();
    let mut logs = Vec::new();
    for s in &out.snapshots {
        let (v, y) = (s.v.get(0, &k), s.y.get(0, &k));
        let amp = match fit {
            DecayFit::SlowEigenvector => v.norm(),
            DecayFit::JordanEnvelope if s.t > 0.0 => (y / s.t).norm(),
            DecayFit::JordanEnvelope => continue,
            DecayFit::ComplexEnvelope => (v - roots.minus() * y).norm(),
        };
        times.push(s.t);
        logs.push(amp.ln());
    }
    let (slope, intercept) = least_squares_line(&times, &logs)?;
    let fit_residual =
        times.iter().zip(&logs).map(|(t, l)| (l - (intercept + slope * t)).abs()).fold(0.0, f64::max);
    if fit == DecayFit::SlowEigenvector && fit_residual > FIT_TOLERANCE {
        return Err(Error::Rejected(format!(
            "log-linear fit residual {fit_residual:e} exceeds {FIT_TOLERANCE:e}; data mixes both eigenvectors"
        )));
    }
    let reference = roots.lambda_plus;
    Ok(LinearDecay {
        roots,
        fit,
        measured_rate: slope,
        reference,
        rel_error: ((slope - reference) / reference).abs(),
        fit_residual,
        times,
        log_amplitude: logs,
    })
}

fn least_squares_line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let m = x.len() as f64;
    if x.len() < 2 {
        return Err(Error::Rejected("need at least two samples for a rate fit".into()));
    }
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_root_at_unit_modulus() {
        let r = dispersion_roots(2, 1.0).unwrap();
        assert!(r.double && !r.complex);
        assert_eq!(r.lambda_plus, -2.0);
        assert_eq!(r.lambda_minus, -2.0);
    }

    #[test]
    fn simple_real_roots() {
        let r = dispersion_roots(3, 1.0).unwrap();
        assert!((r.lambda_plus + 1.145898033750315).abs() < 1e-12);
        assert!((r.lambda_minus + 7.854101966249685).abs() < 1e-12);
        assert!((r.lambda_plus + r.lambda_minus + 9.0).abs() < 1e-13);
        assert!((r.lambda_plus * r.lambda_minus - 9.0).abs() < 1e-12);
        assert!((r.asymptotic + 1.0 + 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn complex_roots_have_half_square_real_part() {
        let r = dispersion_roots(1, 1.0).unwrap();
        assert!(r.complex);
        assert_eq!(r.lambda_plus, -0.5);
        assert!((r.imag - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn vieta_over_sweep() {
        for kappa in [0.25, 1.0, 4.0] {
            for n in 1..=64 {
                let (s, p) = dispersion_roots(n, kappa).unwrap().vieta_residuals();
                assert!(s < 1e-13 && p < 1e-13, "n={n} κ={kappa}: {s:e} {p:e}");
            }
        }
    }

    #[test]
    fn slow_root_approaches_asymptotic_form() {
        let gap = |n| {
            let r = dispersion_roots(n, 1.0).unwrap();
            (r.lambda_plus - r.asymptotic).abs()
        };
        // remainder is O(n⁻⁴)
        let ratio = gap(16) / gap(32);
        assert!(ratio > 15.0 && ratio < 17.0, "{ratio}");
        // a coefficient 2 on the κ²/n² term would leave an O(n⁻²) gap
        let doubled = |n: u32| {
            let r = dispersion_roots(n, 1.0).unwrap();
            (r.lambda_plus - (-1.0 - 2.0 / (n as f64).powi(2))).abs()
        };
        let ratio2 = doubled(16) / doubled(32);
        assert!(ratio2 > 3.9 && ratio2 < 4.1, "{ratio2}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(dispersion_roots(0, 1.0).is_err());
        assert!(dispersion_roots(2, 0.0).is_err());
    }

    #[test]
    fn measured_decay_matches_roots() {
        let simple = verify_linear_decay(3, 1.0, 1e-3, 0.5, 10, Scheme::IfRk4).unwrap();
        assert_eq!(simple.fit, DecayFit::SlowEigenvector);
        assert!(simple.rel_error < 1e-8, "{:e}", simple.rel_error);
        let jordan = verify_linear_decay(2, 1.0, 1e-3, 0.5, 10, Scheme::IfRk4).unwrap();
        assert_eq!(jordan.fit, DecayFit::JordanEnvelope);
        assert!(jordan.rel_error < 1e-8, "{:e}", jordan.rel_error);
        let complex = verify_linear_decay(1, 1.0, 1e-3, 0.5, 10, Scheme::IfRk4).unwrap();
        assert_eq!(complex.fit, DecayFit::ComplexEnvelope);
        assert!((complex.measured_rate + 0.5).abs() < 1e-8, "{}", complex.measured_rate);
    }
}
