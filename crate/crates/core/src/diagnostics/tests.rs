use super::*;
use crate::solver::{run, SolverConfig};
use crate::spectral::C64;
use std::f64::consts::PI;

fn ctx(model: StoredEnergyModel, n: usize, eps: f64) -> DiagnosticContext {
    let dim = model.dim();
    DiagnosticContext::new(Grid::dealiased(dim, n, model.stress_degree()).unwrap(), model, eps)
}

fn wavy_state(n: usize, amp: f64) -> KvState {
    let mut s = KvState::zeros(2, n, Mat::identity(2));
    s.v.set_mode(0, &[1, 0], C64::new(0.2 * amp, 0.1 * amp));
    s.v.set_mode(1, &[1, -2], C64::new(-0.1 * amp, 0.05 * amp));
    s.y.set_mode(0, &[0, 1], C64::new(0.1 * amp, -0.05 * amp));
    s.y.set_mode(1, &[2, 1], C64::new(0.02 * amp, 0.03 * amp));
    s
}

#[test]
fn zero_state_has_zero_energy() {
    let mut c = ctx(StoredEnergyModel::quadratic(2, 1.0), 4, 1.0);
    let s = KvState::zeros(2, 4, Mat::zeros(2));
    assert_eq!(c.energy(&s).unwrap(), 0.0);
    assert_eq!(c.dissipation(&s), 0.0);
}

#[test]
fn sine_velocity_energy_is_pi_squared() {
    let mut c = ctx(StoredEnergyModel::quadratic(2, 1.0), 4, 1.0);
    let mut s = KvState::zeros(2, 4, Mat::zeros(2));
    // sin x₁ = (e^{ix₁} − e^{−ix₁}) / 2i
    s.v.set_mode(0, &[1, 0], C64::new(0.0, -0.5));
    let e = c.energy(&s).unwrap();
    assert!((e - PI * PI).abs() < 1e-13, "{e}");
    // ε∫|∇v|² = ∫cos² = 2π²
    assert!((c.dissipation(&s) - 2.0 * PI * PI).abs() < 1e-12);
}

#[test]
fn constant_deformation() {
    let cm = Mat::from_row_major(2, &[1.2, -0.3, 0.5, 0.8]);
    for model in [StoredEnergyModel::quadratic(2, 1.5), StoredEnergyModel::quartic(2, 1.0)] {
        let w = model.energy(&cm);
        let mut c = ctx(model, 4, 1.0);
        let s = KvState::zeros(2, 4, cm);
        let vol = 4.0 * PI * PI;
        assert!((c.energy(&s).unwrap() - w * vol).abs() < 1e-12);
        let (g, q) = c.modulated(&s);
        assert!((g - 2.0 * w * vol).abs() < 1e-12);
        assert_eq!(q, 0.0);
    }
}

#[test]
fn linear_model_dissipation_is_full_gradient() {
    let mut c = ctx(StoredEnergyModel::quadratic(2, 1.0), 6, 1.0);
    let s = wavy_state(6, 1.0);
    let (_, q) = c.modulated(&s);
    let expected = h1f(&s.y) + grad_sq(&s.v);
    assert!((q - expected).abs() < 1e-12 * expected, "{q} vs {expected}");
}

#[test]
fn quartic_at_origin_dissipates_only_velocity() {
    let mut c = ctx(StoredEnergyModel::quartic(2, 1.0), 6, 1.0);
    let mut s = wavy_state(6, 1.0);
    s.fbar = Mat::zeros(2);
    let tiny = 1e-4;
    for z in s.y.coeffs_mut() {
        *z *= tiny;
    }
    let (_, q) = c.modulated(&s);
    let gv = grad_sq(&s.v);
    // D²W̃(F) = O(|F|²) so the Hessian term is O(tiny⁴)
    assert!((q - gv).abs() < 1e-12 * gv, "{q} vs {gv}");
}

#[test]
fn modified_hessian_is_nonnegative_for_builtins() {
    let s2 = wavy_state(6, 3.0);
    for model in [StoredEnergyModel::quadratic(2, 1.0), StoredEnergyModel::quartic(2, 1.0)] {
        let mut c = ctx(model, 6, 1.0);
        assert!(c.min_modified_hessian_eigenvalue(&s2) >= -1e-10);
        let (_, q) = c.modulated(&s2);
        assert!(q >= grad_sq(&s2.v));
    }
    let mut s1 = KvState::zeros(1, 6, Mat::scalar(0.2));
    s1.y.set_mode(0, &[2], C64::new(0.3, 0.1));
    s1.v.set_mode(0, &[1], C64::new(0.1, 0.0));
    let mut c = ctx(StoredEnergyModel::DoubleWell, 6, 1.0);
    assert!(c.min_modified_hessian_eigenvalue(&s1) >= -1e-10);
}

#[test]
fn zero_trajectory_residuals_vanish() {
    let cfg = SolverConfig::new(StoredEnergyModel::quartic(2, 1.0), 4, 0.01, 0.1).with_record_every(1);
    let out = run(&cfg, KvState::zeros(2, 4, Mat::zeros(2)), None).unwrap();
    let s = &out.series;
    assert_eq!(s.rows.len(), 11);
    assert_eq!(s.energy_balance_residual(), 0.0);
    assert_eq!(s.modulated_inequality_residual(), 0.0);
    assert!(s.gronwall_h1_bound().pass);
}

#[test]
fn stationary_state_satisfies_gronwall() {
    let cfg = SolverConfig::new(StoredEnergyModel::quartic(2, 1.0), 4, 0.01, 0.1);
    let out = run(&cfg, KvState::zeros(2, 4, Mat::identity(2)), None).unwrap();
    let report = out.series.gronwall_h1_bound();
    assert!(report.pass);
    assert!(report.worst_ratio < 1e-25, "{}", report.worst_ratio);
}

#[test]
fn short_quartic_run_balances() {
    let cfg = SolverConfig::new(StoredEnergyModel::quartic(2, 1.0), 8, 0.005, 0.2).with_record_every(1);
    let out = run(&cfg, wavy_state(8, 1.0), None).unwrap();
    let s = &out.series;
    let e0 = s.rows[0].energy.abs();
    assert!(s.energy_balance_residual() < 1e-8 * e0, "{:e}", s.energy_balance_residual());
    assert!(s.modulated_identity_residual() < 1e-8 * s.rows[0].modulated, "{:e}", s.modulated_identity_residual());
    assert!(s.max_energy_increase() <= 1e-10 * e0);
    let report = s.gronwall_h1_bound();
    assert!(report.pass && report.worst_ratio < 1.0);
    assert!(s.is_finite());
}

#[test]
fn linear_mode_stays_below_majorant() {
    // v_n, y_n follow a damped oscillator; H1F(t) = 2π·2n⁴|y_n(t)|²
    let (kappa, eps, n) = (2.0, 0.5, 2i64);
    let mut init = KvState::zeros(1, 3, Mat::scalar(0.0));
    init.y.set_mode(0, &[n], C64::new(0.1, 0.0));
    let cfg = SolverConfig::new(StoredEnergyModel::quadratic(1, kappa), 3, 0.01, 2.0)
        .with_epsilon(eps)
        .with_record_every(1);
    let out = run(&cfg, init, None).unwrap();
    let report = out.series.gronwall_h1_bound();
    assert!(report.pass);
    assert!(report.worst_ratio < 1.0, "{}", report.worst_ratio);
}

#[test]
fn trapezoid_balance_converges_at_second_order() {
    let mut init = KvState::zeros(1, 3, Mat::scalar(0.0));
    init.v.set_mode(0, &[1], C64::new(0.0, 0.3));
    let residual = |dt: f64| {
        let mut cfg = SolverConfig::new(StoredEnergyModel::quadratic(1, 1.0), 3, dt, 1.0).with_record_every(1);
        cfg.quadrature = QuadratureRule::Trapezoid;
        run(&cfg, init.clone(), None).unwrap().series.energy_balance_residual()
    };
    let ratio = residual(0.02) / residual(0.01);
    assert!(ratio > 3.8 && ratio < 4.2, "{ratio}");
}

#[test]
fn csv_layout() {
    let mut series = DiagnosticSeries::new(1.0, 0.0, 0.0, 1.0);
    series.push(DiagnosticRow { t: 0.0, energy: 1.5, ..Default::default() });
    series.push(DiagnosticRow { t: 0.1, energy: -2.0e-17, ..Default::default() });
    let csv = series.to_csv();
    let lines: Vec<&str> = csv.split('\n').collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines[3], "");
    assert!(!csv.contains('\r'));
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields.len(), 14);
    assert_eq!(fields[0], "1.0000000000000001e-1");
    assert_eq!(fields[1].parse::<f64>().unwrap(), -2.0e-17);
}

#[test]
#[should_panic(expected = "record times must increase")]
fn series_rejects_repeated_time() {
    let mut series = DiagnosticSeries::new(1.0, 0.0, 0.0, 1.0);
    series.push(DiagnosticRow::default());
    series.push(DiagnosticRow::default());
}
