use kv_core::initial_data::{smooth_1d, smooth_2d};
use kv_core::matrix::Mat;
use kv_core::solver::{galerkin_cauchy, run, KvState, Scheme, SolverConfig};
use kv_core::stored_energy::StoredEnergyModel;

#[test]
fn zero_data_has_zero_balance_residual() {
    let cfg = SolverConfig::new(StoredEnergyModel::quartic(2, 1.0), 8, 0.01, 0.2).with_record_every(1);
    let out = run(&cfg, KvState::zeros(2, 8, Mat::zeros(2)), None).unwrap();
    assert!(out.series.rows.iter().all(|r| r.balance_residual == 0.0 && r.energy == 0.0));
}

#[test]
fn energy_never_increases_beyond_the_residual() {
    for scheme in [Scheme::IfRk4, Scheme::ImexCnab2] {
        let cfg = SolverConfig::new(StoredEnergyModel::quartic(2, 1.0), 16, 0.005, 0.2)
            .with_scheme(scheme)
            .with_record_every(1);
        let out = run(&cfg, smooth_2d(16, 1.0).unwrap(), None).unwrap();
        let s = &out.series;
        assert!(s.max_energy_increase() <= s.energy_balance_residual() + 1e-12, "{scheme}");
        assert!(s.energy_balance_residual() < 1e-4 * s.rows[0].energy, "{scheme}");
    }
}

#[test]
fn one_dimensional_models_run_and_stay_finite() {
    for model in [StoredEnergyModel::DoubleWell, StoredEnergyModel::quadratic(1, 2.0)] {
        let cfg = SolverConfig::new(model, 16, 0.01, 0.5);
        let out = run(&cfg, smooth_1d(16, 1.0, 1.0).unwrap(), None).unwrap();
        assert!(out.series.is_finite() && out.final_state.is_finite());
        assert_eq!(out.steps, 50);
    }
}

#[test]
fn galerkin_gaps_shrink_for_smooth_data() {
    let cfg = SolverConfig::new(StoredEnergyModel::quartic(2, 1.0), 16, 0.02, 0.2);
    let report = galerkin_cauchy(&cfg, &smooth_2d(16, 1.0).unwrap(), &[4, 8, 16]).unwrap();
    assert_eq!(report.gaps.len(), 2);
    assert!(report.strictly_decreasing(), "{:?}", report.gaps);
}
