//! Equivalence of the viscous-capillary system and its reduced form.

use kv_core::diffusion_dispersion::{equivalence_check, kappa_from, single_mode_discrepancy, RootChoice};
use kv_core::initial_data;

use super::{min_or_nan, observed_orders, order_cells, solver_config, Outcome};
use crate::config::{ExperimentSpec, ModelChoice};
use crate::plot::{LineChart, Series};
use crate::report::{Cell, Check, Table};

/// Side offset of the admissibility probe around A = ¼ at δ = ε².
const FRONTIER_OFFSET: f64 = 1e-9;
/// Relative residual of κ² − εκ + δA a computed root may leave.
const ROOT_TOLERANCE: f64 = 1e-14;
/// Single-mode closed-form comparison: W = u²/2, mode 3, dt 1e-3, T = 1.
const SINGLE_MODE: (f64, i64, f64, f64) = (1.0, 3, 1e-3, 1.0);

pub fn equivalence(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let dd = spec.dd_config()?;
    let ModelChoice::One(model) = &p.model else { anyhow::bail!("dd_equivalence needs a single model") };
    let mut out = Outcome::default();
    let eps = p.epsilon;

    let critical = kappa_from(eps, eps * eps, 0.25, RootChoice::Minus)?;
    out.check(Check::at_most("critical_kappa_error", (critical - eps / 2.0).abs(), 0.0));
    let inside = kappa_from(eps, eps * eps, 0.25 - FRONTIER_OFFSET, p.root_choice).is_ok();
    let outside = kappa_from(eps, eps * eps, 0.25 + FRONTIER_OFFSET, p.root_choice).is_err();
    out.check(Check::holds("frontier_inside_accepted", inside));
    out.check(Check::holds("frontier_outside_rejected", outside));
    out.check(Check::at_most("root_residual", dd.quadratic_residual(), ROOT_TOLERANCE));
    out.metric("kappa", dd.kappa);

    let initial = initial_data::by_name(&p.profile, model.dim(), p.n, p.amplitude, p.mean)?;
    let mut w_gaps = Vec::new();
    let mut f_gaps = Vec::new();
    for &dt in &p.dt_ladder {
        let base = solver_config(p, model.clone(), p.n, dt)?;
        let report = equivalence_check(&dd, &base, &initial)?;
        w_gaps.push(report.max_w_gap());
        f_gaps.push(report.max_f_gap());
    }
    let orders = observed_orders(&p.dt_ladder, &w_gaps);
    let mut table = Table::new("equivalence.csv", &["dt", "w_gap", "f_gap", "order"]);
    for (i, &dt) in p.dt_ladder.iter().enumerate() {
        table.push(vec![Cell::F(dt), Cell::F(w_gaps[i]), Cell::F(f_gaps[i]), order_cells(&orders, i)]);
    }
    out.tables.push(table);
    out.check(Check::at_least("w_gap_order_min", min_or_nan(&orders), p.min_order));
    out.check(Check::below("w_gap_finest", *w_gaps.last().expect("validated ladder"), p.tolerance));

    let (mu, mode, dt, t_end) = SINGLE_MODE;
    let single = single_mode_discrepancy(&dd, mu, mode, dt, t_end)?;
    out.check(Check::below("single_mode_discrepancy", single, p.tolerance));

    if spec.plot {
        let pts = p.dt_ladder.iter().copied().zip(w_gaps.iter().copied()).collect();
        out.plot(
            "w_gap_vs_dt.svg",
            LineChart::new("full against reduced system", "dt", "max ||w_full - w_reduced||")
                .log_x()
                .log_y()
                .with(Series::new(p.scheme.name(), pts)),
        );
    }
    Ok(out)
}
