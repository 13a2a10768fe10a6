//! Pipelines that drive the Kelvin-Voigt solver and judge its diagnostics.

use anyhow::{bail, ensure};
use kv_core::diagnostics::DiagnosticSeries;
use kv_core::initial_data;
use kv_core::solver::{galerkin_cauchy, run, KvState};
use kv_core::stored_energy::{check_semiconvexity, random_matrices, StoredEnergyModel, SEMICONVEXITY_TOL};

use super::{dt_label, min_or_nan, observed_orders, order_cells, solver_config, Outcome};
use crate::config::{ExperimentSpec, ModelChoice, Params};
use crate::plot::{LineChart, Series};
use crate::report::{Cell, Check, Table};

/// Semiconvexity sample: matrices with entries in [−range, range].
const SEMICONVEXITY_SAMPLES: usize = 2000;
const SEMICONVEXITY_RANGE: f64 = 3.0;

fn single_model(p: &Params) -> anyhow::Result<StoredEnergyModel> {
    match &p.model {
        ModelChoice::One(m) => Ok(m.clone()),
        ModelChoice::Builtin => bail!("this experiment needs a single model, not `builtin`"),
    }
}

/// The configured profile, or the smooth profile of the model's dimension
/// when iterating over the builtin catalog.
fn initial_state(p: &Params, model: &StoredEnergyModel, n: usize) -> anyhow::Result<KvState> {
    let dim = model.dim();
    let profile = match (&p.model, dim) {
        (ModelChoice::One(_), _) => p.profile.as_str(),
        (ModelChoice::Builtin, 1) => "smooth_1d",
        (ModelChoice::Builtin, _) => "smooth_2d",
    };
    Ok(initial_data::by_name(profile, dim, n, p.amplitude, p.mean)?)
}

fn run_series(p: &Params, model: &StoredEnergyModel, n: usize, dt: f64) -> anyhow::Result<DiagnosticSeries> {
    let cfg = solver_config(p, model.clone(), n, dt)?;
    let out = run(&cfg, initial_state(p, model, n)?, None)?;
    ensure!(out.series.is_finite(), "non-finite diagnostics at dt = {dt}");
    Ok(out.series)
}

fn column(series: &DiagnosticSeries, f: impl Fn(&kv_core::diagnostics::DiagnosticRow) -> f64) -> Vec<(f64, f64)> {
    series.rows.iter().map(|r| (r.t, f(r))).collect()
}

/// Energy balance along a dt ladder. The identity variant bounds the signed
/// residual and its order; the conservation variant asks only that the
/// two-sided residual shrink under refinement, reporting the orders.
pub fn energy_ladder(spec: &ExperimentSpec, conservation: bool) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let model = single_model(p)?;
    let mut out = Outcome::default();
    let mut balance = Vec::new();
    let mut inequality = Vec::new();
    let mut scale = 1.0;
    let mut finest = None;
    for &dt in &p.dt_ladder {
        let series = run_series(p, &model, p.n, dt)?;
        let e0 = series.rows[0].energy;
        // zero data has E(0) = 0 and an identically zero residual
        scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
        balance.push(series.energy_balance_residual());
        inequality.push(series.energy_inequality_residual());
        out.tables.push(Table::raw(&format!("series_dt{}.csv", dt_label(dt)), series.to_csv()));
        finest = Some(series);
    }
    let finest = finest.expect("ladder has at least two rungs");
    let orders = observed_orders(&p.dt_ladder, &balance);

    let mut table = Table::new(
        "energy_ladder.csv",
        &["dt", "E0", "balance_residual", "relative_balance", "inequality_residual", "order"],
    );
    for (i, &dt) in p.dt_ladder.iter().enumerate() {
        table.push(vec![
            Cell::F(dt),
            Cell::F(finest.rows[0].energy),
            Cell::F(balance[i]),
            Cell::F(balance[i] / scale),
            Cell::F(inequality[i]),
            order_cells(&orders, i),
        ]);
    }
    out.tables.push(table);
    for (i, o) in orders.iter().enumerate() {
        out.metric(format!("order_{}", i + 1), *o);
    }
    out.metric("E0", finest.rows[0].energy);

    let last = balance.len() - 1;
    if conservation {
        out.check(Check::holds("residual_decreasing", balance.windows(2).all(|w| w[1] < w[0])));
        out.check(Check::at_most("relative_residual_finest", balance[last] / scale, p.tolerance));
    } else {
        out.check(Check::at_most("relative_balance_finest", balance[last] / scale, p.tolerance));
        out.check(Check::at_most("relative_inequality_finest", inequality[last] / scale, p.tolerance));
        if balance.iter().all(|&b| b == 0.0) {
            out.check(Check::holds("balance_vanishes", true));
        } else {
            out.check(Check::at_least("balance_order_min", min_or_nan(&orders), p.min_order));
        }
    }

    if spec.plot {
        out.plot(
            "energy.svg",
            LineChart::new("energy at the finest dt", "t", "E").with(Series::new("E", column(&finest, |r| r.energy))),
        );
        out.plot(
            "residual_vs_dt.svg",
            LineChart::new("energy balance residual", "dt", "max residual")
                .log_x()
                .log_y()
                .with(Series::new(p.scheme.name(), p.dt_ladder.iter().copied().zip(balance.iter().copied()).collect())),
        );
    }
    Ok(out)
}

/// Grönwall majorant of ∫|∇F|² on every selected model, with a sampled
/// check of the semiconvexity constant the majorant uses.
pub fn h1_propagation(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let mut out = Outcome::default();
    let mut summary = Table::new("gronwall.csv", &["model", "G0", "constant", "worst_ratio", "min_shifted_eigenvalue"]);
    for model in p.model.models() {
        let id = model.id();
        let semi = check_semiconvexity(
            &model,
            &random_matrices(model.dim(), SEMICONVEXITY_SAMPLES, SEMICONVEXITY_RANGE, spec.seed),
        )?;
        let series = run_series(p, &model, p.n, p.dt)?;
        let report = series.gronwall_h1_bound();
        summary.push(vec![
            Cell::S(id.into()),
            Cell::F(series.rows[0].modulated),
            Cell::F(report.constant),
            Cell::F(report.worst_ratio),
            Cell::F(semi.min_eigenvalue),
        ]);
        let mut trace = Table::new(&format!("h1_{id}.csv"), &["t", "H1F", "bound"]);
        for (row, b) in series.rows.iter().zip(&report.bound) {
            trace.push(vec![Cell::F(row.t), Cell::F(row.h1f), Cell::F(*b)]);
        }
        out.tables.push(trace);
        out.check(Check::at_least(format!("semiconvexity_{id}"), semi.min_eigenvalue, -SEMICONVEXITY_TOL));
        out.check(Check::at_most(format!("gronwall_ratio_{id}"), report.worst_ratio, 1.0));
        out.metric(format!("gronwall_constant_{id}"), report.constant);
        if spec.plot {
            out.plot(
                &format!("h1_{id}.svg"),
                LineChart::new(&format!("H1 of F against its majorant ({id})"), "t", "integral of |grad F|^2")
                    .log_y()
                    .with(Series::new("H1F", column(&series, |r| r.h1f)))
                    .with(Series::new("bound", series.times().into_iter().zip(report.bound.iter().copied()).collect())),
            );
        }
    }
    out.tables.insert(0, summary);
    Ok(out)
}

/// Positive part of the modulated-energy residual, relative to |G(0)| + 1
/// because G(0) can be negative for data in the wells.
pub fn modulated_inequality(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let mut out = Outcome::default();
    let mut summary =
        Table::new("modulated.csv", &["model", "G0", "inequality_residual", "identity_residual", "normalized"]);
    let mut chart = LineChart::new("modulated energy", "t", "G");
    for model in p.model.models() {
        let id = model.id();
        let series = run_series(p, &model, p.n, p.dt)?;
        let g0 = series.rows[0].modulated;
        let normalized = series.modulated_inequality_residual() / (g0.abs() + 1.0);
        summary.push(vec![
            Cell::S(id.into()),
            Cell::F(g0),
            Cell::F(series.modulated_inequality_residual()),
            Cell::F(series.modulated_identity_residual()),
            Cell::F(normalized),
        ]);
        out.check(Check::at_most(format!("modulated_residual_{id}"), normalized, p.tolerance));
        chart = chart.with(Series::new(id, column(&series, |r| r.modulated)));
        out.tables.push(Table::raw(&format!("series_{id}.csv"), series.to_csv()));
    }
    out.tables.insert(0, summary);
    if spec.plot {
        out.plot("modulated.svg", chart);
    }
    Ok(out)
}

/// Consecutive Galerkin gaps in L∞(0,T; L²) of F along the N ladder.
pub fn galerkin(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let model = single_model(p)?;
    let top = *p.n_ladder.last().expect("validated ladder");
    let cfg = solver_config(p, model.clone(), top, p.dt)?;
    let report = galerkin_cauchy(&cfg, &initial_state(p, &model, top)?, &p.n_ladder)?;
    let mut out = Outcome::default();
    let mut table = Table::new("galerkin.csv", &["n_coarse", "n_fine", "gap", "rate"]);
    let rates = report.rates();
    for (i, gap) in report.gaps.iter().enumerate() {
        table.push(vec![
            Cell::I(p.n_ladder[i] as i64),
            Cell::I(p.n_ladder[i + 1] as i64),
            Cell::F(*gap),
            order_cells(&rates, i),
        ]);
    }
    out.tables.push(table);
    out.check(Check::holds("gaps_strictly_decreasing", report.strictly_decreasing()));
    out.check(Check::below("final_gap", report.final_gap(), p.tolerance));
    out.metric("record_count", report.record_times.len() as f64);
    if spec.plot {
        let pts = p.n_ladder.iter().map(|&n| n as f64).zip(report.gaps.iter().copied()).collect();
        out.plot(
            "galerkin.svg",
            LineChart::new("Galerkin gaps", "N (coarse)", "sup_t ||F^fine - F^coarse||").log_y().with(Series::new("gap", pts)),
        );
    }
    Ok(out)
}

/// H³ growth of (v, F); a blow-up guard trip is recorded as a failed check
/// rather than an error, since detecting it is the experiment's purpose.
pub fn regularity(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let model = single_model(p)?;
    let mut out = Outcome::default();
    let cfg = solver_config(p, model.clone(), p.n, p.dt)?;
    let series = match run(&cfg, initial_state(p, &model, p.n)?, None) {
        Ok(run) => run.series,
        Err(kv_core::Error::BlowUp { t, reason }) => {
            out.check(Check::holds("no_guard_trip", false));
            out.metric("guard_trip_time", t);
            let mut table = Table::new("guard.csv", &["t", "reason"]);
            table.push(vec![Cell::F(t), Cell::S(reason.replace(',', ";"))]);
            out.tables.push(table);
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };
    let growth = series.h3_growth();
    out.check(Check::holds("no_guard_trip", series.is_finite()));
    out.check(Check::at_most("h3_growth", growth, p.tolerance));
    out.metric("h3_growth", growth);
    out.tables.push(Table::raw("series.csv", series.to_csv()));
    if spec.plot {
        out.plot(
            "h3.svg",
            LineChart::new("H3 norms", "t", "norm")
                .log_y()
                .with(Series::new("v", column(&series, |r| r.hs_v[2])))
                .with(Series::new("F", column(&series, |r| r.hs_f[2]))),
        );
    }
    Ok(out)
}
