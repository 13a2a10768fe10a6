//! Pipelines built on exact solutions: single-mode decay of the linear model
//! and the stationary two-phase family of the 1-D system.

use std::sync::Arc;

use kv_core::oracles::{
    common_stress_spread, verify_classical_residual, verify_linear_decay, verify_rankine_hugoniot,
    weak_limits as compute_weak_limits, OscillationFamily, INTERFACE_GAP,
};
use kv_core::polynomial::Polynomial;
use kv_core::stored_energy::{Interpolation, PiecewiseStress1D};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Outcome;
use crate::config::{ExperimentSpec, Params};
use crate::plot::{LineChart, Series};
use crate::report::{Cell, Check, Table};

/// Vieta identities are algebraic; only rounding separates them from zero.
const VIETA_TOLERANCE: f64 = 1e-13;
/// Points for the classical residual and the common-stress spread.
const FIELD_POINTS: usize = 1000;

pub fn dispersion(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let mut out = Outcome::default();
    let mut table = Table::new(
        "dispersion.csv",
        &[
            "kappa", "n", "roots", "lambda_plus", "lambda_minus", "imag", "measured_rate", "rel_error", "fit_residual",
            "vieta_sum", "vieta_product",
        ],
    );
    let mut chart = LineChart::new("decay-rate error", "n", "relative error").log_y();
    for &kappa in &p.kappa {
        let mut pts = Vec::new();
        for n in 1..=p.n_max {
            let decay = verify_linear_decay(n, kappa, p.dt, p.t_end, p.record_every, p.scheme)?;
            let r = decay.roots;
            let (sum, product) = r.vieta_residuals();
            let kind = if r.complex {
                "complex"
            } else if r.double {
                "double"
            } else {
                "real"
            };
            table.push(vec![
                Cell::F(kappa),
                Cell::I(n as i64),
                Cell::S(kind.into()),
                Cell::F(r.lambda_plus),
                Cell::F(r.lambda_minus),
                Cell::F(r.imag),
                Cell::F(decay.measured_rate),
                Cell::F(decay.rel_error),
                Cell::F(decay.fit_residual),
                Cell::F(sum),
                Cell::F(product),
            ]);
            let tag = format!("k{kappa}_n{n}");
            out.check(Check::below(format!("decay_rate_{tag}"), decay.rel_error, p.tolerance));
            out.check(Check::at_most(format!("vieta_{tag}"), sum.max(product), VIETA_TOLERANCE));
            pts.push((n as f64, decay.rel_error));
        }
        chart = chart.with(Series::new(format!("kappa = {kappa}"), pts));
    }
    out.tables.push(table);
    if spec.plot {
        out.plot("dispersion.svg", chart);
    }
    Ok(out)
}

/// Two-phase law with σ(u) = u on the right branch.
fn law(p: &Params) -> anyhow::Result<Arc<PiecewiseStress1D>> {
    let right = Polynomial::linear(0.0, 1.0);
    Ok(Arc::new(PiecewiseStress1D::build(p.a, p.b, p.theta, &right, Interpolation::CubicHermite)?))
}

/// Uniform samples of (t, x) ∈ [1, 2] × [0, 1] away from the interfaces.
fn field_points(family: &OscillationFamily, seed: u64, count: usize) -> Vec<(f64, f64)> {
    let interfaces = family.interfaces();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let (t, x) = (rng.random_range(1.0..=2.0), rng.random_range(0.0..1.0));
        if interfaces.iter().all(|s| (x - s).abs() > 1e3 * INTERFACE_GAP) {
            pts.push((t, x));
        }
    }
    pts
}

pub fn oscillation(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let law = law(p)?;
    let family = OscillationFamily::new(law.clone(), p.n)?;
    let mut out = Outcome::default();

    let identity = law.identity_residual(p.samples);
    let times: Vec<f64> = (0..p.samples).map(|i| 1.0 + i as f64 / (p.samples - 1) as f64).collect();
    let rh = verify_rankine_hugoniot(&family, &times)?;
    let points = field_points(&family, spec.seed, FIELD_POINTS);
    let classical = verify_classical_residual(&family, &points)?;
    let xs: Vec<f64> = points.iter().map(|&(_, x)| x).collect();
    let spread = [1.0, 1.5, 2.0].iter().map(|&t| common_stress_spread(&family, t, &xs)).fold(0.0, f64::max);

    let mut table = Table::new("oscillation.csv", &["check", "residual", "samples"]);
    for (name, value, count) in [
        ("common_value_identity", identity, p.samples),
        ("rankine_hugoniot_stress", rh.stress_jump, rh.samples),
        ("rankine_hugoniot_velocity", rh.velocity_jump, family.interfaces().len()),
        ("classical_residual", classical, points.len()),
        ("common_stress_spread", spread, 3 * xs.len()),
    ] {
        table.push(vec![Cell::S(name.into()), Cell::F(value), Cell::I(count as i64)]);
        out.check(Check::below(name, value, p.tolerance));
    }
    out.tables.push(table);

    let mut profile = Table::new("profile.csv", &["x", "v_n", "strain", "stress_t1"]);
    let grid = 400;
    for j in 0..=grid {
        let x = j as f64 / grid as f64;
        let strain = family.v_n_x(x);
        profile.push(vec![Cell::F(x), Cell::F(family.v_n(x)), Cell::F(strain), Cell::F(law.sigma(strain))]);
    }
    out.tables.push(profile);
    if spec.plot {
        let pts = (0..=grid).map(|j| j as f64 / grid as f64).map(|x| (x, family.v_n(x))).collect();
        out.plot("velocity.svg", LineChart::new("velocity of member n", "x", "v_n").with(Series::new("v_n", pts)));
    }
    Ok(out)
}

pub fn weak_limits(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let law = law(p)?;
    let w = compute_weak_limits(law.clone(), p.time, &p.n_ladder)?;
    let mut out = Outcome::default();
    let expected_gap = w.stress_expected - law.sigma(w.u_expected);

    let mut table = Table::new("weak_limits.csv", &["n", "u_moment", "stress_moment", "v_error"]);
    for (i, &n) in w.ladder.iter().enumerate() {
        table.push(vec![
            Cell::I(n as i64),
            Cell::F(w.u_moments[i]),
            Cell::F(w.stress_moments[i]),
            Cell::F(w.v_errors[i]),
        ]);
    }
    out.tables.push(table);
    let mut limits = Table::new("limits.csv", &["quantity", "extrapolated", "expected"]);
    for (name, got, want) in [
        ("u_limit", w.u_limit, w.u_expected),
        ("stress_limit", w.stress_limit, w.stress_expected),
        ("gap", w.gap(), expected_gap),
    ] {
        limits.push(vec![Cell::S(name.into()), Cell::F(got), Cell::F(want)]);
        out.check(Check::below(format!("{name}_error"), (got - want).abs(), p.tolerance));
    }
    out.tables.push(limits);
    out.metric("gap", w.gap());
    out.metric("stress_of_limit", w.stress_of_limit);
    out.metric("v_order", w.v_order());
    if spec.plot {
        let pts = w.ladder.iter().map(|&n| n as f64).zip(w.v_errors.iter().copied()).collect();
        out.plot(
            "velocity_error.svg",
            LineChart::new("strong convergence of v_n", "n", "L2 error").log_x().log_y().with(Series::new("v", pts)),
        );
    }
    Ok(out)
}
