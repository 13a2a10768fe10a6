//! One pipeline per experiment id. Pipelines compute; writing to disk is left
//! to [`crate::output`].

mod dd;
mod mms;
mod oracles;
mod simulation;

use anyhow::Context;
use kv_core::solver::SolverConfig;
use kv_core::stored_energy::StoredEnergyModel;

use crate::config::{ExperimentId, ExperimentSpec, Params};
use crate::plot::LineChart;
use crate::report::{Check, Table};

/// Everything an experiment produced, before it is written out.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub metrics: Vec<(String, f64)>,
    pub tables: Vec<Table>,
    pub plots: Vec<(String, LineChart)>,
}

impl Outcome {
    fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn metric(&mut self, key: impl Into<String>, value: f64) {
        self.metrics.push((key.into(), value));
    }

    fn plot(&mut self, file: &str, chart: LineChart) {
        self.plots.push((file.to_string(), chart));
    }
}

/// Runs the pipeline of `spec.id`. Solver failures carry the config echo.
pub fn execute(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    use ExperimentId::*;
    let result = match spec.id {
        EnergyIdentity => simulation::energy_ladder(spec, false),
        EnergyConservation => simulation::energy_ladder(spec, true),
        H1Propagation => simulation::h1_propagation(spec),
        ModulatedInequality => simulation::modulated_inequality(spec),
        GalerkinCauchy => simulation::galerkin(spec),
        RegularityMonitor => simulation::regularity(spec),
        Dispersion => oracles::dispersion(spec),
        OscillationOracle => oracles::oscillation(spec),
        WeakLimits => oracles::weak_limits(spec),
        DdEquivalence => dd::equivalence(spec),
        MmsConvergence => mms::convergence(spec),
    };
    result.with_context(|| format!("experiment `{}` failed; configuration:\n{}", spec.name, spec.echo()))
}

/// Solver configuration shared by the simulation pipelines.
fn solver_config(p: &Params, model: StoredEnergyModel, n: usize, dt: f64) -> anyhow::Result<SolverConfig> {
    let mut cfg = SolverConfig::new(model, n, dt, p.t_end)
        .with_scheme(p.scheme)
        .with_epsilon(p.epsilon)
        .with_record_every(record_every(p, dt)?);
    cfg.blowup_threshold = p.blowup_threshold;
    Ok(cfg)
}

/// Steps between records: `record_interval / dt` when an interval is set, so
/// that every rung of a dt ladder samples the same times.
fn record_every(p: &Params, dt: f64) -> anyhow::Result<usize> {
    let Some(interval) = p.record_interval else { return Ok(p.record_every) };
    let steps = (interval / dt).round();
    anyhow::ensure!(
        steps >= 1.0 && (steps * dt - interval).abs() <= 1e-9 * interval,
        "record_interval {interval} is not a multiple of dt {dt}"
    );
    Ok(steps as usize)
}

/// Observed orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}) between consecutive rungs.
pub fn observed_orders(h: &[f64], err: &[f64]) -> Vec<f64> {
    h.windows(2).zip(err.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect()
}

fn min_or_nan(xs: &[f64]) -> f64 {
    if xs.is_empty() || xs.iter().any(|x| x.is_nan()) {
        return f64::NAN;
    }
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Order column for a ladder table: blank on the first rung.
fn order_cells(orders: &[f64], i: usize) -> crate::report::Cell {
    match i.checked_sub(1) {
        Some(j) => crate::report::Cell::F(orders[j]),
        None => crate::report::Cell::None,
    }
}

/// Short label for a dt value in file names: `0.0025` becomes `2.5e-3`.
fn dt_label(dt: f64) -> String {
    format!("{dt:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_exact_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        for o in observed_orders(&h, &e) {
            assert!((o - 4.0).abs() < 1e-12);
        }
        assert!(min_or_nan(&[]).is_nan());
        assert!(min_or_nan(&[2.0, f64::NAN, 3.0]).is_nan());
        assert_eq!(min_or_nan(&[2.0, 1.5]), 1.5);
    }

    #[test]
    fn record_interval_divides_every_rung() {
        let mut p = ExperimentSpec::with_defaults("e", ExperimentId::EnergyIdentity).params;
        p.record_interval = Some(0.004);
        assert_eq!(record_every(&p, 0.002).unwrap(), 2);
        assert_eq!(record_every(&p, 0.0005).unwrap(), 8);
        assert!(record_every(&p, 0.003).is_err());
        p.record_interval = None;
        assert_eq!(record_every(&p, 0.003).unwrap(), 10);
    }
}
