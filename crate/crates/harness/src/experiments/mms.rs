//! Convergence against a manufactured analytic solution.

use kv_core::manufactured::ManufacturedSolution;

use super::{min_or_nan, observed_orders, order_cells, Outcome};
use crate::config::{ExperimentSpec, ModelChoice};
use crate::plot::{LineChart, Series};
use crate::report::{Cell, Check, Table};

/// Spatial ladder at fixed `dt`, temporal ladder at fixed `n`. An empty
/// ladder skips its part.
pub fn convergence(spec: &ExperimentSpec) -> anyhow::Result<Outcome> {
    let p = &spec.params;
    let ModelChoice::One(model) = &p.model else { anyhow::bail!("mms_convergence needs a single model") };
    let ms = ManufacturedSolution::new(model.clone(), p.epsilon).with_sharpness(p.sharpness)?;
    let mut out = Outcome::default();
    out.metric("decay_ratio", ms.decay_ratio());

    if !p.n_ladder.is_empty() {
        let errors = p
            .n_ladder
            .iter()
            .map(|&n| ms.run_error(n, p.dt, p.t_end, p.scheme))
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = Table::new("spatial.csv", &["n", "error"]);
        for (n, e) in p.n_ladder.iter().zip(&errors) {
            table.push(vec![Cell::I(*n as i64), Cell::F(*e)]);
        }
        out.tables.push(table);
        out.check(Check::holds("spatial_error_decreasing", errors.windows(2).all(|w| w[1] < w[0])));
        out.check(Check::below("spatial_error_finest", *errors.last().unwrap(), p.tolerance));
        if spec.plot {
            let pts = p.n_ladder.iter().map(|&n| n as f64).zip(errors.iter().copied()).collect();
            out.plot(
                "spatial.svg",
                LineChart::new("spatial error", "N", "L2 error").log_y().with(Series::new(p.scheme.name(), pts)),
            );
        }
    }

    if !p.dt_ladder.is_empty() {
        let errors = p
            .dt_ladder
            .iter()
            .map(|&dt| ms.run_error(p.n, dt, p.t_end, p.scheme))
            .collect::<Result<Vec<_>, _>>()?;
        let orders = observed_orders(&p.dt_ladder, &errors);
        let mut table = Table::new("temporal.csv", &["dt", "error", "order"]);
        for (i, (dt, e)) in p.dt_ladder.iter().zip(&errors).enumerate() {
            table.push(vec![Cell::F(*dt), Cell::F(*e), order_cells(&orders, i)]);
        }
        out.tables.push(table);
        if errors.len() >= 2 {
            out.check(Check::at_least("temporal_order_min", min_or_nan(&orders), p.min_order));
        }
        if spec.plot {
            let pts = p.dt_ladder.iter().copied().zip(errors.iter().copied()).collect();
            out.plot(
                "temporal.svg",
                LineChart::new("temporal error", "dt", "L2 error").log_x().log_y().with(Series::new(p.scheme.name(), pts)),
            );
        }
    }
    Ok(out)
}
