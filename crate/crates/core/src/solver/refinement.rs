//! Galerkin refinement: the same data and time grid run at several mode
//! budgets, compared in L∞(0,T; L²) on the deformation gradient.

use super::{run, KvState, SolverConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyReport {
    pub ladder: Vec<usize>,
    /// gaps[i] = sup over record times of ‖F^{ladder[i+1]} − F^{ladder[i]}‖_{L²}.
    pub gaps: Vec<f64>,
    pub record_times: Vec<f64>,
}

impl CauchyReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] < w[0])
    }

    pub fn final_gap(&self) -> f64 {
        self.gaps.last().copied().unwrap_or(0.0)
    }

    /// log2 of successive gap ratios.
    pub fn rates(&self) -> Vec<f64> {
        self.gaps.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }
}

/// L² distance between the deformation gradients of two states, the coarser
/// one zero-padded. Mean deformations enter through the zero mode.
pub fn deformation_distance(a: &KvState, b: &KvState) -> f64 {
    let n = a.n().max(b.n());
    let (a, b) = (a.resized(n), b.resized(n));
    let k2 = |k: [i64; 2]| (k[0] * k[0] + k[1] * k[1]) as f64;
    let vol = (2.0 * std::f64::consts::PI).powi(a.dim() as i32);
    let mean = (a.fbar - b.fbar).norm_sq();
    (vol * (a.y.sub(&b.y).weighted_energy(k2) + mean)).sqrt()
}

/// Runs `config` at every N of the strictly increasing `ladder` from the
/// projection of `initial`, then measures consecutive gaps. Every run shares
/// dt and record times, so the gaps isolate the spatial truncation.
pub fn galerkin_cauchy(config: &SolverConfig, initial: &KvState, ladder: &[usize]) -> Result<CauchyReport> {
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(format!("ladder must be strictly increasing with two or more entries, got {ladder:?}")));
    }
    let mut runs = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let mut cfg = config.clone();
        cfg.n = n;
        cfg.keep_snapshots = true;
        runs.push(run(&cfg, initial.resized(n), None)?.snapshots);
    }
    let record_times = runs[0].iter().map(|s| s.t).collect();
    let gaps = runs
        .windows(2)
        .map(|w| w[0].iter().zip(&w[1]).map(|(c, f)| deformation_distance(c, f)).fold(0.0, f64::max))
        .collect();
    Ok(CauchyReport { ladder: ladder.to_vec(), gaps, record_times })
}
