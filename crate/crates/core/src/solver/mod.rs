//! Time integration of the Galerkin system for Kelvin-Voigt viscoelasticity.
//!
//! The state carries the velocity v, a zero-mean deformation potential y and
//! a constant mean deformation F̄; the deformation gradient is
//! F = F̄ + ∇y, so curl F = 0 holds identically. Per mode,
//!
//! ```text
//! dv_k/dt = i S_k·k − ε|k|² v_k + f_k,    dy_k/dt = v_k  (k ≠ 0),
//! ```
//!
//! where `S_k` are the coefficients of S(F) evaluated on the padded grid.

mod checkpoint;
mod integrator;
mod linear;
mod refinement;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint};
pub use integrator::{Integrator, StepInfo};
pub use linear::{Block, LinearPart};
pub use refinement::{deformation_distance, galerkin_cauchy, CauchyReport};

use std::path::PathBuf;
use std::str::FromStr;

use crate::diagnostics::{DiagnosticContext, DiagnosticSeries, QuadratureRule};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::spectral::{Grid, Shape, SpectralField};
use crate::stored_energy::StoredEnergyModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Lawson integrating-factor RK4: exact linear propagation, classical RK4
    /// on the rest.
    IfRk4,
    /// Crank–Nicolson on the linear block, Adams–Bashforth 2 on the stress.
    ImexCnab2,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::IfRk4 => "IF_RK4",
            Scheme::ImexCnab2 => "IMEX_CNAB2",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::IfRk4 => 4,
            Scheme::ImexCnab2 => 2,
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scheme> {
        match s {
            "IF_RK4" => Ok(Scheme::IfRk4),
            "IMEX_CNAB2" => Ok(Scheme::ImexCnab2),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme `{other}` (expected IF_RK4 or IMEX_CNAB2)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Analytic momentum source f(t, x).
pub trait Forcing: Send + Sync {
    /// Writes the d components of f(t, x) into `out`.
    fn sample(&self, t: f64, x: [f64; 2], out: &mut [f64]);
}

/// Solver state. In the reduced diffusion–dispersion system `v` holds the
/// transformed momentum w.
#[derive(Debug, Clone, PartialEq)]
pub struct KvState {
    pub t: f64,
    pub v: SpectralField,
    pub y: SpectralField,
    pub fbar: Mat,
}

impl KvState {
    pub fn zeros(dim: usize, n: usize, fbar: Mat) -> Self {
        KvState {
            t: 0.0,
            v: SpectralField::zeros(dim, n, Shape::Vector),
            y: SpectralField::zeros(dim, n, Shape::Vector),
            fbar,
        }
    }

    /// Assembles a state, dropping the mean of `y` (it does not enter F).
    pub fn new(t: f64, v: SpectralField, mut y: SpectralField, fbar: Mat) -> Result<Self> {
        let (d, n) = (v.dim(), v.n());
        if v.shape() != Shape::Vector || y.shape() != Shape::Vector || y.dim() != d || y.n() != n || fbar.dim() != d
        {
            return Err(Error::ShapeMismatch {
                expected: format!("vector fields and {d}x{d} mean on one mode budget"),
                got: format!(
                    "v: {} N={}, y: {} N={}, F̄: {}x{}",
                    v.shape().name(),
                    n,
                    y.shape().name(),
                    y.n(),
                    fbar.dim(),
                    fbar.dim()
                ),
            });
        }
        let z = y.zero_mode_index();
        for c in 0..d {
            y.component_mut(c)[z] = Default::default();
        }
        Ok(KvState { t, v, y, fbar })
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn n(&self) -> usize {
        self.v.n()
    }

    /// Fluctuation ∇y of the deformation gradient.
    pub fn deformation_fluctuation(&self) -> SpectralField {
        crate::spectral::gradient(&self.y).expect("vector potential")
    }

    /// Full F = F̄ + ∇y as a matrix field.
    pub fn deformation(&self) -> SpectralField {
        let mut f = self.deformation_fluctuation();
        let z = f.zero_mode_index();
        for (c, &value) in self.fbar.as_slice().iter().enumerate() {
            f.component_mut(c)[z] = value.into();
        }
        f
    }

    /// curl F from the potential representation: per mode the entries are
    /// −y_{i,k}(k₁k₂ − k₂k₁) with the integer products formed first, so the
    /// result is identically zero. Two-dimensional only.
    pub fn deformation_curl(&self) -> Result<SpectralField> {
        if self.dim() != 2 {
            return Err(Error::InvalidParameter("curl needs d = 2".into()));
        }
        let mut out = SpectralField::zeros(2, self.n(), Shape::Vector);
        for i in 0..2 {
            let src = self.y.component(i).to_vec();
            for (idx, o) in out.component_mut(i).iter_mut().enumerate() {
                let k = self.y.wavevector(idx);
                // ∂₂F_i1 and ∂₁F_i2 as integer multipliers of −y_i
                let (d2_f1, d1_f2) = (k[1] * k[0], k[0] * k[1]);
                *o = -src[idx] * ((d2_f1 - d1_f2) as f64);
            }
        }
        Ok(out)
    }

    /// Same state on mode budget `n` (truncated or zero-padded).
    pub fn resized(&self, n: usize) -> KvState {
        KvState { t: self.t, v: self.v.resized(n), y: self.y.resized(n), fbar: self.fbar }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.y.is_finite() && self.fbar.is_finite()
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub model: StoredEnergyModel,
    /// Steps between diagnostic records; the final time is always recorded.
    pub record_every: usize,
    /// Energy cap; `None` means 10³·|E(0)| + 1.
    pub blowup_threshold: Option<f64>,
    /// Grid points per axis; `None` selects the dealiased size.
    pub grid_points: Option<usize>,
    pub quadrature: QuadratureRule,
    /// Keep a copy of the state at every record.
    pub keep_snapshots: bool,
    pub checkpoint_every: Option<usize>,
    pub checkpoint_dir: Option<PathBuf>,
    pub linear: Option<LinearPart>,
}

impl SolverConfig {
    pub fn new(model: StoredEnergyModel, n: usize, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            n,
            dt,
            t_end,
            scheme: Scheme::IfRk4,
            epsilon: 1.0,
            model,
            record_every: 10,
            blowup_threshold: None,
            grid_points: None,
            quadrature: QuadratureRule::FourthOrder,
            keep_snapshots: false,
            checkpoint_every: None,
            checkpoint_dir: None,
            linear: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_snapshots(mut self) -> Self {
        self.keep_snapshots = true;
        self
    }

    pub fn with_grid_points(mut self, m: usize) -> Self {
        self.grid_points = Some(m);
        self
    }

    pub fn with_linear(mut self, linear: LinearPart) -> Self {
        self.linear = Some(linear);
        self
    }

    pub fn linear_part(&self) -> LinearPart {
        self.linear.unwrap_or(LinearPart::KelvinVoigt { epsilon: self.epsilon })
    }

    pub fn grid(&self) -> Result<Grid> {
        match self.grid_points {
            Some(m) => Grid::new(self.dim(), self.n, m),
            None => Grid::dealiased(self.dim(), self.n, self.model.stress_degree()),
        }
    }

    /// Number of steps from `t0` to `t_end`; the interval must be an integer
    /// multiple of dt up to rounding.
    pub fn steps_from(&self, t0: f64) -> Result<usize> {
        let span = self.t_end - t0;
        let steps = (span / self.dt).round();
        if (steps * self.dt - span).abs() > 1e-9 * span.abs().max(self.dt) {
            return Err(Error::InvalidParameter(format!(
                "t_end − t0 = {span} is not a multiple of dt = {}",
                self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if !(self.t_end > 0.0) {
            return bad(format!("t_end must be > t0 = 0, got {}", self.t_end));
        }
        if self.n == 0 {
            return bad("N must be >= 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be >= 1".into());
        }
        if self.checkpoint_every == Some(0) {
            return bad("checkpoint_every must be >= 1".into());
        }
        if self.checkpoint_every.is_some() != self.checkpoint_dir.is_some() {
            return bad("checkpoint_every and checkpoint_dir go together".into());
        }
        self.grid()?;
        Ok(())
    }

    /// `key = value` lines describing the configuration.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("model = {:?}\n", self.model));
        s.push_str(&format!("dim = {}\nN = {}\n", self.dim(), self.n));
        s.push_str(&format!("dt = {:e}\nt_end = {:e}\n", self.dt, self.t_end));
        s.push_str(&format!("scheme = {}\nepsilon = {:e}\n", self.scheme, self.epsilon));
        s.push_str(&format!("linear = {:?}\n", self.linear_part()));
        s.push_str(&format!("record_every = {}\n", self.record_every));
        if let Ok(g) = self.grid() {
            s.push_str(&format!("grid_points = {}\n", g.m()));
        }
        s
    }
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: KvState,
    pub series: DiagnosticSeries,
    /// States at the record times, when requested.
    pub snapshots: Vec<KvState>,
    pub steps: usize,
}

/// Integrates from `initial` to `config.t_end`.
pub fn run(config: &SolverConfig, initial: KvState, forcing: Option<&dyn Forcing>) -> Result<RunOutput> {
    config.validate()?;
    let integrator = Integrator::new(config, forcing)?;
    let initial = integrator.project(initial)?;
    drive(config, integrator, initial, 0, None)
}

/// Continues a run from a checkpoint written by an earlier call to [`run`].
pub fn resume(config: &SolverConfig, checkpoint: Checkpoint, forcing: Option<&dyn Forcing>) -> Result<RunOutput> {
    config.validate()?;
    let mut integrator = Integrator::new(config, forcing)?;
    integrator.restore_history(checkpoint.history, checkpoint.blowup_threshold)?;
    drive(config, integrator, checkpoint.state, checkpoint.step, Some(checkpoint.blowup_threshold))
}

fn drive(
    config: &SolverConfig,
    mut integrator: Integrator<'_>,
    mut state: KvState,
    start: usize,
    threshold: Option<f64>,
) -> Result<RunOutput> {
    let t0 = state.t - start as f64 * config.dt;
    let total = config.steps_from(t0)?;
    if start > total {
        return Err(Error::InvalidParameter(format!("checkpoint step {start} beyond final step {total}")));
    }
    let grid = config.grid()?;
    let mut diag = DiagnosticContext::new(grid, config.model.clone(), config.epsilon);
    let mut series = DiagnosticSeries::new(
        config.epsilon,
        config.model.semiconvexity(),
        config.model.energy_lower_bound(),
        grid.volume(),
    );
    let mut snapshots = Vec::new();
    let threshold = match threshold.or(config.blowup_threshold) {
        Some(th) => th,
        None => 1e3 * diag.energy(&state)?.abs() + 1.0,
    };
    integrator.set_blowup_threshold(threshold);
    series.push(diag.row(&state)?);
    if config.keep_snapshots {
        snapshots.push(state.clone());
    }
    for j in start..total {
        integrator.step(&mut state, t0 + j as f64 * config.dt)?;
        state.t = t0 + (j + 1) as f64 * config.dt;
        let done = j + 1;
        if done % config.record_every == 0 || done == total {
            series.push(diag.row(&state)?);
            if config.keep_snapshots {
                snapshots.push(state.clone());
            }
        }
        if let (Some(every), Some(dir)) = (config.checkpoint_every, &config.checkpoint_dir) {
            if done % every == 0 && done < total {
                write_checkpoint(dir, config, &integrator.checkpoint(&state, done))?;
            }
        }
    }
    series.finalize(config.quadrature);
    Ok(RunOutput { final_state: state, series, snapshots, steps: total - start })
}
