//! Viscosity plus capillarity:
//!
//! ```text
//! ∂_t v_i − ∂_α S_iα(F) = εΔv_i − δA ∂_αΔF_iα,    ∂_t F = ∇v,
//! ```
//!
//! and its reduction through `w = v − κ div F`. When `κ² − εκ + δA = 0` the
//! pair (w, F) solves the parabolic system
//!
//! ```text
//! ∂_t w − div S(F) = (ε−κ)Δw,    ∂_t F − ∇w = κΔF.
//! ```
//!
//! Both systems run on the Kelvin-Voigt integrator with a different linear
//! part; per mode with F = F̄ + ∇y the capillarity term is −δA|k|⁴ y_k and
//! the reduced potential obeys `y_k' = w_k − κ|k|² y_k`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::stored_energy::StoredEnergyModel;
use crate::solver::{run, Forcing, KvState, LinearPart, RunOutput, SolverConfig};
use crate::spectral::{divergence, SpectralField};

/// Discriminants within this fraction of ε² count as a double root.
const DOUBLE_ROOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum RootChoice {
    /// Smaller root; keeps ε − κ, the viscosity of the reduced w-equation,
    /// as large as possible.
    #[default]
    Minus,
    Plus,
}

impl std::str::FromStr for RootChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minus" => Ok(RootChoice::Minus),
            "plus" => Ok(RootChoice::Plus),
            other => Err(Error::InvalidParameter(format!("root choice must be minus or plus, got `{other}`"))),
        }
    }
}

impl RootChoice {
    pub fn name(self) -> &'static str {
        match self {
            RootChoice::Minus => "minus",
            RootChoice::Plus => "plus",
        }
    }
}

/// Both roots (κ₋, κ₊) of κ² − εκ + δA = 0.
pub fn kappa_roots(epsilon: f64, delta: f64, a: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon.is_finite()) || !(delta >= 0.0 && delta.is_finite()) || !a.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need ε > 0 and δ >= 0, got ε = {epsilon}, δ = {delta}, A = {a}"
        )));
    }
    let da = delta * a;
    if da < 0.0 {
        return Err(Error::Rejected(format!("δA = {da} < 0 gives a negative root; need A >= 0")));
    }
    let disc = epsilon * epsilon - 4.0 * da;
    if disc.abs() <= DOUBLE_ROOT_TOLERANCE * epsilon * epsilon {
        return Ok((0.5 * epsilon, 0.5 * epsilon));
    }
    if disc < 0.0 {
        return Err(Error::Rejected(format!(
            "κ² − εκ + δA has no real root: ε² − 4δA = {disc:e}. Admissible: δ = ε^ρ with ρ > 2 (any A), \
             or δ = ε² with 0 < A <= 1/4"
        )));
    }
    let plus = 0.5 * (epsilon + disc.sqrt());
    Ok((da / plus, plus))
}

/// Root of κ² − εκ + δA = 0 in [0, ε] selected by `choice`.
pub fn kappa_from(epsilon: f64, delta: f64, a: f64, choice: RootChoice) -> Result<f64> {
    let (minus, plus) = kappa_roots(epsilon, delta, a)?;
    Ok(match choice {
        RootChoice::Minus => minus,
        RootChoice::Plus => plus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DDConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub a: f64,
    pub kappa: f64,
    pub root_choice: RootChoice,
}

impl DDConfig {
    pub fn new(epsilon: f64, delta: f64, a: f64, root_choice: RootChoice) -> Result<Self> {
        let kappa = kappa_from(epsilon, delta, a, root_choice)?;
        Ok(DDConfig { epsilon, delta, a, kappa, root_choice })
    }

    pub fn delta_a(&self) -> f64 {
        self.delta * self.a
    }

    /// |κ² − εκ + δA| relative to ε².
    pub fn quadratic_residual(&self) -> f64 {
        let k = self.kappa;
        (k * k - self.epsilon * k + self.delta_a()).abs() / (self.epsilon * self.epsilon)
    }

    pub fn full_linear_part(&self) -> LinearPart {
        LinearPart::DiffusionDispersion { epsilon: self.epsilon, delta_a: self.delta_a() }
    }

    pub fn reduced_linear_part(&self) -> LinearPart {
        LinearPart::Reduced { epsilon: self.epsilon, kappa: self.kappa }
    }

    /// Manifest line for sweeps.
    pub fn echo(&self) -> String {
        format!(
            "epsilon = {:e}\ndelta = {:e}\nA = {:e}\nkappa = {:e}\nroot_choice = {}\n",
            self.epsilon,
            self.delta,
            self.a,
            self.kappa,
            self.root_choice.name()
        )
    }
}

/// w = v − κ div F, computed on coefficients.
pub fn transform_state(v: &SpectralField, f: &SpectralField, kappa: f64) -> Result<SpectralField> {
    let div = divergence(f)?;
    if div.shape() != v.shape() || div.n() != v.n() {
        return Err(Error::ShapeMismatch {
            expected: format!("velocity matching {:?} with N = {}", div.shape(), div.n()),
            got: format!("{:?} with N = {}", v.shape(), v.n()),
        });
    }
    Ok(v.sub(&div.scaled(kappa)))
}

/// State of the reduced system: v replaced by w; div F = Δy so
/// w_k = v_k + κ|k|² y_k.
pub fn reduce_state(state: &KvState, kappa: f64) -> KvState {
    let mut out = state.clone();
    shift_by_laplacian(&mut out.v, &state.y, kappa);
    out
}

/// Inverse of [`reduce_state`]: v_k = w_k − κ|k|² y_k.
pub fn restore_velocity(reduced: &KvState, kappa: f64) -> KvState {
    let mut out = reduced.clone();
    shift_by_laplacian(&mut out.v, &reduced.y, -kappa);
    out
}

fn shift_by_laplacian(v: &mut SpectralField, y: &SpectralField, kappa: f64) {
    for c in 0..v.components() {
        let yc = y.component(c).to_vec();
        for (idx, (z, yk)) in v.component_mut(c).iter_mut().zip(yc).enumerate() {
            let k = y.wavevector(idx);
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            *z += yk * (kappa * k2);
        }
    }
}

fn configured(dd: &DDConfig, base: &SolverConfig, linear: LinearPart) -> SolverConfig {
    let mut cfg = base.clone().with_epsilon(dd.epsilon).with_linear(linear);
    cfg.keep_snapshots = true;
    cfg
}

/// Integrates the viscous-capillary system from (v, F̄, y).
pub fn solve_difdis(
    dd: &DDConfig,
    base: &SolverConfig,
    initial: KvState,
    forcing: Option<&dyn Forcing>,
) -> Result<RunOutput> {
    run(&configured(dd, base, dd.full_linear_part()), initial, forcing)
}

/// Integrates the reduced system from (w, F̄, y).
pub fn solve_difdisred(
    dd: &DDConfig,
    base: &SolverConfig,
    initial: KvState,
    forcing: Option<&dyn Forcing>,
) -> Result<RunOutput> {
    run(&configured(dd, base, dd.reduced_linear_part()), initial, forcing)
}

/// Largest deviation of a 1-D single-mode run of the full system with
/// W = μu²/2 from the closed form of y'' + εn²y' + (μn² + δAn⁴)y = 0, over
/// records every 0.1 time units.
pub fn single_mode_discrepancy(dd: &DDConfig, mu: f64, n: i64, dt: f64, t_end: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("mode must be >= 1, got {n}")));
    }
    let modes = n as usize;
    let base = SolverConfig::new(StoredEnergyModel::quadratic(1, mu), modes, dt, t_end)
        .with_record_every(((0.1 / dt).round() as usize).max(1));
    let mut init = KvState::zeros(1, modes, Mat::scalar(0.0));
    init.v.set_mode(0, &[n], Complex64::new(0.2, -0.1));
    init.y.set_mode(0, &[n], Complex64::new(0.05, 0.1));
    let out = solve_difdis(dd, &base, init.clone(), None)?;
    let n2 = (n * n) as f64;
    let (b, c) = (dd.epsilon * n2, mu * n2 + dd.delta_a() * n2 * n2);
    let sq = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
    if sq.norm() < 1e-8 * b {
        return Err(Error::Rejected("double root of the single-mode ODE; choose another mode".into()));
    }
    let (l1, l2) = ((-b + sq) * 0.5, (-b - sq) * 0.5);
    let (y0, v0) = (init.y.get(0, &[n]), init.v.get(0, &[n]));
    let c1 = (v0 - l2 * y0) / (l1 - l2);
    let c2 = y0 - c1;
    let mut worst = 0.0f64;
    for s in &out.snapshots {
        let (e1, e2) = ((l1 * s.t).exp(), (l2 * s.t).exp());
        worst = worst.max((s.y.get(0, &[n]) - (c1 * e1 + c2 * e2)).norm());
        worst = worst.max((s.v.get(0, &[n]) - (c1 * l1 * e1 + c2 * l2 * e2)).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub times: Vec<f64>,
    /// ‖w_full − w_reduced‖_{L²} at each record.
    pub w_gap: Vec<f64>,
    /// ‖∇y_full − ∇y_reduced‖_{L²} at each record.
    pub f_gap: Vec<f64>,
}

impl EquivalenceReport {
    pub fn max_w_gap(&self) -> f64 {
        self.w_gap.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_f_gap(&self) -> f64 {
        self.f_gap.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs both systems from the same data, the reduced one started at
/// w(0) = v(0) − κ div F(0), and compares w and F at every record.
pub fn equivalence_check(dd: &DDConfig, base: &SolverConfig, initial: &KvState) -> Result<EquivalenceReport> {
    let full = solve_difdis(dd, base, initial.clone(), None)?;
    let reduced = solve_difdisred(dd, base, reduce_state(initial, dd.kappa), None)?;
    if full.snapshots.len() != reduced.snapshots.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} records", full.snapshots.len()),
            got: format!("{} records", reduced.snapshots.len()),
        });
    }
    let mut report = EquivalenceReport { times: Vec::new(), w_gap: Vec::new(), f_gap: Vec::new() };
    for (a, b) in full.snapshots.iter().zip(&reduced.snapshots) {
        let w = reduce_state(a, dd.kappa);
        let vol = (2.0 * std::f64::consts::PI).powi(a.dim() as i32);
        let dw = w.v.sub(&b.v);
        let dy = a.y.sub(&b.y);
        report.times.push(a.t);
        report.w_gap.push((vol * dw.weighted_energy(|_| 1.0)).sqrt());
        report.f_gap.push((vol * dy.weighted_energy(|k| (k[0] * k[0] + k[1] * k[1]) as f64)).sqrt());
    }
    Ok(report)
}
