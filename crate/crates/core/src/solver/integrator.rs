//! Single-step integrators over (a, y) mode pairs.

use num_complex::Complex64;

use super::linear::{Block, LinearPart};
use super::{Checkpoint, Forcing, KvState, Scheme, SolverConfig};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::spectral::{nonlinear_stress_into, Shape, SpectralField, SpectralTransform};
use crate::stored_energy::StoredEnergyModel;

/// What the guard saw during the last step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// Energy ½‖a‖² + ∫W of the state at the start of the step.
    pub energy: f64,
}

pub struct Integrator<'a> {
    scheme: Scheme,
    dt: f64,
    model: StoredEnergyModel,
    forcing: Option<&'a dyn Forcing>,
    tr: SpectralTransform,
    dim: usize,
    n: usize,
    wavevectors: Vec<[f64; 2]>,
    coupling: f64,
    linear: LinearPart,
    /// IF: E(h/2). CNAB2: (I − hL/2)⁻¹.
    first: Vec<Block>,
    /// CNAB2: I + hL/2.
    second: Vec<Block>,
    /// CNAB2 start-up: (I − hL)⁻¹.
    euler: Vec<Block>,
    history: Option<SpectralField>,
    threshold: f64,
    last: Option<StepInfo>,
    fbar: Mat,
    fluct: SpectralField,
    stress: SpectralField,
    grid_buf: Vec<Vec<f64>>,
    force_buf: Vec<Vec<f64>>,
}

struct Rhs {
    da: SpectralField,
    dy: SpectralField,
}

impl<'a> Integrator<'a> {
    pub fn new(config: &SolverConfig, forcing: Option<&'a dyn Forcing>) -> Result<Self> {
        let grid = config.grid()?;
        let (dim, n) = (grid.dim(), grid.n());
        let linear = config.linear_part();
        let wavevectors: Vec<[f64; 2]> =
            (0..grid.mode_count()).map(|i| grid.wavevector(i).map(|k| k as f64)).collect();
        let h = config.dt;
        let mut first = Vec::with_capacity(wavevectors.len());
        let mut second = Vec::new();
        let mut euler = Vec::new();
        for k in &wavevectors {
            let k2 = k[0] * k[0] + k[1] * k[1];
            match config.scheme {
                Scheme::IfRk4 => {
                    let l = if k2 == 0.0 { Block::ZERO } else { linear.implicit(k2) };
                    first.push(l.exp(0.5 * h));
                }
                Scheme::ImexCnab2 => {
                    let l = if k2 == 0.0 { Block::ZERO } else { linear.full(k2) };
                    first.push(Block::IDENTITY.add(&l.scale(-0.5 * h)).inverse());
                    second.push(Block::IDENTITY.add(&l.scale(0.5 * h)));
                    euler.push(Block::IDENTITY.add(&l.scale(-h)).inverse());
                }
            }
        }
        let coupling = match config.scheme {
            Scheme::IfRk4 => linear.coupling(),
            Scheme::ImexCnab2 => 0.0,
        };
        Ok(Integrator {
            scheme: config.scheme,
            dt: h,
            model: config.model.clone(),
            forcing,
            tr: SpectralTransform::new(grid),
            dim,
            n,
            wavevectors,
            coupling,
            linear,
            first,
            second,
            euler,
            history: None,
            threshold: f64::INFINITY,
            last: None,
            fbar: Mat::identity(dim),
            fluct: SpectralField::zeros(dim, n, Shape::Matrix),
            stress: SpectralField::zeros(dim, n, Shape::Matrix),
            grid_buf: Vec::new(),
            force_buf: Vec::new(),
        })
    }

    /// Checks the shape of an initial state and drops the mean of y.
    pub fn project(&self, state: KvState) -> Result<KvState> {
        if state.dim() != self.dim || state.n() != self.n {
            return Err(Error::ShapeMismatch {
                expected: format!("d = {}, N = {}", self.dim, self.n),
                got: format!("d = {}, N = {}", state.dim(), state.n()),
            });
        }
        let mut s = KvState::new(state.t, state.v, state.y, state.fbar)?;
        s.v.enforce_hermitian();
        s.y.enforce_hermitian();
        Ok(s)
    }

    pub fn set_blowup_threshold(&mut self, threshold: f64) {
        self.threshold = threshold;
    }

    pub fn blowup_threshold(&self) -> f64 {
        self.threshold
    }

    pub fn last_step(&self) -> Option<StepInfo> {
        self.last
    }

    pub(crate) fn restore_history(&mut self, history: Option<SpectralField>, threshold: f64) -> Result<()> {
        if let Some(h) = &history {
            if self.scheme != Scheme::ImexCnab2 || h.dim() != self.dim || h.n() != self.n || h.shape() != Shape::Vector {
                return Err(Error::Format("checkpoint history does not match the configured scheme".into()));
            }
        }
        self.history = history;
        self.threshold = threshold;
        Ok(())
    }

    pub(crate) fn checkpoint(&self, state: &KvState, step: usize) -> Checkpoint {
        Checkpoint { step, state: state.clone(), history: self.history.clone(), blowup_threshold: self.threshold }
    }

    fn volume(&self) -> f64 {
        self.tr.grid().volume()
    }

    /// Explicit part: i S_k·k + f_k for a, c·a for y (k ≠ 0). Returns the
    /// grid quadrature of W at the given state.
    fn explicit(&mut self, t: f64, a: &SpectralField, y: &SpectralField) -> Result<(Rhs, f64)> {
        let d = self.dim;
        let modes = self.wavevectors.len();
        // F fluctuation = ∇y: F_{iα,k} = i k_α y_{i,k}
        for i in 0..d {
            for al in 0..d {
                let src = y.component(i);
                let dst = self.fluct.component_mut(i * d + al);
                for idx in 0..modes {
                    let z = src[idx];
                    dst[idx] = Complex64::new(-z.im, z.re) * self.wavevectors[idx][al];
                }
            }
        }
        let w = nonlinear_stress_into(
            &mut self.tr,
            &self.model,
            &self.fbar,
            &self.fluct,
            &mut self.stress,
            &mut self.grid_buf,
        )?;
        let mut da = SpectralField::zeros(d, self.n, Shape::Vector);
        for i in 0..d {
            for al in 0..d {
                let s = self.stress.component(i * d + al);
                let out = da.component_mut(i);
                for idx in 0..modes {
                    let z = s[idx] * self.wavevectors[idx][al];
                    out[idx] += Complex64::new(-z.im, z.re);
                }
            }
        }
        if let Some(f) = self.forcing {
            self.add_forcing(f, t, &mut da)?;
        }
        let mut dy = SpectralField::zeros(d, self.n, Shape::Vector);
        if self.coupling != 0.0 {
            dy.axpy(self.coupling, a);
            let z = dy.zero_mode_index();
            for c in 0..d {
                dy.component_mut(c)[z] = Complex64::default();
            }
        }
        Ok((Rhs { da, dy }, w))
    }

    fn add_forcing(&mut self, f: &dyn Forcing, t: f64, da: &mut SpectralField) -> Result<()> {
        let grid = *self.tr.grid();
        let points = grid.point_count();
        self.force_buf.resize_with(self.dim, Vec::new);
        for b in self.force_buf.iter_mut() {
            b.resize(points, 0.0);
        }
        let mut value = [0.0; 2];
        for j in 0..points {
            f.sample(t, grid.point(j), &mut value[..self.dim]);
            for c in 0..self.dim {
                self.force_buf[c][j] = value[c];
            }
        }
        let mut coeffs = vec![Complex64::default(); grid.mode_count()];
        for c in 0..self.dim {
            self.tr.forward_scalar(&self.force_buf[c], &mut coeffs);
            for (o, z) in da.component_mut(c).iter_mut().zip(&coeffs) {
                *o += z;
            }
        }
        if !da.is_finite() {
            return Err(Error::NonFinite { quantity: "forcing", sample: format!("t = {t}") });
        }
        Ok(())
    }

    fn propagate(blocks: &[Block], a: &mut SpectralField, y: &mut SpectralField) {
        for c in 0..a.components() {
            let (ac, yc) = (a.component_mut(c), y.component_mut(c));
            for (idx, b) in blocks.iter().enumerate() {
                let (na, ny) = b.apply(ac[idx], yc[idx]);
                ac[idx] = na;
                yc[idx] = ny;
            }
        }
    }

    fn guard(&mut self, t: f64, a: &SpectralField, w: f64) -> Result<()> {
        let kinetic = 0.5 * self.volume() * a.weighted_energy(|_| 1.0);
        let energy = kinetic + w;
        self.last = Some(StepInfo { energy });
        if !energy.is_finite() {
            return Err(Error::BlowUp { t, reason: format!("non-finite energy {energy}") });
        }
        if energy > self.threshold {
            return Err(Error::BlowUp {
                t,
                reason: format!("energy {energy:.6e} exceeds guard threshold {:.6e}", self.threshold),
            });
        }
        Ok(())
    }

    fn blow_up(t: f64, e: Error) -> Error {
        match e {
            Error::NonFinite { quantity, sample } => {
                Error::BlowUp { t, reason: format!("non-finite {quantity} at {sample}") }
            }
            other => other,
        }
    }

    /// Time derivative (dv/dt, dy/dt) of the semi-discrete system at `state`.
    pub fn rhs(&mut self, state: &KvState) -> Result<(SpectralField, SpectralField)> {
        self.fbar = state.fbar;
        let coupling = self.coupling;
        self.coupling = 1.0;
        let out = self.explicit(state.t, &state.v, &state.y);
        self.coupling = coupling;
        let (mut r, _) = out.map_err(|e| Self::blow_up(state.t, e))?;
        // explicit part above already holds the coupling; add the rest of the linear block
        for c in 0..self.dim {
            let (a, y) = (state.v.component(c), state.y.component(c));
            for (idx, k) in self.wavevectors.iter().enumerate() {
                let k2 = k[0] * k[0] + k[1] * k[1];
                if k2 == 0.0 {
                    continue;
                }
                let l = self.linear.full(k2).add(&Block([0.0, 0.0, -1.0, 0.0]));
                let (da, dy) = l.apply(a[idx], y[idx]);
                r.da.component_mut(c)[idx] += da;
                r.dy.component_mut(c)[idx] += dy;
            }
        }
        Ok((r.da, r.dy))
    }

    /// Advances `state` by one step of size dt starting at time `t`.
    pub fn step(&mut self, state: &mut KvState, t: f64) -> Result<StepInfo> {
        self.fbar = state.fbar;
        match self.scheme {
            Scheme::IfRk4 => self.step_if_rk4(state, t),
            Scheme::ImexCnab2 => self.step_cnab2(state, t),
        }
        .map_err(|e| Self::blow_up(t, e))?;
        state.v.enforce_hermitian();
        state.y.enforce_hermitian();
        if !state.is_finite() {
            return Err(Error::BlowUp { t: t + self.dt, reason: "non-finite state after step".into() });
        }
        Ok(self.last.expect("guard ran"))
    }

    fn step_if_rk4(&mut self, state: &mut KvState, t: f64) -> Result<()> {
        let h = self.dt;
        let half = std::mem::take(&mut self.first);
        let (a0, y0) = (&state.v, &state.y);

        let (k1, w) = self.explicit(t, a0, y0)?;
        self.guard(t, a0, w)?;

        let mut pa = a0.clone();
        let mut py = y0.clone();
        Self::propagate(&half, &mut pa, &mut py);

        let mut a2 = a0.clone();
        let mut y2 = y0.clone();
        a2.axpy(0.5 * h, &k1.da);
        y2.axpy(0.5 * h, &k1.dy);
        Self::propagate(&half, &mut a2, &mut y2);
        let (k2, _) = self.explicit(t + 0.5 * h, &a2, &y2)?;

        let mut a3 = pa.clone();
        let mut y3 = py.clone();
        a3.axpy(0.5 * h, &k2.da);
        y3.axpy(0.5 * h, &k2.dy);
        let (k3, _) = self.explicit(t + 0.5 * h, &a3, &y3)?;

        let mut a4 = pa;
        let mut y4 = py;
        a4.axpy(h, &k3.da);
        y4.axpy(h, &k3.dy);
        Self::propagate(&half, &mut a4, &mut y4);
        let (k4, _) = self.explicit(t + h, &a4, &y4)?;

        // u⁺ = E(h/2)[E(h/2)(u + h/6 k1) + h/3 (k2 + k3)] + h/6 k4
        let (a, y) = (&mut state.v, &mut state.y);
        a.axpy(h / 6.0, &k1.da);
        y.axpy(h / 6.0, &k1.dy);
        Self::propagate(&half, a, y);
        a.axpy(h / 3.0, &k2.da);
        y.axpy(h / 3.0, &k2.dy);
        a.axpy(h / 3.0, &k3.da);
        y.axpy(h / 3.0, &k3.dy);
        Self::propagate(&half, a, y);
        a.axpy(h / 6.0, &k4.da);
        y.axpy(h / 6.0, &k4.dy);
        self.first = half;
        Ok(())
    }

    fn step_cnab2(&mut self, state: &mut KvState, t: f64) -> Result<()> {
        let h = self.dt;
        let (rhs, w) = self.explicit(t, &state.v, &state.y)?;
        self.guard(t, &state.v, w)?;
        let explicit = rhs.da;
        let (a, y) = (&mut state.v, &mut state.y);
        match self.history.take() {
            None => {
                a.axpy(h, &explicit);
                Self::propagate(&self.euler, a, y);
            }
            Some(prev) => {
                Self::propagate(&self.second, a, y);
                a.axpy(1.5 * h, &explicit);
                a.axpy(-0.5 * h, &prev);
                Self::propagate(&self.first, a, y);
            }
        }
        self.history = Some(explicit);
        Ok(())
    }
}
