//! Manufactured smooth solutions with the forcing that makes them exact.
//!
//! The potential is a sum of plane-wave profiles `y_i = g_i(t) ψ(m_i·x)` with
//! `ψ(s) = 1/(c − cos s) − 1/√(c²−1)`. The profile is analytic but not
//! band-limited: its Fourier coefficients are `r^{|j|}/√(c²−1)` with
//! `r = c − √(c²−1)`, so Galerkin truncation errors decay geometrically in N
//! and can be evaluated in closed form.
//!
//! The forcing is `f = ∂_t v − div S(F) − εΔv` evaluated pointwise, with
//! `div S(F)_i = Σ_α [D²W(F)(∂_α F)]_iα`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::solver::{run, Forcing, KvState, Scheme, SolverConfig};
use crate::stored_energy::StoredEnergyModel;

/// Terms of the coefficient series below this size are dropped.
const SERIES_CUTOFF: f64 = 1e-30;

#[derive(Debug, Clone)]
pub struct ManufacturedSolution {
    dim: usize,
    model: StoredEnergyModel,
    epsilon: f64,
    fbar: Mat,
    c: f64,
    /// Wave direction m_i of each component.
    waves: [[i64; 2]; 2],
    /// g_i(t) = amp_i cos(freq_i t + phase_i).
    amp: [f64; 2],
    freq: [f64; 2],
    phase: [f64; 2],
}

impl ManufacturedSolution {
    /// Standard instance: c = 3, waves (1,1) and (1,−2) in 2-D, F̄ = I.
    pub fn new(model: StoredEnergyModel, epsilon: f64) -> Self {
        let dim = model.dim();
        ManufacturedSolution {
            dim,
            model,
            epsilon,
            fbar: Mat::identity(dim),
            c: 3.0,
            waves: if dim == 1 { [[1, 0], [0, 0]] } else { [[1, 1], [1, -2]] },
            amp: [0.3, 0.2],
            freq: [1.0, 2.0],
            phase: [0.0, 0.5],
        }
    }

    /// Profile parameter c > 1; larger values give faster coefficient decay.
    pub fn with_sharpness(mut self, c: f64) -> Result<Self> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("profile parameter must exceed 1, got {c}")));
        }
        self.c = c;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn model(&self) -> &StoredEnergyModel {
        &self.model
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Coefficient ratio r; the truncation error at N scales like r^N.
    pub fn decay_ratio(&self) -> f64 {
        self.c - (self.c * self.c - 1.0).sqrt()
    }

    /// (g, g′, g″) of component i.
    fn time_profile(&self, i: usize, t: f64) -> (f64, f64, f64) {
        let (a, w) = (self.amp[i], self.freq[i]);
        let arg = w * t + self.phase[i];
        (a * arg.cos(), -a * w * arg.sin(), -a * w * w * arg.cos())
    }

    /// (ψ, ψ′, ψ″) at s.
    fn profile(&self, s: f64) -> (f64, f64, f64) {
        let (sn, cs) = s.sin_cos();
        let d = self.c - cs;
        let mean = 1.0 / (self.c * self.c - 1.0).sqrt();
        (1.0 / d - mean, -sn / (d * d), -cs / (d * d) + 2.0 * sn * sn / (d * d * d))
    }

    fn wave(&self, i: usize) -> [f64; 2] {
        [self.waves[i][0] as f64, self.waves[i][1] as f64]
    }

    fn phase_at(&self, i: usize, x: [f64; 2]) -> f64 {
        let m = self.wave(i);
        m[0] * x[0] + m[1] * x[1]
    }

    /// Exact velocity and deformation at a point.
    pub fn fields_at(&self, t: f64, x: [f64; 2]) -> (Vec<f64>, Mat) {
        let d = self.dim;
        let mut v = vec![0.0; d];
        let mut f = self.fbar;
        for (i, vi) in v.iter_mut().enumerate() {
            let (g, dg, _) = self.time_profile(i, t);
            let (p, dp, _) = self.profile(self.phase_at(i, x));
            *vi = dg * p;
            let m = self.wave(i);
            for alpha in 0..d {
                f.set(i, alpha, f.get(i, alpha) + g * dp * m[alpha]);
            }
        }
        (v, f)
    }

    /// Galerkin projection of the exact state onto modes |k_i| ≤ n.
    pub fn projected_state(&self, t: f64, n: usize) -> KvState {
        let mut s = KvState::zeros(self.dim, n, self.fbar);
        for i in 0..self.dim {
            let (g, dg, _) = self.time_profile(i, t);
            for (j, coef) in self.series() {
                let k = self.mode(i, j);
                if k.iter().all(|c| c.unsigned_abs() as usize <= n) {
                    s.y.set_mode(i, &k[..self.dim], Complex64::new(g * coef, 0.0));
                    s.v.set_mode(i, &k[..self.dim], Complex64::new(dg * coef, 0.0));
                }
            }
        }
        s.t = t;
        s
    }

    /// Positive-j coefficients of ψ: (j, r^j/√(c²−1)).
    fn series(&self) -> impl Iterator<Item = (i64, f64)> {
        let r = self.decay_ratio();
        let scale = 1.0 / (self.c * self.c - 1.0).sqrt();
        (1..).map(move |j| (j, scale * r.powi(j as i32))).take_while(|&(_, c)| c > SERIES_CUTOFF)
    }

    fn mode(&self, i: usize, j: i64) -> [i64; 2] {
        [self.waves[i][0] * j, self.waves[i][1] * j]
    }

    /// ‖v − v*‖²_{L²} + ‖F − F*‖²_{L²}, square-rooted, including the modes
    /// of the exact solution beyond the state's truncation.
    pub fn error(&self, state: &KvState) -> Result<f64> {
        if state.dim() != self.dim || state.fbar != self.fbar {
            return Err(Error::ShapeMismatch {
                expected: format!("d = {} state with the manufactured mean deformation", self.dim),
                got: format!("d = {}", state.dim()),
            });
        }
        let n = state.n();
        let exact = self.projected_state(state.t, n);
        let vol = (2.0 * std::f64::consts::PI).powi(self.dim as i32);
        let k2 = |k: [i64; 2]| (k[0] * k[0] + k[1] * k[1]) as f64;
        let mut sum = state.v.sub(&exact.v).weighted_energy(|_| 1.0);
        sum += state.y.sub(&exact.y).weighted_energy(k2);
        for i in 0..self.dim {
            let (g, dg, _) = self.time_profile(i, state.t);
            for (j, coef) in self.series() {
                let k = self.mode(i, j);
                if k.iter().any(|c| c.unsigned_abs() as usize > n) {
                    // the ±j pair
                    sum += 2.0 * coef * coef * (dg * dg + g * g * k2(k));
                }
            }
        }
        Ok((vol * sum).sqrt())
    }

    /// Error at `t_end` of a forced run from the projected exact data.
    pub fn run_error(&self, n: usize, dt: f64, t_end: f64, scheme: Scheme) -> Result<f64> {
        let cfg = SolverConfig::new(self.model.clone(), n, dt, t_end)
            .with_epsilon(self.epsilon)
            .with_scheme(scheme)
            .with_record_every(usize::MAX);
        let out = run(&cfg, self.projected_state(0.0, n), Some(self))?;
        self.error(&out.final_state)
    }
}

impl Forcing for ManufacturedSolution {
    fn sample(&self, t: f64, x: [f64; 2], out: &mut [f64]) {
        let d = self.dim;
        let (_, f) = self.fields_at(t, x);
        let hess = self.model.hessian(&f);
        let mut second = [(0.0, 0.0, 0.0); 2];
        for (i, s) in second.iter_mut().enumerate().take(d) {
            *s = self.profile(self.phase_at(i, x));
        }
        let mut div_s = [0.0; 2];
        for beta in 0..d {
            // ∂_β F_iα = g_i ψ″ m_iα m_iβ
            let mut dfb = Mat::zeros(d);
            for i in 0..d {
                let (g, _, _) = self.time_profile(i, t);
                let m = self.wave(i);
                for alpha in 0..d {
                    dfb.set(i, alpha, g * second[i].2 * m[alpha] * m[beta]);
                }
            }
            let ds = hess.apply(&dfb);
            for (i, acc) in div_s.iter_mut().enumerate().take(d) {
                *acc += ds.get(i, beta);
            }
        }
        for i in 0..d {
            let (_, dg, ddg) = self.time_profile(i, t);
            let (p, _, ddp) = second[i];
            let m = self.wave(i);
            let m2 = m[0] * m[0] + m[1] * m[1];
            out[i] = ddg * p - div_s[i] - self.epsilon * dg * m2 * ddp;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, SpectralTransform};

    #[test]
    fn projection_matches_pointwise_fields() {
        let ms = ManufacturedSolution::new(StoredEnergyModel::quartic(2, 1.0), 1.0);
        let t = 0.7;
        let state = ms.projected_state(t, 64);
        let grid = Grid::new(2, 64, 160).unwrap();
        let mut tr = SpectralTransform::new(grid);
        let fm = tr.matrices(&state.deformation_fluctuation(), &state.fbar);
        let v = tr.to_physical(&state.v);
        for j in [0, 17, 500, 4321, 9000] {
            let (ve, fe) = ms.fields_at(t, grid.point(j));
            for a in 0..4 {
                assert!((fm[j].as_slice()[a] - fe.as_slice()[a]).abs() < 1e-13);
            }
            for c in 0..2 {
                assert!((v[c][j] - ve[c]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn projection_error_is_the_tail() {
        let ms = ManufacturedSolution::new(StoredEnergyModel::quartic(2, 1.0), 1.0).with_sharpness(2.0).unwrap();
        let full = ms.projected_state(0.3, 64);
        assert!(ms.error(&full).unwrap() < 1e-14);
        let e8 = ms.error(&ms.projected_state(0.3, 8)).unwrap();
        let e16 = ms.error(&ms.projected_state(0.3, 16)).unwrap();
        // driven by the (1,−2) wave, first dropped at j = 5 and j = 9; the
        // F-norm adds the factor |k| ≈ 20.1/11.2
        let r = ms.decay_ratio();
        let ratio = e16 / e8 / r.powi(4);
        assert!(ratio > 1.5 && ratio < 2.0, "{ratio}");
    }

    #[test]
    fn forcing_vanishes_for_linear_static_balance() {
        // W = μ|F|²/2 in 1-D: f = g″ψ − μgψ″ − εg′ψ″
        let mu = 1.5;
        let ms = ManufacturedSolution::new(StoredEnergyModel::quadratic(1, mu), 0.4);
        let (t, x) = (0.9, [1.3, 0.0]);
        let mut out = [0.0];
        ms.sample(t, x, &mut out);
        let (g, dg, ddg) = ms.time_profile(0, t);
        let (p, _, ddp) = ms.profile(x[0]);
        let expected = ddg * p - mu * g * ddp - 0.4 * dg * ddp;
        assert!((out[0] - expected).abs() < 1e-14);
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let ms = ManufacturedSolution::new(StoredEnergyModel::quartic(2, 1.0), 1.0);
        let h = 1e-5;
        for s in [0.1, 1.0, 2.5, -3.0] {
            let (p0, d0, dd0) = ms.profile(s);
            let (pp, dp, _) = ms.profile(s + h);
            let (pm, dm, _) = ms.profile(s - h);
            assert!(((pp - pm) / (2.0 * h) - d0).abs() < 1e-9);
            assert!(((dp - dm) / (2.0 * h) - dd0).abs() < 1e-9);
            assert!(p0.is_finite());
        }
    }
}
