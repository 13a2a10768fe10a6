//! Energy, dissipation and modulated-energy functionals along trajectories,
//! with the residuals of their balance laws.
//!
//! With D²W̃ = D²W + K·Id, smooth solutions satisfy
//!
//! ```text
//! E = ∫ ½|v|² + W(F),                  dE/dt + ε∫|∇v|² = 0,
//! G = ∫ |v − ε/2 div F|² + ε²/4 |div F|² + 2W(F),
//! Q = ε ∫ D²W̃(F):(∂_βF, ∂_βF) + |∇v|²,  dG/dt + Q = εK ∫|∇F|².
//! ```
//!
//! Semi-discretely both identities are exact on the dealiased grid for
//! polynomial stresses, so their residuals measure time-stepping and
//! time-quadrature error only.

mod quadrature;

pub use quadrature::{cumulative_integral, QuadratureRule};

use std::fmt::Write as _;

use crate::error::Result;
use crate::matrix::Mat;
use crate::solver::KvState;
use crate::spectral::{Grid, Norms, SpectralField, SpectralTransform};
use crate::stored_energy::StoredEnergyModel;

pub const CSV_HEADER: &str = "t,E,D,H1F,G,Q,hs1_v,hs2_v,hs3_v,hs1_f,hs2_f,hs3_f,balance_residual,modulated_residual";

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    /// ∫|∇F|², equal to ∫|div F|² for curl-free F.
    pub h1f: f64,
    pub modulated: f64,
    pub modulated_dissipation: f64,
    pub hs_v: [f64; 3],
    pub hs_f: [f64; 3],
    /// E(t) + ∫₀ᵗ D − E(0).
    pub balance_residual: f64,
    /// G(t) + ∫₀ᵗ Q − εK∫₀ᵗ H1F − G(0).
    pub modulated_residual: f64,
}

impl DiagnosticRow {
    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.energy,
            self.dissipation,
            self.h1f,
            self.modulated,
            self.modulated_dissipation,
            self.hs_v[0],
            self.hs_v[1],
            self.hs_v[2],
            self.hs_f[0],
            self.hs_f[1],
            self.hs_f[2],
            self.balance_residual,
            self.modulated_residual,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|x| x.is_finite())
    }
}

/// Evaluates functionals of single states on one grid.
pub struct DiagnosticContext {
    tr: SpectralTransform,
    model: StoredEnergyModel,
    epsilon: f64,
    k: f64,
}

impl DiagnosticContext {
    pub fn new(grid: Grid, model: StoredEnergyModel, epsilon: f64) -> Self {
        let k = model.semiconvexity();
        DiagnosticContext { tr: SpectralTransform::new(grid), model, epsilon, k }
    }

    pub fn grid(&self) -> &Grid {
        self.tr.grid()
    }

    fn volume(&self) -> f64 {
        self.tr.grid().volume()
    }

    fn grid_deformation(&mut self, state: &KvState) -> Vec<Mat> {
        self.tr.matrices(&state.deformation_fluctuation(), &state.fbar)
    }

    /// ∫ W(F) by grid quadrature.
    pub fn stored_energy(&mut self, state: &KvState) -> f64 {
        let mats = self.grid_deformation(state);
        self.quadrature_w(&mats)
    }

    /// E = ½‖v‖² + ∫W(F).
    pub fn energy(&mut self, state: &KvState) -> Result<f64> {
        let w = self.stored_energy(state);
        let e = 0.5 * self.volume() * state.v.weighted_energy(|_| 1.0) + w;
        if !e.is_finite() {
            return Err(crate::Error::NonFinite { quantity: "energy", sample: format!("t = {}", state.t) });
        }
        Ok(e)
    }

    /// D = ε‖∇v‖².
    pub fn dissipation(&self, state: &KvState) -> f64 {
        self.epsilon * grad_sq(&state.v)
    }

    /// (G, Q) of the modulated identity.
    pub fn modulated(&mut self, state: &KvState) -> (f64, f64) {
        let mats = self.grid_deformation(state);
        let w = self.quadrature_w(&mats);
        let (g, q, _) = self.modulated_parts(state, &mats, w);
        (g, q)
    }

    fn quadrature_w(&self, mats: &[Mat]) -> f64 {
        mats.iter().map(|f| self.model.energy(f)).sum::<f64>() * self.tr.grid().cell_volume()
    }

    fn modulated_parts(&mut self, state: &KvState, mats: &[Mat], w: f64) -> (f64, f64, f64) {
        let eps = self.epsilon;
        let vol = self.volume();
        let d = state.dim();
        let cell = self.tr.grid().cell_volume();

        // div F_k = −|k|² y_k
        let y = &state.y;
        let mut cross = 0.0;
        for c in 0..d {
            for (idx, (vk, yk)) in state.v.component(c).iter().zip(y.component(c)).enumerate() {
                let k = y.wavevector(idx);
                let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
                cross += (vk + yk * (0.5 * eps * k2)).norm_sqr();
            }
        }
        let h1f = h1f(y);
        let g = vol * cross + 0.25 * eps * eps * h1f + 2.0 * w;

        // Σ_β ∫ D²W(F)[∂_βF, ∂_βF] on the grid
        let f = state.deformation_fluctuation();
        let mut hess_term = 0.0;
        for beta in 0..d {
            let mut dfield = f.clone();
            for c in 0..f.components() {
                for (idx, z) in dfield.component_mut(c).iter_mut().enumerate() {
                    let kb = y.wavevector(idx)[beta] as f64;
                    *z = num_complex::Complex64::new(-z.im * kb, z.re * kb);
                }
            }
            let grads = self.tr.matrices(&dfield, &Mat::zeros(d));
            hess_term += mats.iter().zip(&grads).map(|(fm, gm)| self.model.hessian_form(fm, gm)).sum::<f64>();
        }
        hess_term *= cell;
        let q = eps * (hess_term + self.k * h1f + grad_sq(&state.v));
        (g, q, h1f)
    }

    /// One diagnostic row; the residual columns are filled by
    /// [`DiagnosticSeries::finalize`].
    pub fn row(&mut self, state: &KvState) -> Result<DiagnosticRow> {
        let mats = self.grid_deformation(state);
        let w = self.quadrature_w(&mats);
        let energy = 0.5 * self.volume() * state.v.weighted_energy(|_| 1.0) + w;
        if !energy.is_finite() {
            return Err(crate::Error::NonFinite { quantity: "energy", sample: format!("t = {}", state.t) });
        }
        let (g, q, h1f) = self.modulated_parts(state, &mats, w);
        let nv = Norms::of(&state.v);
        let nf = Norms::of(&state.deformation());
        Ok(DiagnosticRow {
            t: state.t,
            energy,
            dissipation: self.dissipation(state),
            h1f,
            modulated: g,
            modulated_dissipation: q,
            hs_v: [nv.h1, nv.h2, nv.h3],
            hs_f: [nf.h1, nf.h2, nf.h3],
            balance_residual: 0.0,
            modulated_residual: 0.0,
        })
    }

    /// Smallest eigenvalue of D²W̃ = D²W + K·Id over the grid points of F.
    pub fn min_modified_hessian_eigenvalue(&mut self, state: &KvState) -> f64 {
        let k = self.k;
        self.grid_deformation(state)
            .iter()
            .map(|f| self.model.hessian(f).shifted(k).min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }
}

/// ‖∇f‖² = |𝕋ᵈ| Σ |k|² |f_k|².
pub fn grad_sq(f: &SpectralField) -> f64 {
    let vol = (2.0 * std::f64::consts::PI).powi(f.dim() as i32);
    vol * f.weighted_energy(|k| (k[0] * k[0] + k[1] * k[1]) as f64)
}

/// ∫|∇F|² for F = F̄ + ∇y: |𝕋ᵈ| Σ |k|⁴ |y_k|².
pub fn h1f(y: &SpectralField) -> f64 {
    let vol = (2.0 * std::f64::consts::PI).powi(y.dim() as i32);
    vol * y.weighted_energy(|k| ((k[0] * k[0] + k[1] * k[1]) as f64).powi(2))
}

/// Recorded rows of one run with the constants needed to interpret them.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub rows: Vec<DiagnosticRow>,
    pub epsilon: f64,
    /// Semiconvexity constant K of the model.
    pub k: f64,
    /// inf W.
    pub w_min: f64,
    /// |𝕋ᵈ|.
    pub volume: f64,
}

impl DiagnosticSeries {
    pub fn new(epsilon: f64, k: f64, w_min: f64, volume: f64) -> Self {
        DiagnosticSeries { rows: Vec::new(), epsilon, k, w_min, volume }
    }

    pub fn push(&mut self, row: DiagnosticRow) {
        if let Some(last) = self.rows.last() {
            assert!(row.t > last.t, "record times must increase: {} after {}", row.t, last.t);
        }
        self.rows.push(row);
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    fn column(&self, f: impl Fn(&DiagnosticRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    /// Fills the residual columns with time integrals under `rule`.
    pub fn finalize(&mut self, rule: QuadratureRule) {
        if self.rows.is_empty() {
            return;
        }
        let t = self.times();
        let int_d = cumulative_integral(&t, &self.column(|r| r.dissipation), rule);
        let int_q = cumulative_integral(&t, &self.column(|r| r.modulated_dissipation), rule);
        let int_h = cumulative_integral(&t, &self.column(|r| r.h1f), rule);
        let (e0, g0) = (self.rows[0].energy, self.rows[0].modulated);
        let ek = self.epsilon * self.k;
        for (j, row) in self.rows.iter_mut().enumerate() {
            row.balance_residual = row.energy + int_d[j] - e0;
            row.modulated_residual = row.modulated + int_q[j] - ek * int_h[j] - g0;
        }
    }

    /// max_t |E(t) + ∫₀ᵗ D − E(0)|.
    pub fn energy_balance_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.balance_residual.abs()).fold(0.0, f64::max)
    }

    /// max_t [E(t) + ∫₀ᵗ D − E(0)]₊: violation of the energy inequality.
    pub fn energy_inequality_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.balance_residual.max(0.0)).fold(0.0, f64::max)
    }

    /// max_t [G(t) + ∫Q − εK∫H1F − G(0)]₊.
    pub fn modulated_inequality_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.modulated_residual.max(0.0)).fold(0.0, f64::max)
    }

    /// max_t |G(t) + ∫Q − εK∫H1F − G(0)|.
    pub fn modulated_identity_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.modulated_residual.abs()).fold(0.0, f64::max)
    }

    /// Largest increase E(t_{j+1}) − E(t_j) between consecutive records.
    pub fn max_energy_increase(&self) -> f64 {
        self.rows.windows(2).map(|w| w[1].energy - w[0].energy).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Majorant of ∫|∇F|² obtained from G ≥ ε²/4·H1F + 2|𝕋ᵈ| inf W and
    /// dG/dt ≤ εK·H1F + (measured residual):
    /// H1F(t) ≤ 4/ε² · (G(0) − 2|𝕋ᵈ| inf W + r) · e^{4Kt/ε}.
    pub fn gronwall_h1_bound(&self) -> GronwallReport {
        let eps = self.epsilon;
        let r = self.modulated_inequality_residual();
        let Some(first) = self.rows.first() else {
            return GronwallReport { constant: 4.0 / (eps * eps), bound: Vec::new(), worst_ratio: 0.0, pass: true };
        };
        let base = first.modulated - 2.0 * self.volume * self.w_min + r;
        let constant = 4.0 / (eps * eps);
        let t0 = first.t;
        let bound: Vec<f64> =
            self.rows.iter().map(|row| constant * base * (4.0 * self.k * (row.t - t0) / eps).exp()).collect();
        let mut worst = 0.0f64;
        let mut pass = true;
        for (row, b) in self.rows.iter().zip(&bound) {
            if row.h1f > *b {
                pass = false;
            }
            if *b > 0.0 {
                worst = worst.max(row.h1f / b);
            } else if row.h1f > 0.0 {
                worst = f64::INFINITY;
            }
        }
        GronwallReport { constant, bound, worst_ratio: worst, pass }
    }

    /// Largest ratio of an Hˢ norm (s = 3) of v or F to its initial value.
    pub fn h3_growth(&self) -> f64 {
        let Some(first) = self.rows.first() else { return 1.0 };
        let init = first.hs_v[2] + first.hs_f[2];
        self.rows.iter().map(|r| (r.hs_v[2] + r.hs_f[2]) / init).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().all(DiagnosticRow::is_finite)
    }

    /// CSV with a header row, 17 significant digits, UNIX newlines.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 + self.rows.len() * 14 * 24);
        s.push_str(CSV_HEADER);
        s.push('\n');
        for row in &self.rows {
            let vals = row.values();
            for (i, v) in vals.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                write!(s, "{v:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    /// Prefactor 4/ε² in front of the exponential.
    pub constant: f64,
    pub bound: Vec<f64>,
    /// max_t H1F(t) / bound(t).
    pub worst_ratio: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests;
