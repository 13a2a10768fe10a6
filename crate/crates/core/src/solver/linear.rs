//! Per-mode linear part of the semi-discrete system.
//!
//! Every retained mode k carries pairs (a_k, y_k) ∈ ℂᵈ × ℂᵈ, where `a` is the
//! momentum variable and `y` the deformation potential. The linear operator
//! acts on each pair through a real 2×2 matrix depending on |k|² only.

/// Real 2×2 matrix `[[m00, m01], [m10, m11]]` acting on (a_k, y_k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block(pub [f64; 4]);

impl Block {
    pub const ZERO: Block = Block([0.0; 4]);
    pub const IDENTITY: Block = Block([1.0, 0.0, 0.0, 1.0]);

    #[inline]
    pub fn apply<T>(&self, a: T, y: T) -> (T, T)
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let m = &self.0;
        (a * m[0] + y * m[1], a * m[2] + y * m[3])
    }

    pub fn add(&self, other: &Block) -> Block {
        let mut m = self.0;
        for (x, y) in m.iter_mut().zip(other.0) {
            *x += y;
        }
        Block(m)
    }

    pub fn scale(&self, s: f64) -> Block {
        Block(self.0.map(|x| x * s))
    }

    pub fn inverse(&self) -> Block {
        let [a, b, c, d] = self.0;
        let det = a * d - b * c;
        Block([d / det, -b / det, -c / det, a / det])
    }

    pub fn mul(&self, other: &Block) -> Block {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = other.0;
        Block([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    /// exp(h·L), stable for stiff decay and valid for defective L.
    pub fn exp(&self, h: f64) -> Block {
        let [a, b, c, d] = self.0;
        if b == 0.0 && c == 0.0 {
            return Block([(a * h).exp(), 0.0, 0.0, (d * h).exp()]);
        }
        // exp(hL) = c0·I + c1·(L − τI), τ = tr L / 2, Δ² = ((a−d)/2)² + bc
        let tau = 0.5 * (a + d);
        let disc = 0.25 * (a - d) * (a - d) + b * c;
        let (c0, c1) = if disc >= 0.0 {
            let delta = disc.sqrt();
            let (ep, em) = (((tau + delta) * h).exp(), ((tau - delta) * h).exp());
            let x = delta * h;
            let c1 = if x > 1e-3 {
                (ep - em) / (2.0 * delta)
            } else {
                (tau * h).exp() * h * (1.0 + x * x / 6.0 + x.powi(4) / 120.0)
            };
            (0.5 * (ep + em), c1)
        } else {
            let omega = (-disc).sqrt();
            let e = (tau * h).exp();
            (e * (omega * h).cos(), e * (omega * h).sin() / omega)
        };
        Block([c0 + c1 * (a - tau), c1 * b, c1 * c, c0 + c1 * (d - tau)])
    }
}

/// How the linear terms of a system are split between the exactly
/// propagated part and the explicit part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearPart {
    /// Viscous damping −ε|k|² on a, coupling y' = a explicit.
    KelvinVoigt { epsilon: f64 },
    /// Viscosity plus the dispersive term −δA|k|⁴ y on a; the whole mode block
    /// is propagated exactly. With δA = 0 this is `KelvinVoigt`.
    DiffusionDispersion { epsilon: f64, delta_a: f64 },
    /// Damping −(ε−κ)|k|² on a and −κ|k|² on y, coupling y' = a explicit.
    Reduced { epsilon: f64, kappa: f64 },
}

impl LinearPart {
    pub fn normalized(self) -> LinearPart {
        match self {
            LinearPart::DiffusionDispersion { epsilon, delta_a } if delta_a == 0.0 => {
                LinearPart::KelvinVoigt { epsilon }
            }
            other => other,
        }
    }

    /// Exactly propagated block for |k|² = `k2` (k ≠ 0).
    pub fn implicit(&self, k2: f64) -> Block {
        match self.normalized() {
            LinearPart::KelvinVoigt { epsilon } => Block([-epsilon * k2, 0.0, 0.0, 0.0]),
            LinearPart::DiffusionDispersion { epsilon, delta_a } => {
                Block([-epsilon * k2, -delta_a * k2 * k2, 1.0, 0.0])
            }
            LinearPart::Reduced { epsilon, kappa } => Block([-(epsilon - kappa) * k2, 0.0, 0.0, -kappa * k2]),
        }
    }

    /// Coefficient of the explicit coupling y' += c·a for k ≠ 0.
    pub fn coupling(&self) -> f64 {
        match self.normalized() {
            LinearPart::DiffusionDispersion { .. } => 0.0,
            _ => 1.0,
        }
    }

    /// Full linear block: implicit part plus the coupling.
    pub fn full(&self, k2: f64) -> Block {
        self.implicit(k2).add(&Block([0.0, 0.0, self.coupling(), 0.0]))
    }
}
