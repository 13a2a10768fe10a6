//! Exact solutions used as verification oracles: stationary two-phase weak
//! solutions of the 1-D system and single-mode solutions of its linear
//! version.
//!
//! The discontinuous two-phase solutions are checked analytically and never
//! handed to the spectral solver; interpolating a jump would pollute every
//! spectral diagnostic with Gibbs oscillations.

mod dispersion;
mod oscillation;

pub use dispersion::{
    dispersion_roots, verify_linear_decay, DecayFit, DispersionRoots, LinearDecay, FIT_TOLERANCE,
};
pub use oscillation::{
    common_stress_spread, verify_classical_residual, verify_rankine_hugoniot, weak_limits, OscillationFamily,
    Phase, RankineHugoniotReport, WeakLimits, INTERFACE_GAP, WEAK_LIMIT_LADDER,
};

use std::fmt::Write as _;

/// One named comparison of a residual against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub id: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn new(id: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        OracleCheck { id: id.into(), residual, tolerance }
    }

    /// NaN residuals fail.
    pub fn pass(&self) -> bool {
        self.residual <= self.tolerance
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

pub const CHECK_CSV_HEADER: &str = "check,residual,tolerance,verdict";

pub fn checks_to_csv(checks: &[OracleCheck]) -> String {
    let mut s = String::from(CHECK_CSV_HEADER);
    s.push('\n');
    for c in checks {
        writeln!(s, "{},{:.16e},{:.16e},{}", c.id, c.residual, c.tolerance, c.verdict()).unwrap();
    }
    s
}

/// Text summary, one `id residual tolerance verdict` line per check.
pub fn checks_summary(checks: &[OracleCheck]) -> String {
    let mut s = String::new();
    for c in checks {
        writeln!(s, "{} {:.3e} {:.3e} {}", c.id, c.residual, c.tolerance, c.verdict()).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_residual_fails() {
        assert!(!OracleCheck::new("x", f64::NAN, 1.0).pass());
        assert!(OracleCheck::new("x", 1.0, 1.0).pass());
    }

    #[test]
    fn csv_rows() {
        let csv = checks_to_csv(&[OracleCheck::new("rh", 0.0, 1e-12), OracleCheck::new("gap", 2.0, 1e-3)]);
        assert_eq!(
            csv,
            "check,residual,tolerance,verdict\n\
             rh,0.0000000000000000e0,9.9999999999999998e-13,PASS\n\
             gap,2.0000000000000000e0,1.0000000000000000e-3,FAIL\n"
        );
    }
}
