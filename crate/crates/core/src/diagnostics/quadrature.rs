//! Cumulative time integrals of sampled series.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QuadratureRule {
    /// Composite trapezoid, O(H²).
    Trapezoid,
    /// Each interval integrates the cubic through the four nearest samples,
    /// O(H⁴) on smooth data, valid on non-uniform grids.
    #[default]
    FourthOrder,
}

impl std::str::FromStr for QuadratureRule {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "trapezoid" => Ok(QuadratureRule::Trapezoid),
            "fourth_order" => Ok(QuadratureRule::FourthOrder),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown quadrature `{other}` (expected trapezoid or fourth_order)"
            ))),
        }
    }
}

/// ∫_{t_0}^{t_j} f for every j; `t` strictly increasing.
pub fn cumulative_integral(t: &[f64], f: &[f64], rule: QuadratureRule) -> Vec<f64> {
    assert_eq!(t.len(), f.len());
    let n = t.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let stencil = match rule {
        QuadratureRule::Trapezoid => 2,
        QuadratureRule::FourthOrder => n.min(4),
    };
    // two-point Gauss rule is exact for the cubic interpolant
    let g = 0.5 / 3f64.sqrt();
    for i in 0..n - 1 {
        let (a, b) = (t[i], t[i + 1]);
        let h = b - a;
        let piece = if stencil == 2 {
            0.5 * h * (f[i] + f[i + 1])
        } else {
            let s = i.saturating_sub(1).min(n - stencil);
            let nodes = &t[s..s + stencil];
            let vals = &f[s..s + stencil];
            let mid = 0.5 * (a + b);
            let x1 = mid - g * h;
            let x2 = mid + g * h;
            0.5 * h * (lagrange(nodes, vals, x1) + lagrange(nodes, vals, x2))
        };
        out[i + 1] = out[i] + piece;
    }
    out
}

fn lagrange(nodes: &[f64], vals: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    for (i, (&xi, &fi)) in nodes.iter().zip(vals).enumerate() {
        let mut w = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                w *= (x - xj) / (xi - xj);
            }
        }
        sum += w * fi;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics_on_uneven_grid() {
        let t = [0.0, 0.1, 0.25, 0.3, 0.5, 0.55, 0.9];
        let p = |x: f64| 1.0 - 2.0 * x + 3.0 * x * x - 4.0 * x * x * x;
        let prim = |x: f64| x - x * x + x.powi(3) - x.powi(4);
        let f: Vec<f64> = t.iter().map(|&x| p(x)).collect();
        let out = cumulative_integral(&t, &f, QuadratureRule::FourthOrder);
        for (j, &x) in t.iter().enumerate() {
            assert!((out[j] - prim(x)).abs() < 1e-15, "j={j}");
        }
    }

    #[test]
    fn fourth_order_convergence_on_exponential() {
        let err = |m: usize, rule| {
            let t: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
            let f: Vec<f64> = t.iter().map(|x| (-3.0 * x).exp()).collect();
            let out = cumulative_integral(&t, &f, rule);
            (out[m] - (1.0 - (-3.0f64).exp()) / 3.0).abs()
        };
        let r4 = err(80, QuadratureRule::FourthOrder) / err(160, QuadratureRule::FourthOrder);
        let r2 = err(20, QuadratureRule::Trapezoid) / err(40, QuadratureRule::Trapezoid);
        assert!(r4 > 14.0 && r4 < 18.0, "{r4}");
        assert!(r2 > 3.8 && r2 < 4.2, "{r2}");
    }

    #[test]
    fn short_series() {
        assert_eq!(cumulative_integral(&[1.0], &[5.0], QuadratureRule::FourthOrder), vec![0.0]);
        let two = cumulative_integral(&[0.0, 2.0], &[1.0, 3.0], QuadratureRule::FourthOrder);
        assert_eq!(two, vec![0.0, 4.0]);
    }
}
