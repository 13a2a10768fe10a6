//! One-dimensional stress laws whose two monotone branches share a common
//! value, `a + σ(ta) = b + σ(tb)` for `t ∈ [1, 2]`.
//!
//! The branch on `[b, 2b]` is supplied; the branch on `[a, 2a]` follows from
//! the identity, a cubic Hermite join fills `(2a, b)` and the law is extended
//! affinely outside `[a, 2b]`. The result is C¹ and non-monotone.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    CubicHermite,
}

/// Polynomial piece σ(u) = poly(u − origin).
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub origin: f64,
    pub poly: Polynomial,
}

impl Segment {
    #[inline]
    fn eval(&self, u: f64) -> f64 {
        self.poly.eval(u - self.origin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseStress1D {
    a: f64,
    b: f64,
    theta: f64,
    /// Breakpoints `[a, 2a, b, 2b]`.
    knots: Vec<f64>,
    /// One piece per interval: (−∞,a], [a,2a], [2a,b], [b,2b], [2b,∞).
    segments: Vec<Segment>,
    slopes: Vec<Segment>,
    primitives: Vec<Segment>,
    /// ∫₀^{knot} σ for every knot.
    knot_energy: Vec<f64>,
}

/// Samples used when checking the shared-value identity.
pub const IDENTITY_GRID: usize = 10_000;

impl PiecewiseStress1D {
    /// Builds the law from the branch `sigma_right` prescribed on `[b, 2b]`.
    pub fn build(a: f64, b: f64, theta: f64, sigma_right: &Polynomial, interp: Interpolation) -> Result<Self> {
        let Interpolation::CubicHermite = interp;
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Rejected(format!("need 0 < a, got a = {a}")));
        }
        if 2.0 * a >= b {
            return Err(Error::Rejected(format!(
                "ordering 0 < a < 2a < b < 2b violated: 2a = {} >= b = {b}",
                2.0 * a
            )));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Rejected(format!("volume fraction must lie in (0,1), got {theta}")));
        }
        let right_slope = sigma_right.derivative();
        let (min_slope, at) = min_on_interval(&right_slope, b, 2.0 * b);
        if min_slope <= 0.0 {
            return Err(Error::Rejected(format!(
                "sigma_right must be strictly increasing on [{b}, {}]; slope {min_slope} at u = {at}",
                2.0 * b
            )));
        }

        // σ(u) = (b − a) + σ_R(u b / a) on [a, 2a]
        let left_branch = sigma_right.rescaled(b / a).plus_constant(b - a);
        let d_left = left_branch.derivative();

        let (x0, x1) = (2.0 * a, b);
        let h = x1 - x0;
        let (p0, m0) = (left_branch.eval(x0), d_left.eval(x0));
        let (p1, m1) = (sigma_right.eval(x1), right_slope.eval(x1));
        let join = Polynomial::new(vec![
            p0,
            m0,
            (-3.0 * p0 - 2.0 * h * m0 + 3.0 * p1 - h * m1) / (h * h),
            (2.0 * p0 + h * m0 - 2.0 * p1 + h * m1) / (h * h * h),
        ]);

        let (sa, da) = (left_branch.eval(a), d_left.eval(a));
        let (sb2, db2) = (sigma_right.eval(2.0 * b), right_slope.eval(2.0 * b));

        let segments = vec![
            Segment { origin: a, poly: Polynomial::linear(sa, da) },
            Segment { origin: 0.0, poly: left_branch },
            Segment { origin: x0, poly: join },
            Segment { origin: 0.0, poly: sigma_right.clone() },
            Segment { origin: 2.0 * b, poly: Polynomial::linear(sb2, db2) },
        ];
        Self::from_parts(a, b, theta, vec![a, 2.0 * a, b, 2.0 * b], segments)
    }

    /// The law of the worked example: a = 1, b = 3, σ(u) = u on [3, 6].
    pub fn reference() -> Self {
        Self::build(1.0, 3.0, 0.5, &Polynomial::linear(0.0, 1.0), Interpolation::CubicHermite)
            .expect("reference construction is valid")
    }

    fn from_parts(a: f64, b: f64, theta: f64, knots: Vec<f64>, segments: Vec<Segment>) -> Result<Self> {
        if knots.len() + 1 != segments.len() || knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("knots must be increasing with one more segment than knots".into()));
        }
        let slopes = segments
            .iter()
            .map(|s| Segment { origin: s.origin, poly: s.poly.derivative() })
            .collect();
        let primitives: Vec<Segment> = segments
            .iter()
            .map(|s| Segment { origin: s.origin, poly: s.poly.antiderivative() })
            .collect();
        let mut law = PiecewiseStress1D {
            a,
            b,
            theta,
            knots,
            segments,
            slopes,
            primitives,
            knot_energy: Vec::new(),
        };
        law.knot_energy = law.knots.iter().map(|&k| law.integral(0.0, k)).collect();
        Ok(law)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    #[inline]
    fn locate(&self, u: f64) -> usize {
        self.knots.iter().take_while(|&&k| u >= k).count()
    }

    #[inline]
    pub fn sigma(&self, u: f64) -> f64 {
        self.segments[self.locate(u)].eval(u)
    }

    #[inline]
    pub fn sigma_prime(&self, u: f64) -> f64 {
        self.slopes[self.locate(u)].eval(u)
    }

    fn piece_integral(&self, seg: usize, x0: f64, x1: f64) -> f64 {
        let p = &self.primitives[seg];
        p.eval(x1) - p.eval(x0)
    }

    /// ∫_{x0}^{x1} σ(u) du, exact piece by piece.
    pub fn integral(&self, x0: f64, x1: f64) -> f64 {
        if x1 < x0 {
            return -self.integral(x1, x0);
        }
        let mut total = 0.0;
        let mut lo = x0;
        let mut seg = self.locate(x0);
        loop {
            let hi = if seg < self.knots.len() { self.knots[seg].min(x1) } else { x1 };
            if hi > lo {
                total += self.piece_integral(seg, lo, hi);
                lo = hi;
            }
            if lo >= x1 || seg >= self.knots.len() {
                break;
            }
            seg += 1;
        }
        total
    }

    /// Stored energy W(u) = ∫₀ᵘ σ.
    #[inline]
    pub fn energy(&self, u: f64) -> f64 {
        let seg = self.locate(u);
        if seg == 0 {
            self.knot_energy[0] - self.piece_integral(0, u, self.knots[0])
        } else {
            self.knot_energy[seg - 1] + self.piece_integral(seg, self.knots[seg - 1], u)
        }
    }

    /// Common value S(t) = a + σ(ta).
    pub fn common_value(&self, t: f64) -> f64 {
        self.a + self.sigma(t * self.a)
    }

    /// max over t ∈ [1,2] of |(a + σ(ta)) − (b + σ(tb))| on a uniform grid.
    pub fn identity_residual(&self, points: usize) -> f64 {
        (0..points)
            .map(|j| 1.0 + j as f64 / (points - 1) as f64)
            .map(|t| ((self.a + self.sigma(t * self.a)) - (self.b + self.sigma(t * self.b))).abs())
            .fold(0.0, f64::max)
    }

    /// Largest value jump of σ or σ′ across the knots.
    pub fn continuity_defect(&self) -> f64 {
        self.knots
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let dv = (self.segments[i].eval(k) - self.segments[i + 1].eval(k)).abs();
                let ds = (self.slopes[i].eval(k) - self.slopes[i + 1].eval(k)).abs();
                dv.max(ds)
            })
            .fold(0.0, f64::max)
    }

    /// Minimum of σ′ over the whole line.
    pub fn min_slope(&self) -> f64 {
        let mut m = self.slopes[0].poly.eval(0.0).min(self.slopes[4].poly.eval(0.0));
        for i in 1..4 {
            let s = &self.slopes[i];
            let (v, _) = min_on_interval(&s.poly, self.knots[i - 1] - s.origin, self.knots[i] - s.origin);
            m = m.min(v);
        }
        m
    }

    /// Infimum of W over the real line (−∞ if W is unbounded below).
    pub fn energy_lower_bound(&self) -> f64 {
        let left = &self.segments[0].poly;
        let right = &self.segments[4].poly;
        let left_slope = left.coeffs().get(1).copied().unwrap_or(0.0);
        let right_slope = right.coeffs().get(1).copied().unwrap_or(0.0);
        // W → +∞ at both ends iff σ → −∞ on the left and +∞ on the right
        if left_slope <= 0.0 && left.eval(0.0) >= 0.0 || right_slope <= 0.0 && right.eval(0.0) <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut candidates = vec![];
        // roots of σ: affine tails exactly, interior pieces by bracketing
        if left_slope > 0.0 {
            let r = self.knots[0] - left.eval(0.0) / left_slope;
            if r <= self.knots[0] {
                candidates.push(r);
            }
        }
        if right_slope > 0.0 {
            let r = self.knots[3] - right.eval(0.0) / right_slope;
            if r >= self.knots[3] {
                candidates.push(r);
            }
        }
        for i in 1..4 {
            let (lo, hi) = (self.knots[i - 1], self.knots[i]);
            let samples = 512;
            let mut prev = (lo, self.sigma(lo));
            for j in 1..=samples {
                let u = lo + (hi - lo) * j as f64 / samples as f64;
                let s = self.sigma(u);
                if prev.1 <= 0.0 && s >= 0.0 {
                    candidates.push(bisect(|x| self.sigma(x), prev.0, u));
                }
                prev = (u, s);
            }
        }
        candidates.push(self.knots[0]);
        candidates.iter().map(|&u| self.energy(u)).fold(f64::INFINITY, f64::min)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let fmt = |x: f64| format!("{x:.17e}");
        writeln!(s, "kind = piecewise_stress_1d").unwrap();
        writeln!(s, "a = {}", fmt(self.a)).unwrap();
        writeln!(s, "b = {}", fmt(self.b)).unwrap();
        writeln!(s, "theta = {}", fmt(self.theta)).unwrap();
        let knots: Vec<String> = self.knots.iter().map(|&k| fmt(k)).collect();
        writeln!(s, "knots = {}", knots.join(" ")).unwrap();
        for (i, seg) in self.segments.iter().enumerate() {
            let coeffs: Vec<String> = seg.poly.coeffs().iter().map(|&c| fmt(c)).collect();
            writeln!(s, "segment{i} = {} | {}", fmt(seg.origin), coeffs.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut a = None;
        let mut b = None;
        let mut theta = None;
        let mut knots = None;
        let mut segments: Vec<(usize, Segment)> = Vec::new();
        let num = |s: &str, line: usize| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|e| Error::Format(format!("line {line}: {e}")))
        };
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("line {}: expected key = value", ln + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "kind" if value == "piecewise_stress_1d" => {}
                "a" => a = Some(num(value, ln + 1)?),
                "b" => b = Some(num(value, ln + 1)?),
                "theta" => theta = Some(num(value, ln + 1)?),
                "knots" => {
                    knots = Some(value.split_whitespace().map(|v| num(v, ln + 1)).collect::<Result<Vec<_>>>()?)
                }
                k if k.starts_with("segment") => {
                    let idx: usize = k["segment".len()..]
                        .parse()
                        .map_err(|_| Error::Format(format!("line {}: bad segment key {k}", ln + 1)))?;
                    let (origin, coeffs) = value
                        .split_once('|')
                        .ok_or_else(|| Error::Format(format!("line {}: expected origin | coeffs", ln + 1)))?;
                    let coeffs =
                        coeffs.split_whitespace().map(|v| num(v, ln + 1)).collect::<Result<Vec<_>>>()?;
                    segments.push((idx, Segment { origin: num(origin, ln + 1)?, poly: Polynomial::new(coeffs) }));
                }
                other => return Err(Error::Format(format!("line {}: unknown key {other}", ln + 1))),
            }
        }
        segments.sort_by_key(|(i, _)| *i);
        if segments.iter().enumerate().any(|(j, (i, _))| *i != j) {
            return Err(Error::Format("segments must be numbered 0..n without gaps".into()));
        }
        let missing = |name: &str| Error::Format(format!("missing key {name}"));
        Self::from_parts(
            a.ok_or_else(|| missing("a"))?,
            b.ok_or_else(|| missing("b"))?,
            theta.ok_or_else(|| missing("theta"))?,
            knots.ok_or_else(|| missing("knots"))?,
            segments.into_iter().map(|(_, s)| s).collect(),
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) <= 0.0) == (flo <= 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Minimum of a polynomial on [lo, hi] with its location. Exact up to
/// degree 2, sampled and refined by golden-section search otherwise.
pub(crate) fn min_on_interval(p: &Polynomial, lo: f64, hi: f64) -> (f64, f64) {
    let mut best = if p.eval(lo) <= p.eval(hi) { (p.eval(lo), lo) } else { (p.eval(hi), hi) };
    let c = p.coeffs();
    if p.degree() <= 2 {
        if p.degree() == 2 && c[2] > 0.0 {
            let v = -c[1] / (2.0 * c[2]);
            if v > lo && v < hi && p.eval(v) < best.0 {
                best = (p.eval(v), v);
            }
        }
        return best;
    }
    let samples = 4096;
    let step = (hi - lo) / samples as f64;
    for j in 0..=samples {
        let u = lo + step * j as f64;
        let val = p.eval(u);
        if val < best.0 {
            best = (val, u);
        }
    }
    let (mut x0, mut x1) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let m0 = x1 - g * (x1 - x0);
        let m1 = x0 + g * (x1 - x0);
        if p.eval(m0) < p.eval(m1) {
            x1 = m1;
        } else {
            x0 = m0;
        }
    }
    let x = 0.5 * (x0 + x1);
    if p.eval(x) < best.0 {
        best = (p.eval(x), x);
    }
    best
}
