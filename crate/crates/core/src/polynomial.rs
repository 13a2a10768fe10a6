/// Real polynomial in monomial form, `coeffs[j]` multiplies `u^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Polynomial { coeffs };
        while p.coeffs.len() > 1 && *p.coeffs.last().unwrap() == 0.0 {
            p.coeffs.pop();
        }
        if p.coeffs.is_empty() {
            p.coeffs.push(0.0);
        }
        p
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        Polynomial::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(j, c)| j as f64 * c).collect())
    }

    /// Antiderivative vanishing at `u = 0`.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = vec![0.0];
        out.extend(self.coeffs.iter().enumerate().map(|(j, c)| c / (j as f64 + 1.0)));
        Polynomial::new(out)
    }

    /// p(s·u) as a polynomial in u.
    pub fn rescaled(&self, s: f64) -> Polynomial {
        let mut pow = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * pow;
                pow *= s;
                out
            })
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn plus_constant(&self, c: f64) -> Polynomial {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Polynomial::new(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calculus_round_trip() {
        let p = Polynomial::new(vec![1.0, -2.0, 0.5, 3.0]);
        let back = p.antiderivative().derivative();
        assert_eq!(back, p);
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 2.0 + 24.0);
    }

    #[test]
    fn rescale_substitutes_argument() {
        let p = Polynomial::new(vec![0.0, 1.0, 1.0]);
        let q = p.rescaled(3.0);
        assert!((q.eval(0.7) - p.eval(2.1)).abs() < 1e-14);
    }
}
