//! Real-coefficient polynomials used to precompose entire maps.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A polynomial with real coefficients, stored in ascending order
/// (`coeffs[k]` multiplies `z^k`). Trailing zero coefficients are trimmed, so
/// the zero polynomial is never representable.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::param("polynomial coefficients must be finite"));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::param("zero polynomial"));
        }
        Ok(Self { coeffs })
    }

    /// `p(z) = z`.
    pub fn identity() -> Self {
        Self { coeffs: vec![0.0, 1.0] }
    }

    /// `p(z) = z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp) = (zero, zero);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// The derivative polynomial, or `None` for constants.
    pub fn derivative(&self) -> Option<Polynomial> {
        if self.degree() == 0 {
            return None;
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
        Polynomial::new(coeffs).ok()
    }

    /// All complex roots, with multiplicity, by Aberth–Ehrlich iteration.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.coeffs[n];
        if n == 1 {
            return vec![Complex64::new(-self.coeffs[0] / lead, 0.0)];
        }
        // Cauchy bound for the initial circle.
        let bound = 1.0 + self.coeffs[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
        let radius = 0.5 * bound;
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let theta = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(radius, theta)
            })
            .collect();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let (p, dp) = self.eval_with_derivative(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let d = z[i] - z[j];
                        if d.norm() == 0.0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            d.inv()
                        }
                    })
                    .sum();
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        // Snap numerically real roots onto the real axis.
        for r in &mut z {
            if r.im.abs() <= 1e-12 * (1.0 + r.re.abs()) {
                r.im = 0.0;
            }
        }
        z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        z
    }

    /// Roots of `p'`, i.e. the critical points of `p`.
    pub fn critical_points(&self) -> Vec<Complex64> {
        self.derivative().map(|d| d.roots()).unwrap_or_default()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}
