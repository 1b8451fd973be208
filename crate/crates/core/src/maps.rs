//! Entire-function families: evaluation, closed-form derivatives and
//! singular values.
//!
//! Every evaluation goes through a *scaled* representation
//! `f(z) = m · e^s` (see [`Scaled`]) so that callers which only need
//! `log|f|` or `f'/f` (the sector tests) never overflow, while [`EntireMap::eval`]
//! and [`EntireMap::deriv`] refuse to return anything larger than
//! [`OVERFLOW_MODULUS`].

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Any intermediate modulus above this aborts with [`Error::EscapedToInfinity`].
pub const OVERFLOW_MODULUS: f64 = 1e300;

/// `sinh(z)/z` switches to its Taylor series below this modulus.
pub const SINH_TAYLOR_RADIUS: f64 = 1e-4;

/// Number of periods `y ∈ (0, Nπ]` (equivalently `t = y² ∈ (0, (Nπ)²]`)
/// scanned for critical points of `sin(√t)/√t`.
pub const SINH_WINDOW_PERIODS: usize = 64;

/// Critical points of a truncated product are only trusted where the tail
/// estimate `Σ_{n>N} |t|/x_n` stays below this budget.
pub const LP_TAIL_BUDGET: f64 = 0.5;

const BISECTION_TOL: f64 = 1e-12;

fn ln_overflow() -> f64 {
    OVERFLOW_MODULUS.ln()
}

/// Zero sequence `x_n = scale · n^exponent`, `n = 1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRule {
    pub scale: f64,
    pub exponent: f64,
}

impl ZeroRule {
    pub fn new(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param("zero-rule scale must be positive"));
        }
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::param("zero-rule exponent must be positive"));
        }
        Ok(Self { scale, exponent })
    }

    pub fn zero(&self, n: usize) -> f64 {
        self.scale * (n as f64).powf(self.exponent)
    }

    pub fn zeros(&self, count: usize) -> Vec<f64> {
        (1..=count).map(|n| self.zero(n)).collect()
    }

    /// Upper bound for `Σ_{n>N} 1/x_n` by comparison with `∫_N^∞`; infinite
    /// when the series diverges.
    pub fn tail_reciprocal_sum(&self, n: usize) -> f64 {
        if self.exponent <= 1.0 {
            return f64::INFINITY;
        }
        let p = self.exponent;
        1.0 / (self.scale * (p - 1.0) * (n as f64).powf(p - 1.0))
    }
}

impl fmt::Display for ZeroRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*n^{}", self.scale, self.exponent)
    }
}

/// The supported families.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `e^z`.
    Exp,
    /// `λ·sinh(z)/z + a`.
    SinhOverZ { lambda: f64, a: f64 },
    /// `Π_{n ≤ N} (1 + z/x_n)` with `0 < x_1 ≤ x_2 ≤ …`. `rule` is kept when
    /// the zeros came from a [`ZeroRule`] so the truncation tail can be
    /// quantified.
    LpProduct { zeros: Vec<f64>, rule: Option<ZeroRule> },
    /// `base ∘ poly`.
    PolyPrecomposed { base: Box<EntireMap>, poly: Polynomial },
}

/// A member of one of the supported entire-function families.
///
/// Values are immutable; all methods are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct EntireMap {
    family: Family,
    is_real: bool,
}

/// `f(z) = value · e^{log_scale}` and `f'(z) = deriv · e^{log_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: Complex64,
    pub deriv: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    fn plain(value: Complex64, deriv: Complex64) -> Self {
        Self { value, deriv, log_scale: 0.0 }
    }

    /// `log|f(z)|`; `-inf` at zeros.
    pub fn log_abs(&self) -> f64 {
        self.value.norm().ln() + self.log_scale
    }

    /// `f'(z)/f(z)`.
    pub fn log_derivative(&self) -> Complex64 {
        cdiv(self.deriv, self.value)
    }

    pub fn value(&self) -> Result<Complex64> {
        unscale(self.value, self.log_scale)
    }

    pub fn derivative(&self) -> Result<Complex64> {
        unscale(self.deriv, self.log_scale)
    }
}

/// `a/b` without forming `|b|²`, which overflows once `|b| > 1e154`.
pub(crate) fn cdiv(a: Complex64, b: Complex64) -> Complex64 {
    let s = b.norm();
    (a / s) * (b.conj() / s)
}

fn unscale(m: Complex64, log_scale: f64) -> Result<Complex64> {
    let r = m.norm();
    if !r.is_finite() || !log_scale.is_finite() && log_scale > 0.0 {
        return Err(Error::EscapedToInfinity { log_modulus: f64::INFINITY, phase: phase_of(m) });
    }
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let log_modulus = r.ln() + log_scale;
    if log_modulus > ln_overflow() {
        return Err(Error::EscapedToInfinity { log_modulus, phase: m / r });
    }
    if log_scale == 0.0 {
        Ok(m)
    } else {
        Ok(m / r * log_modulus.exp())
    }
}

fn phase_of(m: Complex64) -> Complex64 {
    let r = m.norm();
    if r.is_finite() && r > 0.0 {
        m / r
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// Singular values together with a radius enclosing all of them.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSet {
    pub values: Vec<Complex64>,
    /// `max |s| + 1`, so `|s| < radius_bound` for every listed `s`.
    pub radius_bound: f64,
}

impl SingularSet {
    fn from_values(values: Vec<Complex64>) -> Self {
        let max = values.iter().map(|s| s.norm()).fold(0.0, f64::max);
        Self { values, radius_bound: max + 1.0 }
    }

    /// Singular values lying on the real axis (imaginary part below `1e-12`).
    pub fn real_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().filter(|s| s.im.abs() <= 1e-12 * (1.0 + s.re.abs())).map(|s| s.re)
    }
}

impl EntireMap {
    pub fn exp() -> Self {
        Self { family: Family::Exp, is_real: true }
    }

    pub fn sinh_over_z(lambda: f64, a: f64) -> Result<Self> {
        if !(lambda.is_finite() && a.is_finite()) {
            return Err(Error::param("lambda and a must be finite"));
        }
        if lambda == 0.0 {
            return Err(Error::param("lambda must be nonzero"));
        }
        Ok(Self { family: Family::SinhOverZ { lambda, a }, is_real: true })
    }

    /// Truncated Laguerre–Pólya product with the given (positive,
    /// nondecreasing) zeros `x_n`; `f` vanishes at `-x_n`.
    pub fn lp_product(zeros: Vec<f64>) -> Result<Self> {
        Self::lp_checked(zeros, None)
    }

    pub fn lp_from_rule(rule: ZeroRule, truncation: usize) -> Result<Self> {
        Self::lp_checked(rule.zeros(truncation), Some(rule))
    }

    fn lp_checked(zeros: Vec<f64>, rule: Option<ZeroRule>) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::param("product needs at least one zero"));
        }
        if zeros.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::param("zeros x_n must be positive and finite"));
        }
        if zeros.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("zeros x_n must be nondecreasing"));
        }
        Ok(Self { family: Family::LpProduct { zeros, rule }, is_real: true })
    }

    /// `self ∘ poly`. The polynomial must have degree at least one.
    pub fn precompose_poly(&self, poly: Polynomial) -> Result<Self> {
        if poly.degree() == 0 {
            return Err(Error::param("precomposition needs a polynomial of degree >= 1"));
        }
        Ok(Self {
            is_real: self.is_real,
            family: Family::PolyPrecomposed { base: Box::new(self.clone()), poly },
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `f(ℝ) ⊂ ℝ`.
    pub fn is_real(&self) -> bool {
        self.is_real
    }

    /// Scaled value and derivative; never overflows for finite `z` except
    /// when a precomposed polynomial itself exceeds [`OVERFLOW_MODULUS`].
    pub fn scaled(&self, z: Complex64) -> Result<Scaled> {
        if !z.is_finite() {
            return Err(Error::param("argument must be finite"));
        }
        match &self.family {
            Family::Exp => {
                let phase = Complex64::from_polar(1.0, z.im);
                Ok(Scaled { value: phase, deriv: phase, log_scale: z.re })
            }
            Family::SinhOverZ { lambda, a } => Ok(sinh_over_z_scaled(*lambda, *a, z)),
            Family::LpProduct { zeros, .. } => Ok(lp_scaled(zeros, z)),
            Family::PolyPrecomposed { base, poly } => {
                let (q, dq) = poly.eval_with_derivative(z);
                if !(q.norm() <= OVERFLOW_MODULUS && dq.norm() <= OVERFLOW_MODULUS) {
                    let lead = *poly.coeffs().last().unwrap();
                    let deg = poly.degree() as i32;
                    let log_modulus = lead.abs().ln() + deg as f64 * z.norm().ln();
                    let phase = phase_of(Complex64::new(lead.signum(), 0.0) * phase_of(z).powi(deg));
                    return Err(Error::EscapedToInfinity { log_modulus, phase });
                }
                let inner = base.scaled(q)?;
                Ok(Scaled { value: inner.value, deriv: inner.deriv * dq, log_scale: inner.log_scale })
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.scaled(z)?.value()
    }

    pub fn deriv(&self, z: Complex64) -> Result<Complex64> {
        self.scaled(z)?.derivative()
    }

    /// `Σ_{n>N} |z|/x_n` for products built from a convergent [`ZeroRule`]
    /// (evaluated at `p(z)` for precomposed maps). This bounds
    /// `|log f(z) − log f_N(z)|` to first order. `None` for families without
    /// truncation, or when the tail is unknown.
    pub fn truncation_tail(&self, z: Complex64) -> Option<f64> {
        match &self.family {
            Family::LpProduct { zeros, rule: Some(rule) } => {
                let t = rule.tail_reciprocal_sum(zeros.len());
                t.is_finite().then(|| z.norm() * t)
            }
            Family::PolyPrecomposed { base, poly } => base.truncation_tail(poly.eval(z)),
            _ => None,
        }
    }

    /// Critical and asymptotic values. See the module constants for the
    /// search windows used by each family.
    pub fn singular_values(&self) -> Result<SingularSet> {
        let values = match &self.family {
            Family::Exp => vec![Complex64::new(0.0, 0.0)],
            Family::SinhOverZ { lambda, a } => sinh_singular_values(*lambda, *a)?,
            Family::LpProduct { zeros, rule } => lp_singular_values(self, zeros, rule.as_ref())?,
            Family::PolyPrecomposed { base, poly } => {
                let mut values = base.singular_values()?.values;
                for c in poly.critical_points() {
                    match self.eval(c) {
                        Ok(v) => values.push(v),
                        Err(e) => return Err(e),
                    }
                }
                values
            }
        };
        Ok(SingularSet::from_values(values))
    }
}

impl fmt::Display for EntireMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Exp => write!(f, "exp"),
            Family::SinhOverZ { lambda, a } => write!(f, "sinh-over-z(lambda={lambda},a={a})"),
            Family::LpProduct { zeros, rule: Some(rule) } => {
                write!(f, "lp(zeros={rule},N={})", zeros.len())
            }
            Family::LpProduct { zeros, rule: None } => write!(f, "lp(N={})", zeros.len()),
            Family::PolyPrecomposed { base, poly } => write!(f, "{base}∘poly({poly})"),
        }
    }
}

fn sinh_over_z_scaled(lambda: f64, a: f64, z: Complex64) -> Scaled {
    if z.norm() < SINH_TAYLOR_RADIUS {
        let t = z * z;
        let g = 1.0 + t / 6.0 + t * t / 120.0;
        let dg = z / 3.0 + z * t / 30.0;
        return Scaled::plain(lambda * g + a, lambda * dg);
    }
    if z.re.abs() <= 600.0 {
        let (s, c) = (z.sinh(), z.cosh());
        let s_over_z = cdiv(s, z);
        return Scaled::plain(lambda * s_over_z + a, lambda * cdiv(c - s_over_z, z));
    }
    // |Re z| > 600: factor out e^{|Re z|}; the e^{-2|Re z|} remainder underflows.
    let sign = z.re.signum();
    let log_scale = z.re.abs();
    let phase = Complex64::from_polar(1.0, sign * z.im);
    let sinh_m = sign * phase / 2.0;
    let cosh_m = phase / 2.0;
    let s_over_z = cdiv(sinh_m, z);
    Scaled {
        value: lambda * s_over_z + a * (-log_scale).exp(),
        deriv: lambda * cdiv(cosh_m - s_over_z, z),
        log_scale,
    }
}

/// Product rule accumulated factor by factor, renormalising to keep both
/// the value and the derivative representable.
fn lp_scaled(zeros: &[f64], z: Complex64) -> Scaled {
    let mut p = Complex64::new(1.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut log_scale = 0.0;
    for &x in zeros {
        let factor = 1.0 + z / x;
        dp = dp * factor + p / x;
        p *= factor;
        let m = p.norm().max(dp.norm());
        if m > 1e100 {
            p /= m;
            dp /= m;
            log_scale += m.ln();
        }
    }
    Scaled { value: p, deriv: dp, log_scale }
}

/// Bisection for a sign change of `g` on `[lo, hi]`, assuming
/// `g(lo)` and `g(hi)` have opposite signs.
fn bisect(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: bool) -> f64 {
    let g_lo = g(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let scale = if rel_tol { mid.abs().max(1.0) } else { 1.0 };
        if (hi - lo) <= BISECTION_TOL * scale || mid == lo || mid == hi {
            break;
        }
        let g_mid = g(mid);
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sinh_singular_values(lambda: f64, a: f64) -> Result<Vec<Complex64>> {
    // z = 0 is critical (f even) with value λ + a; a is the asymptotic value
    // along the imaginary axis. The remaining critical points are z = iy with
    // tan y = y, i.e. critical points t = y² of sin(√t)/√t.
    let mut values = vec![Complex64::new(a, 0.0), Complex64::new(lambda + a, 0.0)];
    let h = |y: f64| y * y.cos() - y.sin();
    let mut missing = Vec::new();
    for k in 1..SINH_WINDOW_PERIODS {
        let (lo, hi) = (k as f64 * PI, (k + 1) as f64 * PI);
        let sub = 16;
        let step = (hi - lo) / sub as f64;
        let mut found = false;
        for j in 0..sub {
            let (u, v) = (lo + j as f64 * step, lo + (j + 1) as f64 * step);
            if (h(u) > 0.0) != (h(v) > 0.0) {
                let y = bisect(h, u, v, false);
                values.push(Complex64::new(lambda * y.sin() / y + a, 0.0));
                found = true;
            }
        }
        if !found {
            missing.push((lo * lo, hi * hi));
        }
    }
    if !missing.is_empty() {
        return Err(Error::IncompleteSingularSet { windows: missing });
    }
    Ok(values)
}

fn lp_singular_values(map: &EntireMap, zeros: &[f64], rule: Option<&ZeroRule>) -> Result<Vec<Complex64>> {
    let tail = rule.map(|r| r.tail_reciprocal_sum(zeros.len()));
    // Trusted window: |t| · Σ_{n>N} 1/x_n ≤ budget; the whole window
    // [-1.05·x_N, 0] without a rule.
    let t_limit = match tail {
        Some(t) if t.is_finite() && t > 0.0 => LP_TAIL_BUDGET / t,
        _ => 1.05 * zeros[zeros.len() - 1],
    };
    let log_der = |t: f64| zeros.iter().map(|x| 1.0 / (x + t)).sum::<f64>();
    let mut values = Vec::new();
    let mut failed = Vec::new();
    for w in zeros.windows(2) {
        let (near, far) = (w[0], w[1]);
        if far > t_limit {
            break;
        }
        if near == far {
            values.push(Complex64::new(0.0, 0.0));
            continue;
        }
        // On (-far, -near) the log-derivative falls from +inf to -inf.
        let eps = (far - near) * 1e-9;
        let (lo, hi) = (-far + eps, -near - eps);
        if !(log_der(lo) > 0.0 && log_der(hi) < 0.0) {
            failed.push((-far, -near));
            continue;
        }
        let t = bisect(log_der, lo, hi, true);
        values.push(map.eval(Complex64::new(t, 0.0))?);
    }
    if !failed.is_empty() {
        return Err(Error::IncompleteSingularSet { windows: failed });
    }
    // Convergent products of order ≥ 1/2 tend to 0 along the negative axis.
    if let Some(r) = rule {
        if r.exponent > 1.0 && r.exponent <= 2.0 {
            values.push(Complex64::new(0.0, 0.0));
        }
    }
    if values.is_empty() {
        return Err(Error::IncompleteSingularSet { windows: vec![(-t_limit, 0.0)] });
    }
    Ok(values)
}
