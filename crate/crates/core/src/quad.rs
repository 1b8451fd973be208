//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

pub const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute error `tol`.
///
/// The integrand may fail (e.g. a density evaluated off its domain); the
/// first error is returned unchanged.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::param("quadrature needs finite bounds and tol > 0"));
    }
    if a == b {
        return Ok(0.0);
    }
    // A few initial panels keep symmetric integrands from fooling the
    // first error estimate.
    const PANELS: usize = 8;
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for k in 0..PANELS {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == PANELS { b } else { lo + h };
        let fa = f(lo)?;
        let fb = f(hi)?;
        let m = 0.5 * (lo + hi);
        let fm = f(m)?;
        let whole = simpson(lo, hi, fa, fm, fb);
        total += refine(&f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, 0)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Below this the estimate is dominated by rounding.
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= 15.0 * tol.max(floor) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH || lm <= a || rm >= b {
        return Err(Error::QuadratureFailure { a, b, depth });
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)?)
}
