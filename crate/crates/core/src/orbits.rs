//! Orbits, hyperbolic-derivative bookkeeping along them, singular-orbit
//! escape and escape-time grids.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypgeo::{hyp_derivative, ModelDomain};
use crate::maps::EntireMap;

/// Default escape radius, far beyond every singular value of the supported
/// families.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e50;

/// Why an orbit stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    MaxIter,
    /// `|w_step|` exceeded the escape radius (or overflowed while computing
    /// `w_step`). `phase` is the unit direction of the escaping value.
    EscapedToInfinity {
        step: usize,
        log_modulus: f64,
        phase: Complex64,
    },
    /// `w_step` is the first orbit point outside the domain.
    LeftDomain {
        step: usize,
    },
}

/// An orbit `w_0, w_1, …` with the hyperbolic derivatives
/// `η_n = ‖Df(w_n)‖_U` and `log δ_n = Σ_{k<n} log η_k`.
///
/// `etas` and `log_deltas` are empty for plain orbits; for traces from
/// [`delta_sequence`], `log_deltas[0] = 0` and
/// `log_deltas[n + 1] = log_deltas[n] + ln etas[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub points: Vec<Complex64>,
    pub etas: Vec<f64>,
    pub log_deltas: Vec<f64>,
    pub termination: Termination,
}

impl OrbitTrace {
    /// `δ_n = exp(log δ_n)`; may overflow to `inf` under strong expansion.
    pub fn deltas(&self) -> Vec<f64> {
        self.log_deltas.iter().map(|l| l.exp()).collect()
    }

    pub fn last(&self) -> Complex64 {
        *self.points.last().expect("orbit has at least its starting point")
    }
}

fn escape_from_error(step: usize, e: Error) -> Result<Termination> {
    match e {
        Error::EscapedToInfinity { log_modulus, phase } => {
            Ok(Termination::EscapedToInfinity { step, log_modulus, phase })
        }
        other => Err(other),
    }
}

fn escaped_point(step: usize, w: Complex64) -> Termination {
    Termination::EscapedToInfinity { step, log_modulus: w.norm().ln(), phase: w / w.norm() }
}

/// Iterates until `|w_n| > escape_radius`, overflow, or `n_max` steps.
pub fn iterate_orbit(map: &EntireMap, w: Complex64, n_max: usize, escape_radius: f64) -> Result<OrbitTrace> {
    if n_max < 1 {
        return Err(Error::param("n_max must be at least 1"));
    }
    if !(escape_radius > 0.0) {
        return Err(Error::param("escape radius must be positive"));
    }
    if !w.is_finite() {
        return Err(Error::param("starting point must be finite"));
    }
    let mut points = vec![w];
    let mut termination = Termination::MaxIter;
    if w.norm() > escape_radius {
        termination = escaped_point(0, w);
    } else {
        let mut current = w;
        for step in 1..=n_max {
            match map.eval(current) {
                Ok(next) => {
                    points.push(next);
                    current = next;
                    if next.norm() > escape_radius {
                        termination = escaped_point(step, next);
                        break;
                    }
                }
                Err(e) => {
                    termination = escape_from_error(step, e)?;
                    break;
                }
            }
        }
    }
    Ok(OrbitTrace { points, etas: Vec::new(), log_deltas: Vec::new(), termination })
}

/// `δ_n = ‖Df^n(w)‖_U` along the orbit of `w`, accumulated in log-space.
///
/// The sequence is nondecreasing whenever `f^{-1}(U) ⊂ U` and
/// `f : f^{-1}(U) → U` is a covering; this holds for `e^z` on the standard
/// slit plane and is not checked here.
pub fn delta_sequence(
    map: &EntireMap,
    domain: ModelDomain,
    w: Complex64,
    n_max: usize,
) -> Result<OrbitTrace> {
    if !domain.contains(w) {
        return Err(Error::domain(domain, w));
    }
    let mut points = vec![w];
    let mut etas = Vec::new();
    let mut log_deltas = vec![0.0];
    let mut termination = Termination::MaxIter;
    let mut current = w;
    for step in 1..=n_max {
        let next = match map.eval(current) {
            Ok(v) => v,
            Err(e) => {
                termination = escape_from_error(step, e)?;
                break;
            }
        };
        points.push(next);
        if next.norm() > DEFAULT_ESCAPE_RADIUS {
            termination = escaped_point(step, next);
            break;
        }
        if !domain.contains(next) {
            termination = Termination::LeftDomain { step };
            break;
        }
        let eta = match hyp_derivative(map, domain, domain, current) {
            Ok(v) => v,
            Err(Error::DomainViolation { .. }) => {
                // density not representable (e.g. underflow to the slit)
                termination = Termination::LeftDomain { step };
                break;
            }
            Err(e) => return Err(e),
        };
        etas.push(eta);
        let last = *log_deltas.last().unwrap();
        log_deltas.push(last + eta.ln());
        current = next;
    }
    Ok(OrbitTrace { points, etas, log_deltas, termination })
}

/// `‖Df(z)‖_U` for `f = exp` on `U = ℂ ∖ [0, ∞)` against `|Re z|/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCheck {
    pub value: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn exp_expansion_check(z: Complex64) -> Result<ExpansionCheck> {
    if !(z.re < 0.0) {
        return Err(Error::param("expansion check needs Re z < 0"));
    }
    let slit = ModelDomain::STANDARD_SLIT;
    let value = hyp_derivative(&EntireMap::exp(), slit, slit, z)?;
    let bound = z.re.abs() / 4.0;
    Ok(ExpansionCheck { value, bound, ok: value >= bound - 1e-12 })
}

/// Escape data for the orbit of one singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularOrbit {
    pub value: Complex64,
    /// First `n` with `|f^n(s)| > R_target`.
    pub escape_step: Option<usize>,
    pub last_point: Complex64,
    /// Approximate period when the orbit was caught in a cycle.
    pub period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EscapeVerdict {
    /// Every singular orbit passed `R_target`; `spread` is the difference
    /// between the slowest and fastest escape step.
    Uniform {
        max_step: usize,
        spread: usize,
    },
    NotEscaping {
        witness: Complex64,
        last_point: Complex64,
        period: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeReport {
    pub orbits: Vec<SingularOrbit>,
    pub verdict: EscapeVerdict,
}

fn detect_period(points: &[Complex64]) -> Option<usize> {
    let n = points.len();
    let last = points[n - 1];
    (1..=12.min(n.saturating_sub(1)))
        .find(|&p| (points[n - 1 - p] - last).norm() <= 1e-9 * (1.0 + last.norm()))
}

/// Escape of every singular orbit past `r_target` within `n_max` steps.
pub fn singular_escape_report(map: &EntireMap, n_max: usize, r_target: f64) -> Result<EscapeReport> {
    let singular = map.singular_values()?;
    let mut orbits = Vec::with_capacity(singular.values.len());
    for &s in &singular.values {
        let trace = iterate_orbit(map, s, n_max, r_target)?;
        let escape_step = match trace.termination {
            Termination::EscapedToInfinity { step, .. } => Some(step),
            _ => None,
        };
        let period = if escape_step.is_none() { detect_period(&trace.points) } else { None };
        orbits.push(SingularOrbit { value: s, escape_step, last_point: trace.last(), period });
    }
    let verdict = match orbits.iter().find(|o| o.escape_step.is_none()) {
        Some(o) => {
            EscapeVerdict::NotEscaping { witness: o.value, last_point: o.last_point, period: o.period }
        }
        None => {
            let steps = orbits.iter().filter_map(|o| o.escape_step);
            let max_step = steps.clone().max().unwrap_or(0);
            let min_step = steps.min().unwrap_or(0);
            EscapeVerdict::Uniform { max_step, spread: max_step - min_step }
        }
    };
    Ok(EscapeReport { orbits, verdict })
}

/// Axis-aligned rectangle in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self { re_min, re_max, im_min, im_max };
        if [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
            && re_min < re_max
            && im_min < im_max
        {
            Ok(r)
        } else {
            Err(Error::param("rectangle needs finite corners with min < max"))
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }
}

/// Per-pixel classification. `Bounded` only means "not escaped within the
/// iteration budget".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    Escaped(u32),
    /// Not escaped; the final orbit point lies inside the rectangle.
    Bounded(u32),
    /// Not escaped; the final orbit point lies outside the rectangle.
    LeftWindow(u32),
}

impl PixelClass {
    pub fn label(&self) -> &'static str {
        match self {
            PixelClass::Escaped(_) => "escaped",
            PixelClass::Bounded(_) => "bounded",
            PixelClass::LeftWindow(_) => "left-window",
        }
    }

    pub fn iterations(&self) -> u32 {
        match *self {
            PixelClass::Escaped(n) | PixelClass::Bounded(n) | PixelClass::LeftWindow(n) => n,
        }
    }
}

/// Escape-time classification of a pixel grid. Row 0 is the top edge
/// (`im_max`); pixels are sampled at their centres.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeGrid {
    pub rect: Rect,
    pub width: usize,
    pub height: usize,
    pub n_max: u32,
    pub escape_radius: f64,
    pub pixels: Vec<PixelClass>,
}

impl EscapeGrid {
    pub fn pixel_center(&self, col: usize, row: usize) -> Complex64 {
        pixel_center(&self.rect, self.width, self.height, col, row)
    }

    pub fn get(&self, col: usize, row: usize) -> PixelClass {
        self.pixels[row * self.width + col]
    }

    pub fn escaped_fraction(&self) -> f64 {
        let n = self.pixels.iter().filter(|p| matches!(p, PixelClass::Escaped(_))).count();
        n as f64 / self.pixels.len() as f64
    }
}

fn pixel_center(rect: &Rect, width: usize, height: usize, col: usize, row: usize) -> Complex64 {
    let dx = (rect.re_max - rect.re_min) / width as f64;
    let dy = (rect.im_max - rect.im_min) / height as f64;
    Complex64::new(rect.re_min + (col as f64 + 0.5) * dx, rect.im_max - (row as f64 + 0.5) * dy)
}

/// Classifies a single starting point.
pub fn classify_point(
    map: &EntireMap,
    rect: &Rect,
    w: Complex64,
    n_max: u32,
    escape_radius: f64,
) -> PixelClass {
    if w.norm() > escape_radius {
        return PixelClass::Escaped(0);
    }
    let mut current = w;
    for n in 1..=n_max {
        match map.eval(current) {
            Ok(next) if next.norm() <= escape_radius => current = next,
            _ => return PixelClass::Escaped(n),
        }
    }
    if rect.contains(current) {
        PixelClass::Bounded(n_max)
    } else {
        PixelClass::LeftWindow(n_max)
    }
}

/// Classifies every pixel; rows are evaluated in parallel.
pub fn escape_grid(
    map: &EntireMap,
    rect: Rect,
    width: usize,
    height: usize,
    n_max: u32,
    escape_radius: f64,
) -> Result<EscapeGrid> {
    if width == 0 || height == 0 {
        return Err(Error::param("grid resolution must be at least 1x1"));
    }
    if !(escape_radius > 0.0) {
        return Err(Error::param("escape radius must be positive"));
    }
    let pixels: Vec<PixelClass> = (0..height)
        .into_par_iter()
        .flat_map_iter(|row| {
            (0..width).map(move |col| {
                let w = pixel_center(&rect, width, height, col, row);
                classify_point(map, &rect, w, n_max, escape_radius)
            })
        })
        .collect();
    Ok(EscapeGrid { rect, width, height, n_max, escape_radius, pixels })
}
