//! The real sector condition.
//!
//! For a real map `f` and a direction `σ` along which `|f(σx)| → ∞`, the
//! sector condition asks that `|f|` stays large on a truncated sector around
//! `σ∞`. It is equivalent to the logarithmic-derivative bound
//!
//! ```text
//! x·|f'(σx)| / (|f(σx)|·log|f(σx)|) ≤ K     for x ≥ r,
//! ```
//!
//! which is what [`sector_report`] samples. [`direct_sector_test`] checks the
//! definition on a grid, and [`preimage_scan`] looks for preimages of a point
//! inside a truncated sector.
//!
//! All verdicts are three-valued and certify only the sampled points.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypgeo::Interval;
use crate::maps::EntireMap;
use crate::orbits::{iterate_orbit, Termination};
use crate::Direction;

/// Threshold a real singular orbit has to pass before its direction counts
/// towards `Σ(f)`.
pub const SIGMA_THRESHOLD: f64 = 1e8;

/// Log-spaced probe points for deciding `lim |f(σx)| = ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeSchedule {
    pub count: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for ProbeSchedule {
    fn default() -> Self {
        Self { count: 64, x_min: 1.0, x_max: 1e3 }
    }
}

impl ProbeSchedule {
    pub fn points(&self) -> Vec<f64> {
        log_spaced(self.x_min, self.x_max, self.count)
    }
}

pub(crate) fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln();
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo * (ratio * i as f64 / (count - 1) as f64).exp() })
        .collect()
}

/// A subset of `{+, −}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DirectionSet {
    pub plus: bool,
    pub minus: bool,
}

impl DirectionSet {
    pub fn contains(&self, d: Direction) -> bool {
        match d {
            Direction::Plus => self.plus,
            Direction::Minus => self.minus,
        }
    }

    pub fn insert(&mut self, d: Direction) {
        match d {
            Direction::Plus => self.plus = true,
            Direction::Minus => self.minus = true,
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.plus && !self.minus
    }

    pub fn is_subset(&self, other: &DirectionSet) -> bool {
        Direction::BOTH.iter().all(|&d| !self.contains(d) || other.contains(d))
    }

    pub fn iter(&self) -> impl Iterator<Item = Direction> + '_ {
        Direction::BOTH.into_iter().filter(|&d| self.contains(d))
    }
}

impl fmt::Display for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Directions of escape `Σ₀(f)`, with a witness probe for every excluded
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Sigma0Report {
    pub directions: DirectionSet,
    pub witnesses: Vec<(Direction, f64)>,
}

fn require_real(map: &EntireMap) -> Result<()> {
    if map.is_real() {
        Ok(())
    } else {
        Err(Error::param("sector tests need a real map"))
    }
}

/// `σ ∈ Σ₀(f)` when, over the final half of the probes, `|f(σx_k)|` is
/// strictly increasing and exceeds `√x_k`.
pub fn sigma0(map: &EntireMap, schedule: ProbeSchedule) -> Result<Sigma0Report> {
    require_real(map)?;
    if schedule.count < 4 || !(0.0 < schedule.x_min && schedule.x_min < schedule.x_max) {
        return Err(Error::param("probe schedule needs >= 4 probes on 0 < x_min < x_max"));
    }
    let xs = schedule.points();
    let tail = &xs[xs.len() / 2..];
    let mut directions = DirectionSet::default();
    let mut witnesses = Vec::new();
    for dir in Direction::BOTH {
        let logs: Vec<f64> = tail
            .iter()
            .map(|&x| map.scaled(Complex64::new(dir.sign() * x, 0.0)).map(|s| s.log_abs()))
            .collect::<Result<_>>()?;
        let mut witness = None;
        for (k, (&x, &l)) in tail.iter().zip(&logs).enumerate() {
            let growing = k == 0 || l > logs[k - 1];
            if !(growing && l > 0.5 * x.ln()) {
                witness = Some(x);
                break;
            }
        }
        match witness {
            None => directions.insert(dir),
            Some(x) => witnesses.push((dir, x)),
        }
    }
    Ok(Sigma0Report { directions, witnesses })
}

/// Directions `Σ(f)` reached by real singular orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaReport {
    pub directions: DirectionSet,
    /// No real singular orbit passed [`SIGMA_THRESHOLD`] within the budget.
    pub inconclusive: bool,
}

pub fn sigma(map: &EntireMap, n_iter: usize) -> Result<SigmaReport> {
    require_real(map)?;
    let singular = map.singular_values()?;
    let mut directions = DirectionSet::default();
    for s in singular.real_values() {
        let trace = iterate_orbit(map, Complex64::new(s, 0.0), n_iter, SIGMA_THRESHOLD)?;
        if let Termination::EscapedToInfinity { phase, .. } = trace.termination {
            if phase.re > 0.0 {
                directions.insert(Direction::Plus);
            } else if phase.re < 0.0 {
                directions.insert(Direction::Minus);
            }
        }
    }
    Ok(SigmaReport { directions, inconclusive: directions.is_empty() })
}

/// `x·|f'(σx)| / (|f(σx)|·log|f(σx)|)`; requires `|f(σx)| > e`.
pub fn log_der_ratio(map: &EntireMap, dir: Direction, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::param("log_der_ratio needs x > 0"));
    }
    let s = map.scaled(Complex64::new(dir.sign() * x, 0.0))?;
    let log_abs = s.log_abs();
    if !(log_abs > 1.0) {
        return Err(Error::NotInTract { reason: format!("|f({dir}{x})| <= e") });
    }
    Ok(x * s.log_derivative().norm() / log_abs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorVerdict {
    Satisfied {
        k: f64,
    },
    /// `witness` is the first sampled `x` whose ratio exceeded `K_max`, or at
    /// which `|f|` failed to grow.
    Violated {
        witness: f64,
    },
    Inconclusive,
}

impl fmt::Display for SectorVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorVerdict::Satisfied { .. } => f.write_str("Satisfied"),
            SectorVerdict::Violated { .. } => f.write_str("Violated"),
            SectorVerdict::Inconclusive => f.write_str("Inconclusive"),
        }
    }
}

/// Sampled logarithmic-derivative audit along `σ·[r, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorReport {
    pub direction: Direction,
    pub r: f64,
    pub x_max: f64,
    pub samples: usize,
    /// `(x, ratio)` for every sample in the tract, increasing in `x`.
    pub ratios: Vec<(f64, f64)>,
    /// `max` of the recorded ratios (`0` when none).
    pub sup_ratio: f64,
    pub verdict: SectorVerdict,
}

pub fn sector_report(
    map: &EntireMap,
    dir: Direction,
    r: f64,
    x_max: f64,
    samples: usize,
    k_max: f64,
) -> Result<SectorReport> {
    if samples < 2 {
        return Err(Error::param("sector report needs at least 2 samples"));
    }
    if !(0.0 < r && r < x_max && x_max.is_finite()) {
        return Err(Error::param("sector report needs 0 < r < x_max"));
    }
    let s0 = sigma0(map, ProbeSchedule::default())?;
    if !s0.directions.contains(dir) {
        return Err(Error::param(format!("direction {dir} is not in Sigma_0 = {}", s0.directions)));
    }
    let xs = log_spaced(r, x_max, samples);
    let evaluated: Vec<Result<(f64, f64, f64)>> = xs
        .par_iter()
        .map(|&x| {
            let ratio = log_der_ratio(map, dir, x)?;
            let log_abs = map.scaled(Complex64::new(dir.sign() * x, 0.0))?.log_abs();
            Ok((x, ratio, log_abs))
        })
        .collect();
    let mut valid = Vec::new();
    for item in evaluated {
        match item {
            Ok(v) => valid.push(v),
            Err(Error::NotInTract { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let ratios: Vec<(f64, f64)> = valid.iter().map(|&(x, q, _)| (x, q)).collect();
    let sup_ratio = ratios.iter().map(|&(_, q)| q).fold(0.0, f64::max);
    let verdict = if valid.len() < 2 {
        SectorVerdict::Inconclusive
    } else {
        let non_growing = valid.windows(2).find(|w| w[1].2 <= w[0].2).map(|w| w[1].0);
        let too_large = valid.iter().find(|v| v.1 > k_max).map(|v| v.0);
        match (too_large, non_growing) {
            (None, None) => SectorVerdict::Satisfied { k: sup_ratio },
            (a, b) => SectorVerdict::Violated {
                witness: a.unwrap_or(f64::INFINITY).min(b.unwrap_or(f64::INFINITY)),
            },
        }
    };
    Ok(SectorReport { direction: dir, r, x_max, samples, ratios, sup_ratio, verdict })
}

/// Bracket for `dist(z, ∂T)` where `T` is the tract containing `z`:
/// with `Q = |f'(z)|/(|f(z)|·log|f(z)|)`, `1/(4Q) ≤ dist ≤ 2/Q`.
///
/// Requires `R ≥ 1 + radius_bound(S(f))` and `|f(z)| > R²`.
pub fn tract_distance_sandwich(map: &EntireMap, z: Complex64, big_r: f64) -> Result<Interval> {
    let bound = map.singular_values()?.radius_bound;
    if !(big_r >= 1.0 + bound) {
        return Err(Error::NotInTract { reason: format!("R = {big_r} is below 1 + radius bound {bound}") });
    }
    let s = map.scaled(z)?;
    let log_abs = s.log_abs();
    if !(log_abs > 2.0 * big_r.ln()) {
        return Err(Error::NotInTract { reason: format!("|f(z)| <= R^2 at z = {z}") });
    }
    let q = s.log_derivative().norm() / log_abs;
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::NotInTract { reason: format!("degenerate log-derivative at z = {z}") });
    }
    Interval::new(0.25 / q, 2.0 / q)
}

/// `{σx + iy : x > R', |y| < θx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSector {
    pub dir: Direction,
    pub theta: f64,
    pub r_prime: f64,
}

impl TruncatedSector {
    pub fn new(dir: Direction, theta: f64, r_prime: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite() && r_prime > 0.0 && r_prime.is_finite()) {
            return Err(Error::param("truncated sector needs theta > 0 and R' > 0"));
        }
        Ok(Self { dir, theta, r_prime })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let x = self.dir.sign() * z.re;
        x > self.r_prime && z.im.abs() < self.theta * x
    }
}

/// Sampling density for [`direct_sector_test`]: `n_x` log-spaced abscissae in
/// `(R', x_max]`, each with `n_y` evenly spaced ordinates across the sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorGrid {
    pub n_x: usize,
    pub n_y: usize,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSectorResult {
    /// Smallest `log|f|` found and where.
    pub min_log_modulus: f64,
    pub argmin: Complex64,
    /// A sample with `|f| ≤ R`, if any (the first one found in grid order).
    pub witness: Option<Complex64>,
    pub samples: usize,
}

impl DirectSectorResult {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks `|f| > R` on a grid covering the truncated sector.
pub fn direct_sector_test(
    map: &EntireMap,
    sector: TruncatedSector,
    big_r: f64,
    grid: SectorGrid,
) -> Result<DirectSectorResult> {
    if grid.n_x == 0 || grid.n_y == 0 || !(grid.x_max > sector.r_prime) {
        return Err(Error::param("sector grid needs n_x, n_y >= 1 and x_max > R'"));
    }
    if !(big_r > 0.0) {
        return Err(Error::param("R must be positive"));
    }
    let log_r = big_r.ln();
    // x_i = R'·(x_max/R')^{(i+1)/n_x}, strictly above R'.
    let ratio = (grid.x_max / sector.r_prime).ln();
    let rows: Vec<Result<Vec<(Complex64, f64)>>> = (0..grid.n_x)
        .into_par_iter()
        .map(|i| {
            let x = sector.r_prime * (ratio * (i + 1) as f64 / grid.n_x as f64).exp();
            (0..grid.n_y)
                .map(|j| {
                    let y = sector.theta * x * (2.0 * (j as f64 + 0.5) / grid.n_y as f64 - 1.0);
                    let z = Complex64::new(sector.dir.sign() * x, y);
                    Ok((z, map.scaled(z)?.log_abs()))
                })
                .collect()
        })
        .collect();
    let mut min_log_modulus = f64::INFINITY;
    let mut argmin = Complex64::new(f64::NAN, f64::NAN);
    let mut witness = None;
    let mut samples = 0;
    for row in rows {
        for (z, l) in row? {
            samples += 1;
            if l < min_log_modulus || argmin.re.is_nan() {
                min_log_modulus = l;
                argmin = z;
            }
            if witness.is_none() && !(l > log_r) {
                witness = Some(z);
            }
        }
    }
    Ok(DirectSectorResult { min_log_modulus, argmin, witness, samples })
}

/// Newton seeds for [`preimage_scan`]: a rectangular grid with the given
/// spacing covering the sector up to `x_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedGrid {
    pub x_max: f64,
    pub spacing: f64,
}

impl SeedGrid {
    /// Quarter-period spacing for maps with `2πi`-periodic preimage
    /// structure.
    pub fn with_default_spacing(x_max: f64) -> Self {
        Self { x_max, spacing: std::f64::consts::FRAC_PI_2 }
    }

    pub fn seeds(&self, sector: &TruncatedSector) -> Vec<Complex64> {
        let mut seeds = Vec::new();
        let mut x = sector.r_prime + 0.5 * self.spacing;
        while x <= self.x_max {
            let half = sector.theta * x;
            let m = (half / self.spacing).floor() as i64;
            for k in -m..=m {
                let y = k as f64 * self.spacing;
                if y.abs() < half {
                    seeds.push(Complex64::new(sector.dir.sign() * x, y));
                }
            }
            x += self.spacing;
        }
        seeds
    }
}

const NEWTON_MAX_ITER: usize = 200;

fn newton(map: &EntireMap, w: Complex64, seed: Complex64, tol: f64) -> Option<Complex64> {
    let mut z = seed;
    let mut converged_at = None;
    for it in 0..NEWTON_MAX_ITER {
        let f = map.eval(z).ok()?;
        let residual = f - w;
        if residual.norm() < tol && converged_at.is_none() {
            converged_at = Some(it);
        }
        // two polishing steps after first reaching tol
        if converged_at.is_some_and(|c| it >= c + 2) {
            break;
        }
        let d = map.deriv(z).ok()?;
        if d.norm() == 0.0 {
            return None;
        }
        let next = z - crate::maps::cdiv(residual, d);
        if !next.is_finite() {
            return None;
        }
        z = next;
    }
    let residual = (map.eval(z).ok()? - w).norm();
    (residual < tol).then_some(z)
}

/// Preimages of `w` inside `sector`, found by Newton's method from a seed
/// grid, deduplicated (pairwise distance > 10·tol) and sorted by real then
/// imaginary part.
pub fn preimage_scan(
    map: &EntireMap,
    w: Complex64,
    sector: TruncatedSector,
    seeds: SeedGrid,
    tol: f64,
) -> Result<Vec<Complex64>> {
    if !w.is_finite() {
        return Err(Error::param("target must be finite"));
    }
    if !(tol > 0.0) || !(seeds.spacing > 0.0) || !seeds.x_max.is_finite() {
        return Err(Error::param("preimage scan needs tol > 0, spacing > 0 and finite x_max"));
    }
    let starts = seeds.seeds(&sector);
    let found: Vec<Option<Complex64>> = starts.par_iter().map(|&s| newton(map, w, s, tol)).collect();
    let mut roots: Vec<Complex64> = Vec::new();
    for z in found.into_iter().flatten() {
        if sector.contains(z) && roots.iter().all(|r| (r - z).norm() > 10.0 * tol) {
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

/// Terms of the Laguerre–Pólya logarithmic-derivative identity at `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpIdentity {
    /// `x·f'(x)/f(x)` from the product-rule derivative.
    pub lhs: f64,
    /// `Σ (1 − 1/w_n(x))` with `w_n(x) = (x_n + x)/x_n`, summed from the
    /// smallest term up.
    pub rhs: f64,
    /// `log f(x) = Σ log w_n(x)`.
    pub bound: f64,
    pub residual: f64,
}

impl LpIdentity {
    pub fn within_bound(&self) -> bool {
        self.lhs <= self.bound
    }
}

pub fn lp_logder_identity_check(zeros: &[f64], x: f64) -> Result<LpIdentity> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::param("identity check needs x > 0"));
    }
    let map = EntireMap::lp_product(zeros.to_vec())?;
    let s = map.scaled(Complex64::new(x, 0.0))?;
    let lhs = x * s.log_derivative().re;
    let rhs: f64 = zeros.iter().rev().map(|&xn| 1.0 - 1.0 / ((xn + x) / xn)).sum();
    let bound: f64 = zeros.iter().rev().map(|&xn| (x / xn).ln_1p()).sum();
    Ok(LpIdentity { lhs, rhs, bound, residual: (lhs - rhs).abs() })
}
