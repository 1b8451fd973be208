//! Hyperbolic densities of model plane domains, Koebe-type bounds for
//! general domains, and the sharp comparison bounds between the metrics of
//! nested domains.
//!
//! Densities are normalised to curvature −1, so `ρ_𝔻(z) = 2/(1−|z|²)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::EntireMap;
use crate::quad::adaptive_simpson;
use crate::Direction;

/// A plane domain with a closed-form hyperbolic density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelDomain {
    UnitDisk,
    UpperHalfPlane,
    /// `𝔻 ∖ {0}`.
    PuncturedDisk,
    /// `ℂ ∖ {base + σt : t ≥ 0}`.
    SlitPlane {
        base: f64,
        dir: Direction,
    },
    /// `{r_in < |z| < r_out}`.
    Annulus {
        r_in: f64,
        r_out: f64,
    },
    /// `𝔻 ∖ {p}` with `0 < p < 1`.
    PuncturedUnitDisk {
        p: f64,
    },
    /// `{|z| < r}`.
    DiskOfRadius {
        r: f64,
    },
}

impl fmt::Display for ModelDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelDomain::UnitDisk => write!(f, "unit disk"),
            ModelDomain::UpperHalfPlane => write!(f, "upper half-plane"),
            ModelDomain::PuncturedDisk => write!(f, "punctured unit disk"),
            ModelDomain::SlitPlane { base, dir } => write!(f, "slit plane (ray {base}{dir}t)"),
            ModelDomain::Annulus { r_in, r_out } => write!(f, "annulus {r_in}<|z|<{r_out}"),
            ModelDomain::PuncturedUnitDisk { p } => write!(f, "unit disk minus {{{p}}}"),
            ModelDomain::DiskOfRadius { r } => write!(f, "disk |z|<{r}"),
        }
    }
}

/// `-log|w|` given `q = 1 − |w|²`, accurate when `|w|` is close to 1.
fn neg_log_modulus(q: f64) -> f64 {
    -0.5 * (-q).ln_1p()
}

impl ModelDomain {
    /// The model slit plane `ℂ ∖ [0, ∞)`.
    pub const STANDARD_SLIT: ModelDomain = ModelDomain::SlitPlane { base: 0.0, dir: Direction::Plus };

    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        let d = ModelDomain::Annulus { r_in, r_out };
        d.validate()?;
        Ok(d)
    }

    pub fn punctured_unit_disk(p: f64) -> Result<Self> {
        let d = ModelDomain::PuncturedUnitDisk { p };
        d.validate()?;
        Ok(d)
    }

    pub fn disk_of_radius(r: f64) -> Result<Self> {
        let d = ModelDomain::DiskOfRadius { r };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ModelDomain::SlitPlane { base, .. } => base.is_finite(),
            ModelDomain::Annulus { r_in, r_out } => 0.0 < r_in && r_in < r_out && r_out.is_finite(),
            ModelDomain::PuncturedUnitDisk { p } => 0.0 < p && p < 1.0,
            ModelDomain::DiskOfRadius { r } => r > 0.0 && r.is_finite(),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("invalid domain parameters: {self}")))
        }
    }

    pub fn is_simply_connected(&self) -> bool {
        matches!(
            self,
            ModelDomain::UnitDisk
                | ModelDomain::UpperHalfPlane
                | ModelDomain::SlitPlane { .. }
                | ModelDomain::DiskOfRadius { .. }
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if !z.is_finite() {
            return false;
        }
        let r = z.norm();
        match *self {
            ModelDomain::UnitDisk => r < 1.0,
            ModelDomain::UpperHalfPlane => z.im > 0.0,
            ModelDomain::PuncturedDisk => r > 0.0 && r < 1.0,
            ModelDomain::SlitPlane { base, dir } => {
                let w = dir.sign() * (z - base);
                !(w.im == 0.0 && w.re >= 0.0)
            }
            ModelDomain::Annulus { r_in, r_out } => r_in < r && r < r_out,
            ModelDomain::PuncturedUnitDisk { p } => r < 1.0 && z != Complex64::new(p, 0.0),
            ModelDomain::DiskOfRadius { r: rad } => r < rad,
        }
    }

    /// Euclidean distance from `z` to the boundary; zero outside.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        if !self.contains(z) {
            return 0.0;
        }
        let r = z.norm();
        match *self {
            ModelDomain::UnitDisk => 1.0 - r,
            ModelDomain::UpperHalfPlane => z.im,
            ModelDomain::PuncturedDisk => r.min(1.0 - r),
            ModelDomain::SlitPlane { base, dir } => {
                let w = dir.sign() * (z - base);
                if w.re >= 0.0 {
                    w.im.abs()
                } else {
                    w.norm()
                }
            }
            ModelDomain::Annulus { r_in, r_out } => (r - r_in).min(r_out - r),
            ModelDomain::PuncturedUnitDisk { p } => (z - p).norm().min(1.0 - r),
            ModelDomain::DiskOfRadius { r: rad } => rad - r,
        }
    }

    /// Exact hyperbolic density at `z`.
    pub fn density(&self, z: Complex64) -> Result<f64> {
        self.validate()?;
        if !self.contains(z) {
            return Err(Error::domain(self, z));
        }
        let r = z.norm();
        let rho = match *self {
            ModelDomain::UnitDisk => 2.0 / ((1.0 - r) * (1.0 + r)),
            ModelDomain::UpperHalfPlane => 1.0 / z.im,
            ModelDomain::PuncturedDisk => 1.0 / (r * neg_log_modulus((1.0 - r) * (1.0 + r))),
            ModelDomain::SlitPlane { base, dir } => {
                // 1/(2|w| sin(arg w / 2)) with arg in (0, 2π), using
                // 2 sin²(θ/2) = 1 − cos θ.
                let w = dir.sign() * (z - base);
                let m = w.norm();
                let gap = if w.re > 0.0 { w.im * w.im / (m + w.re) } else { m - w.re };
                1.0 / (2.0 * m * gap).sqrt()
            }
            ModelDomain::Annulus { r_in, r_out } => {
                // Pulled back from the strip log r_in < Re w < log r_out
                // under w ↦ e^w.
                let h = (r_out / r_in).ln();
                PI / (r * h * (PI * (r / r_in).ln() / h).sin())
            }
            ModelDomain::PuncturedUnitDisk { p } => {
                // Möbius M(z) = (z − p)/(1 − p z) sends the puncture to 0.
                let one_minus_pz = Complex64::new(1.0, 0.0) - p * z;
                let m = (z - p) / one_minus_pz;
                let dm = (1.0 - p * p) / one_minus_pz.norm_sqr();
                let q = (1.0 - r) * (1.0 + r) * dm;
                dm / (m.norm() * neg_log_modulus(q))
            }
            ModelDomain::DiskOfRadius { r: rad } => 2.0 * rad / ((rad - r) * (rad + r)),
        };
        if rho.is_finite() && rho > 0.0 {
            Ok(rho)
        } else {
            Err(Error::domain(self, z))
        }
    }
}

/// Lower/upper bound pair. `lo_known == false` means only the upper bound is
/// certified and `lo` is the trivial bound `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_known: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::param(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, lo_known: true })
    }

    pub fn upper_only(hi: f64) -> Self {
        Self { lo: 0.0, hi, lo_known: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        (!self.lo_known || self.lo <= x) && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

type DistanceFn = dyn Fn(Complex64) -> f64 + Send + Sync;

/// A hyperbolic domain known only through its boundary distance.
#[derive(Clone)]
pub struct GeneralDomain {
    name: String,
    boundary_distance: Arc<DistanceFn>,
    simply_connected: bool,
}

impl fmt::Debug for GeneralDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralDomain")
            .field("name", &self.name)
            .field("simply_connected", &self.simply_connected)
            .finish()
    }
}

impl GeneralDomain {
    pub fn new(
        name: impl Into<String>,
        boundary_distance: impl Fn(Complex64) -> f64 + Send + Sync + 'static,
        simply_connected: bool,
    ) -> Self {
        Self { name: name.into(), boundary_distance: Arc::new(boundary_distance), simply_connected }
    }

    pub fn from_model(domain: ModelDomain) -> Self {
        Self::new(domain.to_string(), move |z| domain.boundary_distance(z), domain.is_simply_connected())
    }

    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        (self.boundary_distance)(z)
    }

    pub fn is_simply_connected(&self) -> bool {
        self.simply_connected
    }

    /// `[1/(2d), 2/d]` with `d = dist(z, ∂U)`; only the upper bound when
    /// the domain is not simply connected.
    pub fn density_bounds(&self, z: Complex64) -> Result<Interval> {
        let d = self.boundary_distance(z);
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::domain(&self.name, z));
        }
        if self.simply_connected {
            Interval::new(0.5 / d, 2.0 / d)
        } else {
            Ok(Interval::upper_only(2.0 / d))
        }
    }
}

/// Hyperbolic distance in 𝔻 from 0 to `z`: `log((1+|z|)/(1−|z|))`.
pub fn disk_distance_from_origin(z: Complex64) -> Result<f64> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::domain(ModelDomain::UnitDisk, z));
    }
    Ok(r.ln_1p() - (-r).ln_1p())
}

/// The two sides of the metric comparison for `V ⊊ U` with
/// `R = d_U(z, U∖V)`, plus `R̃ = (e^R − 1)/(e^R + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonBounds {
    pub radius: f64,
    pub lo: f64,
    pub hi: f64,
    pub r_tilde: f64,
}

impl ComparisonBounds {
    pub fn interval(&self) -> Interval {
        Interval { lo: self.lo, hi: self.hi, lo_known: true }
    }
}

/// Sharp bounds `lo ≤ ρ_V^U(z) ≤ hi` in terms of `R = d_U(z, U∖V)`.
pub fn comparison_bounds(radius: f64) -> Result<ComparisonBounds> {
    if !(radius > 0.0) || radius.is_nan() {
        return Err(Error::param("comparison bounds need R > 0"));
    }
    if radius > 700.0 {
        // Both bounds equal 1 to double precision.
        return Ok(ComparisonBounds { radius, lo: 1.0, hi: 1.0, r_tilde: 1.0 });
    }
    let em1 = radius.exp_m1();
    let hi = 1.0 + 2.0 / em1;
    let r_tilde = (radius / 2.0).tanh();
    // 2e^R/(e^{2R} − 1) = 1/sinh R and log((e^R+1)/(e^R−1)) = −log R̃
    // = −log1p(−2/(e^R + 1)).
    let log_inv_r_tilde = -(-2.0 / (em1 + 2.0)).ln_1p();
    // lo > 1 exactly; rounding can land just below for large R.
    let lo = (1.0 / (radius.sinh() * log_inv_r_tilde)).max(1.0);
    Ok(ComparisonBounds { radius, lo, hi, r_tilde })
}

/// An inclusion `V ⊂ U` of model domains with a closed-form density ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inclusion {
    inner: ModelDomain,
    outer: ModelDomain,
}

impl Inclusion {
    pub fn new(inner: ModelDomain, outer: ModelDomain) -> Result<Self> {
        inner.validate()?;
        outer.validate()?;
        use ModelDomain::*;
        let ok = inner == outer
            || match (inner, outer) {
                (DiskOfRadius { r }, UnitDisk) => r <= 1.0,
                (PuncturedDisk | PuncturedUnitDisk { .. }, UnitDisk) => true,
                (DiskOfRadius { r: a }, DiskOfRadius { r: b }) => a <= b,
                (SlitPlane { base: a_in, dir: d_in }, SlitPlane { base: a_out, dir: d_out }) => {
                    d_in == d_out && d_in.sign() * (a_out - a_in) >= 0.0
                }
                (Annulus { r_in: a, r_out: b }, Annulus { r_in: c, r_out: d }) => c <= a && b <= d,
                _ => false,
            };
        if ok {
            Ok(Self { inner, outer })
        } else {
            Err(Error::param(format!("unsupported inclusion: {inner} in {outer}")))
        }
    }

    pub fn inner(&self) -> ModelDomain {
        self.inner
    }

    pub fn outer(&self) -> ModelDomain {
        self.outer
    }

    /// `ρ_V^U(z) = ρ_V(z)/ρ_U(z)`.
    pub fn density_ratio(&self, z: Complex64) -> Result<f64> {
        use ModelDomain::*;
        match (self.inner, self.outer) {
            (PuncturedDisk, UnitDisk) => punctured_in_disk_ratio(0.0, z),
            (PuncturedUnitDisk { p }, UnitDisk) => punctured_in_disk_ratio(p, z),
            (inner, outer) => Ok(inner.density(z)? / outer.density(z)?),
        }
    }
}

/// `ρ_{𝔻∖{p}}/ρ_𝔻 = q/(|m|·(−log(1 − q)))` with `m = (z − p)/(1 − pz)` and
/// `q = 1 − |m|²`; the ratio tends to 1 like `q²/24` at the unit circle.
fn punctured_in_disk_ratio(p: f64, z: Complex64) -> Result<f64> {
    let inner = if p == 0.0 { ModelDomain::PuncturedDisk } else { ModelDomain::PuncturedUnitDisk { p } };
    if !inner.contains(z) {
        return Err(Error::domain(inner, z));
    }
    let one_minus_pz = Complex64::new(1.0, 0.0) - p * z;
    let m = ((z - p) / one_minus_pz).norm();
    let r = z.norm();
    let q = (1.0 - r) * (1.0 + r) * (1.0 - p * p) / one_minus_pz.norm_sqr();
    let ratio = if q < 1e-4 { 1.0 + q * q * (1.0 + q) / 24.0 } else { q / (m * -(-q).ln_1p()) };
    if ratio.is_finite() {
        Ok(ratio)
    } else {
        Err(Error::domain(inner, z))
    }
}

/// `ρ_V(z)/ρ_U(z)` for `V = inner ⊂ U = outer`.
pub fn density_ratio(inner: ModelDomain, outer: ModelDomain, z: Complex64) -> Result<f64> {
    Inclusion::new(inner, outer)?.density_ratio(z)
}

/// A piecewise-smooth parameterised curve.
pub trait Path {
    /// Parameter values splitting the curve into smooth pieces, in
    /// increasing order; at least two entries.
    fn breakpoints(&self) -> Vec<f64>;
    fn point(&self, t: f64) -> Complex64;
    /// `γ'(t)` on smooth piece `piece` (between breakpoints `piece` and
    /// `piece + 1`), one-sided at the breakpoints.
    fn velocity(&self, piece: usize, t: f64) -> Complex64;
}

/// Straight segment `from → to`, `t ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub from: Complex64,
    pub to: Complex64,
}

impl Path for Segment {
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
    fn point(&self, t: f64) -> Complex64 {
        self.from + (self.to - self.from) * t
    }
    fn velocity(&self, _piece: usize, _t: f64) -> Complex64 {
        self.to - self.from
    }
}

/// Circular arc `center + radius·e^{iθ}`, `θ` from `start` to `end`
/// (either orientation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    pub center: Complex64,
    pub radius: f64,
    pub start: f64,
    pub end: f64,
}

impl Path for CircularArc {
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.start.min(self.end), self.start.max(self.end)]
    }
    fn point(&self, t: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, t)
    }
    fn velocity(&self, _piece: usize, t: f64) -> Complex64 {
        Complex64::new(0.0, self.radius) * Complex64::from_polar(1.0, t)
    }
}

/// Polyline through the given vertices; vertex `k` sits at `t = k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline(pub Vec<Complex64>);

impl Polyline {
    fn piece(&self, t: f64) -> (usize, f64) {
        let last = self.0.len().saturating_sub(2);
        let k = (t.floor().max(0.0) as usize).min(last);
        (k, t - k as f64)
    }
}

impl Path for Polyline {
    fn breakpoints(&self) -> Vec<f64> {
        (0..self.0.len()).map(|k| k as f64).collect()
    }
    fn point(&self, t: f64) -> Complex64 {
        let (k, s) = self.piece(t);
        self.0[k] + (self.0[k + 1] - self.0[k]) * s
    }
    fn velocity(&self, piece: usize, _t: f64) -> Complex64 {
        self.0[piece + 1] - self.0[piece]
    }
}

/// Hyperbolic length `∫ ρ(γ(t))·|γ'(t)| dt` to absolute error `tol`.
pub fn curve_length<P: Path + ?Sized>(domain: ModelDomain, curve: &P, tol: f64) -> Result<f64> {
    let cuts = curve.breakpoints();
    if cuts.len() < 2 {
        return Err(Error::param("curve needs at least one piece"));
    }
    let pieces = (cuts.len() - 1) as f64;
    let integrand = |piece: usize, t: f64| -> Result<f64> {
        let v = curve.velocity(piece, t).norm();
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(domain.density(curve.point(t))? * v)
    };
    cuts.windows(2)
        .enumerate()
        .map(|(k, w)| adaptive_simpson(|t| integrand(k, t), w[0], w[1], tol / pieces))
        .sum()
}

/// `‖Df(z)‖ = |f'(z)|·ρ_dst(f(z))/ρ_src(z)`. Returns `0` at critical points.
pub fn hyp_derivative(map: &EntireMap, src: ModelDomain, dst: ModelDomain, z: Complex64) -> Result<f64> {
    let rho_src = src.density(z)?;
    let w = map.eval(z)?;
    let rho_dst = dst.density(w)?;
    let d = map.deriv(z)?;
    Ok(d.norm() * rho_dst / rho_src)
}
