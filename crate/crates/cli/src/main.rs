//! `hypdyn`: reproducible experiments on hyperbolic metrics and the dynamics
//! of transcendental entire maps.
//!
//! Every subcommand writes a CSV table (to `--out`, or to stdout) and a
//! one-line summary (to stdout when `--out` is given, otherwise to stderr).
//!
//! Exit codes: 0 success, 1 a check or verdict failed, 2 usage or
//! precondition error, 3 numeric failure.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use hypdyn::parse::{parse_complex, MapSpec};
use hypdyn::{Complex64, Direction, EntireMap, ModelDomain, ZeroRule};

mod commands;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "hypdyn", version, about = "Hyperbolic-metric experiments for transcendental entire maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sharp comparison bounds lo(R) <= rho_V/rho_U <= hi(R) for nested
    /// hyperbolic domains V ⊂ U, where R = d_U(z, U∖V).
    MetricBounds(MetricBoundsArgs),
    /// Exact hyperbolic density of a model domain, with the Koebe
    /// quarter-theorem bounds [1/(2d), 2/d] in terms of boundary distance d.
    Density(DensityArgs),
    /// Hyperbolic length of a polyline or circular arc in a model domain.
    CurveLength(CurveLengthArgs),
    /// Orbit z_{n+1} = f(z_n) of a point until it escapes or the budget runs out.
    Orbit(OrbitArgs),
    /// Hyperbolic derivatives eta_n = ||Df(z_n)|| along an orbit and their
    /// products delta_n (expansion of the hyperbolic metric under iteration).
    Delta(DeltaArgs),
    /// Grid test of the expansion estimate ||D exp(z)|| >= |Re z|/4 of the
    /// exponential map in the slit-plane metric, for Re z < 0.
    ExpansionGrid(ExpansionGridArgs),
    /// Escape of the orbits of all singular values past a target radius
    /// (uniform escape of the postsingular set).
    SingularEscape(SingularEscapeArgs),
    /// Real sector condition: the logarithmic-derivative ratio
    /// x|f'(σx)|/(|f(σx)| log|f(σx)|) sampled on σ·[r, x_max].
    SectorCheck(SectorCheckArgs),
    /// Tract-distance sandwich 1/(4Q) <= dist(z, ∂T) <= 2/Q with
    /// Q = |f'(z)|/(|f(z)| log|f(z)|) for z in a tract T over {|w| > R}.
    TractSandwich(TractSandwichArgs),
    /// Laguerre–Pólya identity x f'(x)/f(x) = Σ(1 − 1/w_n) <= Σ log w_n = log f(x)
    /// for a truncated product with positive zeros.
    LpCheck(LpCheckArgs),
    /// Preimages of a point inside a truncated sector {σx + iy : x > R', |y| < θx},
    /// found by Newton's method from a seed grid.
    PreimageScan(PreimageScanArgs),
    /// Escape-time classification of a pixel grid (CSV, optional PPM image).
    EscapeGrid(EscapeGridArgs),
}

fn finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("'{s}' is not a finite number")),
    }
}

fn complex(s: &str) -> Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

fn direction(s: &str) -> Result<Direction, String> {
    s.parse().map_err(|e: hypdyn::parse::ParseError| e.to_string())
}

fn domain(s: &str) -> Result<ModelDomain, String> {
    s.parse().map_err(|e: hypdyn::parse::ParseError| e.to_string())
}

fn zero_rule(s: &str) -> Result<ZeroRule, String> {
    s.parse().map_err(|e: hypdyn::parse::ParseError| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Map selection: a family name (exp, sinh-over-z, lp) or a compact spec
/// such as `sinh-over-z:lambda=1,a=5`; the flags below override the spec.
#[derive(Args, Debug, Clone)]
struct MapArgs {
    /// Map family or compact spec.
    #[arg(long)]
    map: Option<String>,
    /// λ in λ·sinh(z)/z + a.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// a in λ·sinh(z)/z + a.
    #[arg(long = "a", value_parser = finite, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Zero rule of a Laguerre–Pólya product, e.g. n^2 or n^2pi^2.
    #[arg(long)]
    zeros: Option<String>,
    /// Truncation of a Laguerre–Pólya product.
    #[arg(long = "N")]
    truncation: Option<usize>,
    /// Precompose with a real polynomial, ascending coefficients `c0;c1;...`.
    #[arg(long)]
    poly: Option<String>,
}

impl MapArgs {
    fn build(&self, default: Option<&str>) -> Result<EntireMap, CliError> {
        let text =
            self.map.as_deref().or(default).ok_or_else(|| CliError::Usage("--map is required".into()))?;
        let mut spec: MapSpec = text.parse()?;
        if let Some(v) = self.lambda {
            spec.lambda = Some(v);
        }
        if let Some(v) = self.a {
            spec.a = Some(v);
        }
        if let Some(z) = &self.zeros {
            spec.zeros = Some(z.parse()?);
        }
        if let Some(n) = self.truncation {
            spec.truncation = Some(n);
        }
        if let Some(p) = &self.poly {
            spec.poly = Some(p.parse()?);
        }
        Ok(spec.build()?)
    }
}

#[derive(Args, Debug, Clone)]
struct RectArgs {
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    re_min: Option<f64>,
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    re_max: Option<f64>,
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    im_min: Option<f64>,
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    im_max: Option<f64>,
}

#[derive(Args, Debug)]
struct MetricBoundsArgs {
    /// Hyperbolic distance R > 0 (repeatable).
    #[arg(long = "R", value_parser = finite, allow_negative_numbers = true, num_args = 1.., required = true)]
    radius: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Domain: disk, upper, punctured, slit[:base=b,dir=±], annulus:r_in=..,r_out=..,
    /// disk-minus:p=.., disk-radius:r=..
    #[arg(long, value_parser = domain)]
    domain: ModelDomain,
    /// Points `z1;z2;...`.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("curve").required(true).args(["polyline", "radius"])))]
struct CurveLengthArgs {
    /// Domain spec, as for `density`.
    #[arg(long, value_parser = domain)]
    domain: ModelDomain,
    /// Polyline vertices `z1;z2;...`.
    #[arg(long, allow_hyphen_values = true)]
    polyline: Option<String>,
    /// Arc centre.
    #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "0")]
    center: Complex64,
    /// Arc radius.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, requires_all = ["start", "end"])]
    radius: Option<f64>,
    /// Arc start angle (radians).
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    start: Option<f64>,
    /// Arc end angle (radians).
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    end: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Starting point.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    z0: Complex64,
    /// Iteration budget.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Escape radius.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = hypdyn::orbits::DEFAULT_ESCAPE_RADIUS)]
    r_esc: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct DeltaArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Invariant domain (defaults to the slit plane ℂ∖[0,∞)).
    #[arg(long, value_parser = domain, default_value = "slit")]
    domain: ModelDomain,
    /// Starting point.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    z0: Complex64,
    /// Number of steps.
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct ExpansionGridArgs {
    #[command(flatten)]
    rect: RectArgs,
    /// Samples along Re z.
    #[arg(long, default_value_t = 100)]
    nx: usize,
    /// Samples along Im z.
    #[arg(long, default_value_t = 100)]
    ny: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SingularEscapeArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Iteration budget per singular value.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Target radius.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = 1e8)]
    r_target: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct SectorCheckArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Real direction σ (+ or -).
    #[arg(long, value_parser = direction, allow_hyphen_values = true)]
    sigma: Direction,
    /// Lower end r of the sampled interval.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    r: f64,
    /// Upper end x_max of the sampled interval.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    xmax: f64,
    /// Number of log-spaced samples.
    #[arg(long, default_value_t = 128)]
    samples: usize,
    /// Largest ratio accepted before declaring a violation.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = 1e3)]
    kmax: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct TractSandwichArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Points in the tract, `z1;z2;...`.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// Radius R of the tract {|f| > R}.
    #[arg(long = "R", value_parser = finite, allow_negative_numbers = true)]
    big_r: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct LpCheckArgs {
    /// Zero rule, e.g. n^2 or n^2pi^2.
    #[arg(long, value_parser = zero_rule)]
    zeros: ZeroRule,
    /// Truncation N.
    #[arg(long = "N")]
    truncation: usize,
    /// Evaluation point x > 0 (repeatable).
    #[arg(long, value_parser = finite, allow_negative_numbers = true, num_args = 1.., required = true)]
    x: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct PreimageScanArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Target point w.
    #[arg(long, value_parser = complex, allow_hyphen_values = true)]
    w: Complex64,
    /// Sector direction σ (+ or -).
    #[arg(long, value_parser = direction, allow_hyphen_values = true)]
    sigma: Direction,
    /// Opening θ of the sector |y| < θx.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    theta: f64,
    /// Truncation R' of the sector x > R'.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    r_prime: f64,
    /// Largest seed abscissa.
    #[arg(long, value_parser = finite, allow_negative_numbers = true)]
    xmax: f64,
    /// Seed spacing.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = PI / 2.0)]
    spacing: f64,
    /// Newton residual tolerance.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args, Debug)]
struct EscapeGridArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    rect: RectArgs,
    #[arg(long, default_value_t = 200)]
    width: usize,
    #[arg(long, default_value_t = 200)]
    height: usize,
    /// Iteration budget per pixel.
    #[arg(long, default_value_t = 50)]
    n: u32,
    /// Escape radius.
    #[arg(long, value_parser = finite, allow_negative_numbers = true, default_value_t = hypdyn::orbits::DEFAULT_ESCAPE_RADIUS)]
    r_esc: f64,
    /// PPM (P6) image output path.
    #[arg(long)]
    ppm: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
