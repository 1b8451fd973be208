use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use hypdyn::hypgeo::{comparison_bounds, curve_length, CircularArc, Polyline};
use hypdyn::orbits::{
    delta_sequence, escape_grid, exp_expansion_check, iterate_orbit, singular_escape_report, EscapeVerdict,
    Rect, Termination,
};
use hypdyn::output::{escape_grid_csv, fmt_num, sector_report_csv, write_ppm, CsvTable};
use hypdyn::parse::{parse_points, ParseError};
use hypdyn::sector::{
    lp_logder_identity_check, preimage_scan, sector_report, tract_distance_sandwich, SectorVerdict, SeedGrid,
    TruncatedSector,
};
use hypdyn::{Complex64, Error, GeneralDomain};

use crate::{
    Command, CurveLengthArgs, DeltaArgs, DensityArgs, EscapeGridArgs, ExpansionGridArgs, LpCheckArgs,
    MetricBoundsArgs, OrbitArgs, OutArgs, PreimageScanArgs, RectArgs, SectorCheckArgs, SingularEscapeArgs,
    TractSandwichArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Numeric(_) | CliError::Io(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::DomainViolation { .. } | Error::NotInTract { .. } => {
                CliError::Usage(e.to_string())
            }
            Error::EscapedToInfinity { .. }
            | Error::IncompleteSingularSet { .. }
            | Error::QuadratureFailure { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Six decimals for moderate magnitudes, `fmt_num` otherwise.
fn short(x: f64) -> String {
    if x == 0.0 || (1e-4..1e9).contains(&x.abs()) {
        format!("{x:.6}")
    } else {
        fmt_num(x)
    }
}

/// Result of one subcommand before it is written out.
struct Report {
    table: CsvTable,
    summary: String,
    failed: bool,
}

impl Report {
    fn ok(table: CsvTable, summary: String) -> Self {
        Self { table, summary, failed: false }
    }
}

fn emit(report: Report, out: &OutArgs) -> CliResult<ExitCode> {
    match &out.out {
        Some(path) => {
            write_file(path, |w| report.table.write_to(w))?;
            println!("{}", report.summary);
        }
        None => {
            report.table.write_to(io::stdout().lock())?;
            eprintln!("{}", report.summary);
        }
    }
    Ok(if report.failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()
}

pub fn run(command: Command) -> CliResult<ExitCode> {
    match command {
        Command::MetricBounds(a) => emit(metric_bounds(&a)?, &a.out),
        Command::Density(a) => emit(density(&a)?, &a.out),
        Command::CurveLength(a) => emit(curve(&a)?, &a.out),
        Command::Orbit(a) => emit(orbit(&a)?, &a.out),
        Command::Delta(a) => emit(delta(&a)?, &a.out),
        Command::ExpansionGrid(a) => emit(expansion_grid(&a)?, &a.out),
        Command::SingularEscape(a) => emit(singular_escape(&a)?, &a.out),
        Command::SectorCheck(a) => emit(sector_check(&a)?, &a.out),
        Command::TractSandwich(a) => emit(tract_sandwich(&a)?, &a.out),
        Command::LpCheck(a) => emit(lp_check(&a)?, &a.out),
        Command::PreimageScan(a) => emit(preimage(&a)?, &a.out),
        Command::EscapeGrid(a) => emit(grid(&a)?, &a.out),
    }
}

fn metric_bounds(a: &MetricBoundsArgs) -> CliResult<Report> {
    let mut t = CsvTable::new("metric-bounds", &["R", "lo", "hi", "r_tilde"]);
    let mut parts = Vec::new();
    for &r in &a.radius {
        let b = comparison_bounds(r)?;
        t.push_nums(&[b.radius, b.lo, b.hi, b.r_tilde]);
        parts.push(format!(
            "R {} lo {} hi {} R~ {}",
            short(b.radius),
            short(b.lo),
            short(b.hi),
            short(b.r_tilde)
        ));
    }
    Ok(Report::ok(t, parts.join("; ")))
}

fn density(a: &DensityArgs) -> CliResult<Report> {
    let points = parse_points(&a.z)?;
    let general = GeneralDomain::from_model(a.domain);
    let mut t = CsvTable::new("density", &["x", "y", "density", "koebe_lo", "koebe_hi"]);
    t.meta(format!("domain={}", a.domain));
    let mut failed = false;
    for z in points {
        let rho = a.domain.density(z)?;
        let k = general.density_bounds(z)?;
        let slack = 1e-12 * rho;
        failed |= rho > k.hi + slack || (k.lo_known && rho < k.lo - slack);
        let lo = if k.lo_known { fmt_num(k.lo) } else { String::new() };
        t.push(vec![fmt_num(z.re), fmt_num(z.im), fmt_num(rho), lo, fmt_num(k.hi)]);
    }
    let n = t.rows.len();
    let summary = format!(
        "density on {}: {n} point(s), Koebe bounds {}",
        a.domain,
        if failed { "VIOLATED" } else { "hold" }
    );
    Ok(Report { table: t, summary, failed })
}

fn curve(a: &CurveLengthArgs) -> CliResult<Report> {
    let mut t = CsvTable::new("curve-length", &["length", "tol"]);
    t.meta(format!("domain={}", a.domain));
    let length = match (&a.polyline, a.radius) {
        (Some(p), _) => {
            let vertices = parse_points(p)?;
            t.meta(format!("polyline={}", vertices.len()));
            curve_length(a.domain, &Polyline(vertices), a.tol)?
        }
        (None, Some(radius)) => {
            if !(radius > 0.0) {
                return Err(CliError::Usage("arc radius must be positive".into()));
            }
            let arc = CircularArc {
                center: a.center,
                radius,
                start: a.start.unwrap_or(0.0),
                end: a.end.unwrap_or(0.0),
            };
            t.meta(format!(
                "arc center={},{} radius={} start={} end={}",
                fmt_num(arc.center.re),
                fmt_num(arc.center.im),
                fmt_num(arc.radius),
                fmt_num(arc.start),
                fmt_num(arc.end)
            ));
            curve_length(a.domain, &arc, a.tol)?
        }
        (None, None) => return Err(CliError::Usage("give --polyline or --radius".into())),
    };
    t.push_nums(&[length, a.tol]);
    Ok(Report::ok(t, format!("hyperbolic length {}", short(length))))
}

fn termination_text(t: &Termination) -> String {
    match t {
        Termination::MaxIter => "max-iter".into(),
        Termination::EscapedToInfinity { step, log_modulus, .. } => {
            format!("escaped step={step} log_modulus={}", fmt_num(*log_modulus))
        }
        Termination::LeftDomain { step } => format!("left-domain step={step}"),
    }
}

fn orbit(a: &OrbitArgs) -> CliResult<Report> {
    let map = a.map.build(None)?;
    let trace = iterate_orbit(&map, a.z0, a.n, a.r_esc)?;
    let mut t = CsvTable::new("orbit", &["step", "x", "y"]);
    t.meta(format!("map={map}"));
    t.meta(format!("termination={}", termination_text(&trace.termination)));
    for (k, z) in trace.points.iter().enumerate() {
        t.push(vec![k.to_string(), fmt_num(z.re), fmt_num(z.im)]);
    }
    let summary = format!(
        "orbit of {}: {} point(s), {}",
        fmt_complex(a.z0),
        trace.points.len(),
        termination_text(&trace.termination)
    );
    Ok(Report::ok(t, summary))
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{}{}i", fmt_num(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt_num(z.im.abs()))
}

fn delta(a: &DeltaArgs) -> CliResult<Report> {
    let map = a.map.build(Some("exp"))?;
    let trace = delta_sequence(&map, a.domain, a.z0, a.n)?;
    let mut t = CsvTable::new("delta", &["step", "x", "y", "eta", "log_delta", "delta"]);
    t.meta(format!("map={map} domain={}", a.domain));
    t.meta(format!("termination={}", termination_text(&trace.termination)));
    for (k, &ld) in trace.log_deltas.iter().enumerate() {
        let z = trace.points[k];
        let eta = if k == 0 { String::new() } else { fmt_num(trace.etas[k - 1]) };
        t.push(vec![k.to_string(), fmt_num(z.re), fmt_num(z.im), eta, fmt_num(ld), fmt_num(ld.exp())]);
    }
    let last = *trace.log_deltas.last().expect("delta_0 is always recorded");
    let summary = format!(
        "delta over {} step(s): log delta {}, {}",
        trace.log_deltas.len() - 1,
        short(last),
        termination_text(&trace.termination)
    );
    Ok(Report::ok(t, summary))
}

fn rect_or(r: &RectArgs, default: [f64; 4]) -> [f64; 4] {
    [
        r.re_min.unwrap_or(default[0]),
        r.re_max.unwrap_or(default[1]),
        r.im_min.unwrap_or(default[2]),
        r.im_max.unwrap_or(default[3]),
    ]
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if n == 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
}

fn expansion_grid(a: &ExpansionGridArgs) -> CliResult<Report> {
    use std::f64::consts::PI;
    let [re_min, re_max, im_min, im_max] = rect_or(&a.rect, [-50.0, -0.05, 0.05, 2.0 * PI - 0.05]);
    if a.nx == 0 || a.ny == 0 || !(re_min <= re_max && im_min <= im_max) {
        return Err(CliError::Usage("expansion grid needs nx, ny >= 1 and min <= max".into()));
    }
    let mut t = CsvTable::new("expansion-grid", &["x", "y", "value", "bound", "ok"]);
    t.meta(format!(
        "rect={},{},{},{} samples={}x{}",
        fmt_num(re_min),
        fmt_num(re_max),
        fmt_num(im_min),
        fmt_num(im_max),
        a.nx,
        a.ny
    ));
    let mut failures = 0usize;
    for x in linspace(re_min, re_max, a.nx) {
        for y in linspace(im_min, im_max, a.ny) {
            let r = exp_expansion_check(Complex64::new(x, y))?;
            failures += usize::from(!r.ok);
            t.push(vec![fmt_num(x), fmt_num(y), fmt_num(r.value), fmt_num(r.bound), r.ok.to_string()]);
        }
    }
    let summary = format!("expansion check: {} of {} samples fail", failures, a.nx * a.ny);
    Ok(Report { table: t, summary, failed: failures > 0 })
}

fn singular_escape(a: &SingularEscapeArgs) -> CliResult<Report> {
    let map = a.map.build(None)?;
    let report = singular_escape_report(&map, a.n, a.r_target)?;
    let mut t = CsvTable::new("singular-escape", &["x", "y", "escape_step", "last_x", "last_y", "period"]);
    t.meta(format!("map={map} n_max={} r_target={}", a.n, fmt_num(a.r_target)));
    let opt = |v: Option<usize>| v.map(|n| n.to_string()).unwrap_or_default();
    for o in &report.orbits {
        t.push(vec![
            fmt_num(o.value.re),
            fmt_num(o.value.im),
            opt(o.escape_step),
            fmt_num(o.last_point.re),
            fmt_num(o.last_point.im),
            opt(o.period),
        ]);
    }
    let (summary, failed) = match report.verdict {
        EscapeVerdict::Uniform { max_step, spread } => {
            (format!("verdict Uniform max_step {max_step} spread {spread}"), false)
        }
        EscapeVerdict::NotEscaping { witness, period, .. } => (
            format!(
                "verdict NotEscaping witness {}{}",
                fmt_complex(witness),
                period.map(|p| format!(" period {p}")).unwrap_or_default()
            ),
            true,
        ),
    };
    t.meta(summary.clone());
    Ok(Report { table: t, summary, failed })
}

fn sector_check(a: &SectorCheckArgs) -> CliResult<Report> {
    let map = a.map.build(None)?;
    let report = sector_report(&map, a.sigma, a.r, a.xmax, a.samples, a.kmax)?;
    let mut t = sector_report_csv(&report);
    t.meta.insert(1, format!("map={map}"));
    let (summary, failed) = match report.verdict {
        SectorVerdict::Satisfied { k } => (format!("verdict Satisfied K {}", short(k)), false),
        SectorVerdict::Violated { witness } => {
            (format!("verdict Violated witness {}", fmt_num(witness)), true)
        }
        SectorVerdict::Inconclusive => ("verdict Inconclusive".to_string(), false),
    };
    Ok(Report { table: t, summary, failed })
}

fn tract_sandwich(a: &TractSandwichArgs) -> CliResult<Report> {
    let map = a.map.build(None)?;
    let mut t = CsvTable::new("tract-sandwich", &["x", "y", "lo", "hi"]);
    t.meta(format!("map={map} R={}", fmt_num(a.big_r)));
    let mut tightest = f64::INFINITY;
    for z in parse_points(&a.z)? {
        let i = tract_distance_sandwich(&map, z, a.big_r)?;
        tightest = tightest.min(i.lo);
        t.push_nums(&[z.re, z.im, i.lo, i.hi]);
    }
    let summary =
        format!("tract sandwich at {} point(s), smallest lower bound {}", t.rows.len(), short(tightest));
    Ok(Report::ok(t, summary))
}

fn lp_check(a: &LpCheckArgs) -> CliResult<Report> {
    let zeros = a.zeros.zeros(a.truncation);
    if zeros.is_empty() {
        return Err(CliError::Usage("--N must be at least 1".into()));
    }
    let mut t = CsvTable::new("lp-check", &["x", "lhs", "rhs", "bound", "residual", "within_bound"]);
    t.meta(format!("zeros={} N={}", a.zeros, a.truncation));
    let mut parts = Vec::new();
    let mut failed = false;
    for &x in &a.x {
        let id = lp_logder_identity_check(&zeros, x)?;
        failed |= !id.within_bound();
        t.push(vec![
            fmt_num(x),
            fmt_num(id.lhs),
            fmt_num(id.rhs),
            fmt_num(id.bound),
            fmt_num(id.residual),
            id.within_bound().to_string(),
        ]);
        parts.push(format!("lhs {} rhs {} bound {}", short(id.lhs), short(id.rhs), short(id.bound)));
    }
    Ok(Report { table: t, summary: parts.join("; "), failed })
}

fn preimage(a: &PreimageScanArgs) -> CliResult<Report> {
    let map = a.map.build(None)?;
    let sector = TruncatedSector::new(a.sigma, a.theta, a.r_prime)?;
    let seeds = SeedGrid { x_max: a.xmax, spacing: a.spacing };
    let roots = preimage_scan(&map, a.w, sector, seeds, a.tol)?;
    let mut t = CsvTable::new("preimage-scan", &["x", "y", "residual"]);
    t.meta(format!(
        "map={map} w={} sigma={} theta={} r_prime={} x_max={}",
        fmt_complex(a.w),
        a.sigma,
        fmt_num(a.theta),
        fmt_num(a.r_prime),
        fmt_num(a.xmax)
    ));
    for z in &roots {
        let residual = (map.eval(*z)? - a.w).norm();
        t.push_nums(&[z.re, z.im, residual]);
    }
    Ok(Report::ok(t, format!("{} preimage(s) of {} in the sector", roots.len(), fmt_complex(a.w))))
}

fn grid(a: &EscapeGridArgs) -> CliResult<Report> {
    let map = a.map.build(None)?;
    let [re_min, re_max, im_min, im_max] = rect_or(&a.rect, [-4.0, 4.0, -4.0, 4.0]);
    let rect = Rect::new(re_min, re_max, im_min, im_max)?;
    let g = escape_grid(&map, rect, a.width, a.height, a.n, a.r_esc)?;
    if let Some(path) = &a.ppm {
        write_file(path, |w| write_ppm(&g, w))?;
    }
    let mut t = escape_grid_csv(&g);
    t.meta.insert(1, format!("map={map}"));
    let summary =
        format!("escape grid {}x{}: escaped fraction {}", g.width, g.height, short(g.escaped_fraction()));
    Ok(Report::ok(t, summary))
}
