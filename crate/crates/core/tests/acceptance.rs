//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hypdyn::hypgeo::{comparison_bounds, density_ratio};
use hypdyn::orbits::{
    delta_sequence, escape_grid, exp_expansion_check, singular_escape_report, EscapeVerdict, Rect,
    DEFAULT_ESCAPE_RADIUS,
};
use hypdyn::output::{escape_grid_csv, sector_report_csv, write_ppm, CsvTable};
use hypdyn::sector::{
    log_der_ratio, lp_logder_identity_check, sector_report, tract_distance_sandwich, SectorVerdict,
};
use hypdyn::{Complex64, Direction, EntireMap, GeneralDomain, ModelDomain, Polynomial, ZeroRule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * ((hi / lo).ln() * i as f64 / (n - 1) as f64).exp()).collect()
}

fn sharpness() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [0.5, 3f64.ln(), 2.0, 5.0] {
        let b = comparison_bounds(r).map_err(|e| e.to_string())?;
        let disk = ModelDomain::disk_of_radius(b.r_tilde).map_err(|e| e.to_string())?;
        let punctured = ModelDomain::punctured_unit_disk(b.r_tilde).map_err(|e| e.to_string())?;
        let hi = density_ratio(disk, ModelDomain::UnitDisk, c(0.0, 0.0)).map_err(|e| e.to_string())?;
        let lo = density_ratio(punctured, ModelDomain::UnitDisk, c(0.0, 0.0)).map_err(|e| e.to_string())?;
        let err = (hi - b.hi).abs().max((lo - b.lo).abs());
        ensure(err < 1e-9, || format!("R={r}: ratio ({lo}, {hi}) vs bounds ({}, {})", b.lo, b.hi))?;
        worst = worst.max(err);
    }
    Ok(format!("max |ratio − bound| = {worst:.1e}"))
}

fn asymptotics() -> Outcome {
    let bounds: Vec<_> = log_spaced(1e-3, 20.0, 64)
        .into_iter()
        .map(comparison_bounds)
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(bounds.iter().all(|b| b.lo > 1.0), || "lo(R) <= 1 somewhere".into())?;
    ensure(bounds.windows(2).all(|w| w[1].hi < w[0].hi), || "hi not strictly decreasing".into())?;
    ensure(bounds.windows(2).all(|w| w[1].lo < w[0].lo), || "lo not strictly decreasing".into())?;
    let hi10 = comparison_bounds(10.0).map_err(|e| e.to_string())?.hi;
    let lo_small = comparison_bounds(1e-3).map_err(|e| e.to_string())?.lo;
    ensure(hi10 - 1.0 < 1e-4, || format!("hi(10) − 1 = {}", hi10 - 1.0))?;
    ensure(lo_small > 100.0, || format!("lo(1e-3) = {lo_small}"))?;
    Ok(format!("hi(10) − 1 = {:.3e}, lo(1e-3) = {lo_small:.2}", hi10 - 1.0))
}

fn expansion() -> Outcome {
    let mut min_margin = f64::INFINITY;
    for i in 0..100 {
        let x = -50.0 + (50.0 - 0.1) * i as f64 / 99.0;
        for j in 0..100 {
            let y = 0.05 + (2.0 * PI - 0.1) * j as f64 / 99.0;
            let r = exp_expansion_check(c(x, y)).map_err(|e| e.to_string())?;
            ensure(r.ok, || format!("{x}+{y}i: {} < {}", r.value, r.bound))?;
            min_margin = min_margin.min(r.value - r.bound);
        }
    }
    Ok(format!("10000 points, min(value − |Re z|/4) = {min_margin:.3e}"))
}

fn delta_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let e = EntireMap::exp();
    let mut steps = 0;
    for _ in 0..100 {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let w = c(rng.gen_range(-5.0..-1.0), sign * rng.gen_range(1e-6..PI));
        let t = delta_sequence(&e, ModelDomain::STANDARD_SLIT, w, 30).map_err(|e| e.to_string())?;
        for pair in t.log_deltas.windows(2) {
            ensure(pair[1] >= pair[0] + (-1e-9f64).ln_1p(), || format!("seed {w}: {:?}", t.log_deltas))?;
        }
        steps += t.etas.len();
    }
    Ok(format!("100 seeds, {steps} recorded steps"))
}

fn koebe() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let domains = [ModelDomain::UnitDisk, ModelDomain::UpperHalfPlane, ModelDomain::STANDARD_SLIT];
    for d in domains {
        let g = GeneralDomain::from_model(d);
        let mut n = 0;
        while n < 500 {
            let z = match d {
                ModelDomain::UnitDisk => {
                    Complex64::from_polar(rng.gen_range(0.0..1.0f64).sqrt(), rng.gen_range(-PI..PI))
                }
                ModelDomain::UpperHalfPlane => c(rng.gen_range(-10.0..10.0), rng.gen_range(1e-3..10.0)),
                _ => c(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)),
            };
            if !d.contains(z) {
                continue;
            }
            let iv = g.density_bounds(z).map_err(|e| e.to_string())?;
            let rho = d.density(z).map_err(|e| e.to_string())?;
            ensure(iv.lo_known && iv.lo <= rho && rho <= iv.hi, || {
                format!("{d} at {z}: {rho} ∉ [{}, {}]", iv.lo, iv.hi)
            })?;
            n += 1;
        }
    }
    let center = GeneralDomain::from_model(ModelDomain::UnitDisk)
        .density_bounds(c(0.0, 0.0))
        .map_err(|e| e.to_string())?;
    let rho0 = ModelDomain::UnitDisk.density(c(0.0, 0.0)).map_err(|e| e.to_string())?;
    ensure((rho0 - center.hi).abs() < 1e-12, || format!("centre: {rho0} vs {}", center.hi))?;
    Ok("1500 points inside Koebe bounds; disk centre attains 2/d".into())
}

fn cor_limit() -> Outcome {
    let v = ModelDomain::punctured_unit_disk(0.5).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = (1..=40)
        .map(|n| density_ratio(v, ModelDomain::UnitDisk, c(-1.0 + 2f64.powi(-n), 0.0)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    // strict while ρ_V^U − 1 is representable, constant 1 afterwards
    ensure(ratios.windows(2).all(|w| w[1] < w[0] || (w[0] == 1.0 && w[1] == 1.0)), || {
        format!("not monotone: {ratios:?}")
    })?;
    let last = *ratios.last().unwrap();
    ensure(last < 1.0 + 1e-6, || format!("final ratio {last}"))?;
    Ok(format!("ratio(z_1) = {:.6}, ratio(z_40) − 1 = {:.1e}", ratios[0], last - 1.0))
}

fn log_der() -> Outcome {
    let r =
        sector_report(&EntireMap::exp(), Direction::Plus, 2.0, 500.0, 64, 1e3).map_err(|e| e.to_string())?;
    let k_exp = match r.verdict {
        SectorVerdict::Satisfied { k } => k,
        v => return Err(format!("exp: {v:?}")),
    };
    ensure((k_exp - 1.0).abs() < 1e-12, || format!("exp: K = {k_exp}"))?;

    let f5 = EntireMap::sinh_over_z(1.0, 5.0).map_err(|e| e.to_string())?;
    let r = sector_report(&f5, Direction::Plus, 5.0, 700.0, 128, 1e3).map_err(|e| e.to_string())?;
    let k5 = match r.verdict {
        SectorVerdict::Satisfied { k } => k,
        v => return Err(format!("sinh(1,5): {v:?}")),
    };
    ensure(k5 < 2.0, || format!("sinh(1,5): K = {k5}"))?;

    // the closed form x(coth x − 1/x)/log(sinh x/x) is the ratio of sinh(z)/z
    let closed = |x: f64| x * (1.0 / x.tanh() - 1.0 / x) / (x.sinh() / x).ln();
    let f0 = EntireMap::sinh_over_z(1.0, 0.0).map_err(|e| e.to_string())?;
    let q0 = log_der_ratio(&f0, Direction::Plus, 10.0).map_err(|e| e.to_string())?;
    ensure((q0 - 1.2850).abs() < 1e-3, || format!("ratio(10) = {q0}"))?;
    ensure((q0 - closed(10.0)).abs() < 1e-12, || format!("ratio(10) = {q0} vs {}", closed(10.0)))?;
    // with a = 5: x f'/(f log f) directly
    let q5 = log_der_ratio(&f5, Direction::Plus, 10.0).map_err(|e| e.to_string())?;
    let x: f64 = 10.0;
    let fx = x.sinh() / x + 5.0;
    let dfx = (x * x.cosh() - x.sinh()) / (x * x);
    ensure((q5 - x * dfx / (fx * fx.ln())).abs() < 1e-12, || format!("sinh(1,5) ratio(10) = {q5}"))?;
    Ok(format!("K(exp) = {k_exp}, K(sinh(1,5)) = {k5:.4}, ratio(10): a=0 {q0:.4}, a=5 {q5:.4}"))
}

fn tract_sandwich() -> Outcome {
    let e = EntireMap::exp();
    let mut checked = 0;
    for big_r in [std::f64::consts::E, 10.0] {
        for x in log_spaced(2.0 * big_r.ln() + 1.0, 600.0, 100) {
            let iv = tract_distance_sandwich(&e, c(x, 0.0), big_r).map_err(|e| e.to_string())?;
            let exact = x - big_r.ln();
            ensure(iv.contains(exact), || format!("R={big_r}, x={x}: {exact} ∉ [{}, {}]", iv.lo, iv.hi))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} points inside [1/(4Q), 2/Q]"))
}

fn lp_identity() -> Outcome {
    let seqs: [(&str, f64, f64); 3] = [("n^2", 1.0, 2.0), ("n^2pi^2", PI * PI, 2.0), ("n^3", 1.0, 3.0)];
    let mut worst: f64 = 0.0;
    for (name, scale, p) in seqs {
        let zeros = ZeroRule::new(scale, p).map_err(|e| e.to_string())?.zeros(1000);
        for k in 1..=50 {
            let x = 2.0 * k as f64;
            let id = lp_logder_identity_check(&zeros, x).map_err(|e| e.to_string())?;
            ensure(id.residual < 1e-10, || format!("{name}, x={x}: residual {}", id.residual))?;
            ensure(id.within_bound(), || format!("{name}, x={x}: {} > {}", id.lhs, id.bound))?;
            worst = worst.max(id.residual);
        }
    }
    Ok(format!("150 checks, max residual {worst:.1e}"))
}

fn precomposition() -> Outcome {
    let f = EntireMap::lp_from_rule(ZeroRule::new(PI * PI, 2.0).map_err(|e| e.to_string())?, 200)
        .map_err(|e| e.to_string())?;
    let g = f.precompose_poly(Polynomial::monomial(2)).map_err(|e| e.to_string())?;
    let (r, x_max) = (10.0, 100.0);
    let rf = sector_report(&f, Direction::Plus, r, x_max, 64, 10.0).map_err(|e| e.to_string())?;
    let rg = sector_report(&g, Direction::Plus, r, x_max, 64, 10.0).map_err(|e| e.to_string())?;
    match (rf.verdict, rg.verdict) {
        (SectorVerdict::Satisfied { k: kf }, SectorVerdict::Satisfied { k: kg }) => {
            ensure(kg <= 2.5 * kf, || format!("K(f∘z²) = {kg} > 2.5·K(f) = {}", 2.5 * kf))?;
            Ok(format!("on [{r}, {x_max}]: K(f) = {kf:.4}, K(f∘z²) = {kg:.4}"))
        }
        (a, b) => Err(format!("verdicts {a:?}, {b:?}")),
    }
}

fn singular_escape() -> Outcome {
    let f = EntireMap::sinh_over_z(1.0, 5.0).map_err(|e| e.to_string())?;
    let r = singular_escape_report(&f, 6, 1e8).map_err(|e| e.to_string())?;
    let max_step = match r.verdict {
        EscapeVerdict::Uniform { max_step, .. } => max_step,
        v => return Err(format!("sinh(1,5): {v:?}")),
    };
    ensure(r.orbits.iter().all(|o| o.escape_step.is_some_and(|n| n <= 6)), || "slow orbit".into())?;
    let e = singular_escape_report(&EntireMap::exp(), 4, 1e6).map_err(|e| e.to_string())?;
    ensure(e.orbits.len() == 1 && e.orbits[0].value == c(0.0, 0.0), || format!("{:?}", e.orbits))?;
    let step = match (e.verdict, e.orbits[0].escape_step) {
        (EscapeVerdict::Uniform { .. }, Some(n)) if n <= 4 => n,
        (v, n) => return Err(format!("exp: {v:?}, step {n:?}")),
    };
    Ok(format!(
        "sinh(1,5): {} orbits past 1e8 by step {max_step}; exp: 0 passes 1e6 at step {step}",
        r.orbits.len()
    ))
}

fn artifacts() -> Result<Vec<Vec<u8>>, String> {
    let rect = Rect::new(-4.0, 4.0, -4.0, 4.0).map_err(|e| e.to_string())?;
    let grid = escape_grid(&EntireMap::exp(), rect, 120, 90, 50, DEFAULT_ESCAPE_RADIUS)
        .map_err(|e| e.to_string())?;
    let mut ppm = Vec::new();
    write_ppm(&grid, &mut ppm).map_err(|e| e.to_string())?;
    let f = EntireMap::sinh_over_z(1.0, 5.0).map_err(|e| e.to_string())?;
    let sector = sector_report(&f, Direction::Plus, 5.0, 700.0, 128, 1e3).map_err(|e| e.to_string())?;
    let mut bounds = CsvTable::new("metric-bounds", &["R", "lo", "hi", "r_tilde"]);
    for r in log_spaced(1e-3, 20.0, 64) {
        let b = comparison_bounds(r).map_err(|e| e.to_string())?;
        bounds.push_nums(&[r, b.lo, b.hi, b.r_tilde]);
    }
    Ok(vec![
        escape_grid_csv(&grid).to_csv_string().into_bytes(),
        ppm,
        sector_report_csv(&sector).to_csv_string().into_bytes(),
        bounds.to_csv_string().into_bytes(),
    ])
}

fn determinism() -> Outcome {
    let a = artifacts()?;
    let b = artifacts()?;
    ensure(a == b, || "outputs differ between runs".into())?;
    let bytes: usize = a.iter().map(Vec::len).sum();
    Ok(format!("{} artifacts, {bytes} bytes identical across runs", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 12] = [
        ("comparison bounds are sharp", sharpness, Some(Duration::from_secs(1))),
        ("comparison bound asymptotics", asymptotics, Some(Duration::from_secs(1))),
        ("exp expansion inequality", expansion, Some(Duration::from_secs(1))),
        ("delta_n monotone for exp on the slit plane", delta_monotonicity, Some(Duration::from_secs(1))),
        ("Koebe sandwich", koebe, Some(Duration::from_secs(1))),
        ("density ratio tends to 1 at the boundary", cor_limit, None),
        ("logarithmic-derivative sector test", log_der, None),
        ("tract-distance sandwich for exp", tract_sandwich, None),
        ("Laguerre-Polya identity", lp_identity, Some(Duration::from_secs(2))),
        ("sector condition under z^2 precomposition", precomposition, None),
        ("uniform singular-orbit escape", singular_escape, None),
        ("byte-identical outputs", determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, budget) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:?}, budget {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("[PASS] criterion {:>2}: {name} ({detail}; {elapsed:.2?})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("[FAIL] criterion {:>2}: {name} ({detail}; {elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
