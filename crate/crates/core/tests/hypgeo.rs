use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use hypdyn::hypgeo::{
    comparison_bounds, curve_length, density_ratio, disk_distance_from_origin, hyp_derivative, CircularArc,
    Path, Polyline, Segment,
};
use hypdyn::{Complex64, Direction, EntireMap, Error, GeneralDomain, ModelDomain};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const SLIT: ModelDomain = ModelDomain::STANDARD_SLIT;

/// Reference values of the comparison bounds, 20 significant digits.
const BOUNDS_TABLE: [(f64, f64, f64); 6] = [
    (0.5, 1.3640851846059069554, 4.0829881650735965683),
    (2.0, 1.0124075700753659757, 1.3130352854993313036),
    (5.0, 1.0000302678107801276, 1.0135673098126084622),
    (10.0, 1.0000000013741024174, 1.0000908039820193755),
    (0.001, 131.56330155432492036, 2000.0001666666638889),
    (20.0, 1.0000000000000000028, 1.0000000041223072534),
];

#[test]
fn comparison_bounds_against_reference_values() {
    for (r, lo, hi) in BOUNDS_TABLE {
        let b = comparison_bounds(r).unwrap();
        assert_relative_eq!(b.lo, lo, max_relative = 1e-13);
        assert_relative_eq!(b.hi, hi, max_relative = 1e-13);
    }
    let b = comparison_bounds(3f64.ln()).unwrap();
    assert_relative_eq!(b.hi, 2.0, max_relative = 1e-14);
    assert_relative_eq!(b.r_tilde, 0.5, max_relative = 1e-14);
    assert_relative_eq!(b.lo, 6.0 / (8.0 * 2f64.ln()), max_relative = 1e-14);
    assert!(comparison_bounds(0.0).is_err());
    assert!(comparison_bounds(-1.0).is_err());
}

#[test]
fn comparison_bounds_are_sharp() {
    for r in [0.5, 3f64.ln(), 2.0, 5.0] {
        let b = comparison_bounds(r).unwrap();
        let upper = density_ratio(
            ModelDomain::disk_of_radius(b.r_tilde).unwrap(),
            ModelDomain::UnitDisk,
            c(0.0, 0.0),
        )
        .unwrap();
        let lower = density_ratio(
            ModelDomain::punctured_unit_disk(b.r_tilde).unwrap(),
            ModelDomain::UnitDisk,
            c(0.0, 0.0),
        )
        .unwrap();
        assert!((upper - b.hi).abs() < 1e-9, "R={r}: {upper} vs {}", b.hi);
        assert!((lower - b.lo).abs() < 1e-9, "R={r}: {lower} vs {}", b.lo);
        // R is the disk distance from 0 to the complement
        assert_relative_eq!(disk_distance_from_origin(c(b.r_tilde, 0.0)).unwrap(), r, max_relative = 1e-12);
    }
}

#[test]
fn comparison_bounds_asymptotics() {
    let xs: Vec<f64> = (0..64).map(|i| 1e-3 * (2e4f64.ln() * i as f64 / 63.0).exp()).collect();
    let bounds: Vec<_> = xs.iter().map(|&r| comparison_bounds(r).unwrap()).collect();
    assert!(bounds.iter().all(|b| b.lo > 1.0 && b.lo <= b.hi));
    assert!(bounds.windows(2).all(|w| w[1].hi < w[0].hi));
    assert!(bounds.windows(2).all(|w| w[1].lo < w[0].lo));
    assert!(comparison_bounds(10.0).unwrap().hi - 1.0 < 1e-4);
    assert!(comparison_bounds(1e-3).unwrap().lo > 100.0);
}

#[test]
fn density_ratio_of_identity_inclusion() {
    for d in [ModelDomain::UnitDisk, SLIT, ModelDomain::UpperHalfPlane] {
        let z = c(-0.3, 0.4);
        assert_eq!(density_ratio(d, d, z).unwrap(), 1.0);
    }
}

#[test]
fn density_ratio_rejects_non_inclusions() {
    let u = ModelDomain::UnitDisk;
    assert!(density_ratio(u, ModelDomain::disk_of_radius(0.5).unwrap(), c(0.0, 0.0)).is_err());
    let a = ModelDomain::SlitPlane { base: 1.0, dir: Direction::Plus };
    // ℂ∖[0,∞) ⊂ ℂ∖[1,∞) but not conversely
    assert!(density_ratio(SLIT, a, c(-1.0, 0.0)).is_ok());
    assert!(density_ratio(a, SLIT, c(-1.0, 0.0)).is_err());
    assert!(density_ratio(SLIT, a, c(0.5, 0.0)).is_err());
}

#[test]
fn slit_in_slit_ratio_is_at_least_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let outer = ModelDomain::SlitPlane { base: 2.0, dir: Direction::Plus };
    for _ in 0..200 {
        let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if !SLIT.contains(z) {
            continue;
        }
        let q = density_ratio(SLIT, outer, z).unwrap();
        assert!(q >= 1.0 - 1e-12, "{z}: {q}");
    }
}

#[test]
fn cor_3_3_limit_is_monotone() {
    let v = ModelDomain::punctured_unit_disk(0.5).unwrap();
    let ratios: Vec<f64> = (1..=40)
        .map(|n| density_ratio(v, ModelDomain::UnitDisk, c(-1.0 + 2f64.powi(-n), 0.0)).unwrap())
        .collect();
    // strictly decreasing until ρ_V^U − 1 drops below double precision
    assert!(ratios.windows(2).all(|w| w[1] < w[0] || (w[0] == 1.0 && w[1] == 1.0)), "{ratios:?}");
    assert!(*ratios.last().unwrap() < 1.0 + 1e-6);
    assert!(ratios.iter().all(|&q| q >= 1.0));
    assert!(ratios[..20].iter().all(|&q| q > 1.0));
}

#[test]
fn model_density_examples() {
    assert_eq!(ModelDomain::UnitDisk.density(c(0.0, 0.0)).unwrap(), 2.0);
    assert_relative_eq!(SLIT.density(c(-1.0, 0.0)).unwrap(), 0.5, max_relative = 1e-15);
    assert_relative_eq!(ModelDomain::UpperHalfPlane.density(c(3.0, 2.0)).unwrap(), 0.5);
    let a = ModelDomain::annulus(0.5, 2.0).unwrap();
    assert_relative_eq!(a.density(c(1.0, 0.0)).unwrap(), PI / (2.0 * 2f64.ln()), max_relative = 1e-14);
    assert_relative_eq!(a.density(c(1.0, 0.0)).unwrap(), 2.266180070913597, max_relative = 1e-14);
    let p = ModelDomain::PuncturedDisk.density(c(0.5, 0.0)).unwrap();
    assert_relative_eq!(p, 1.0 / (0.5 * 2f64.ln()), max_relative = 1e-14);
}

#[test]
fn densities_reject_boundary_and_exterior() {
    let cases = [
        (ModelDomain::UnitDisk, c(1.0, 0.0)),
        (ModelDomain::UpperHalfPlane, c(1.0, 0.0)),
        (ModelDomain::PuncturedDisk, c(0.0, 0.0)),
        (SLIT, c(3.0, 0.0)),
        (ModelDomain::annulus(1.0, 2.0).unwrap(), c(0.5, 0.0)),
        (ModelDomain::punctured_unit_disk(0.5).unwrap(), c(0.5, 0.0)),
        (ModelDomain::disk_of_radius(0.5).unwrap(), c(0.0, 0.6)),
    ];
    for (d, z) in cases {
        assert!(matches!(d.density(z), Err(Error::DomainViolation { .. })), "{d} at {z}");
    }
    assert!(ModelDomain::annulus(2.0, 1.0).is_err());
    assert!(ModelDomain::punctured_unit_disk(1.0).is_err());
}

#[test]
fn slit_density_matches_explicit_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let z = Complex64::from_polar(rng.gen_range(0.01..100.0), rng.gen_range(0.01..2.0 * PI - 0.01));
        let mut arg = z.arg();
        if arg < 0.0 {
            arg += 2.0 * PI;
        }
        let explicit = 1.0 / (2.0 * z.norm() * (arg / 2.0).sin());
        assert_relative_eq!(SLIT.density(z).unwrap(), explicit, max_relative = 1e-12);
        // reflected ray: ℂ∖(−∞, 0] is the rotated copy
        let minus = ModelDomain::SlitPlane { base: 0.0, dir: Direction::Minus };
        assert_relative_eq!(minus.density(-z).unwrap(), explicit, max_relative = 1e-12);
        // translated ray
        let shifted = ModelDomain::SlitPlane { base: 3.0, dir: Direction::Plus };
        assert_relative_eq!(shifted.density(z + 3.0).unwrap(), explicit, max_relative = 1e-10);
    }
}

#[test]
fn slit_two_sided_estimate() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..1000 {
        let z = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        if !SLIT.contains(z) {
            continue;
        }
        let rho = SLIT.density(z).unwrap();
        assert!(rho >= 1.0 / (2.0 * z.norm()) * (1.0 - 1e-15));
        if z.re < 0.0 {
            assert!(rho <= 2.0 / z.norm());
        }
    }
}

#[test]
fn punctured_disk_is_mobius_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for &p in &[0.1, 0.5, 0.9] {
        let d = ModelDomain::punctured_unit_disk(p).unwrap();
        for _ in 0..200 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.999), rng.gen_range(-PI..PI));
            if (z - p).norm() < 1e-6 {
                continue;
            }
            let m = (z - p) / (1.0 - p * z);
            let dm = (1.0 - p * p) / ((1.0 - p * z) * (1.0 - p * z));
            let w = m.norm();
            let expect = dm.norm() / (w * -w.ln());
            assert_relative_eq!(d.density(z).unwrap(), expect, max_relative = 1e-9);
            assert!(d.density(z).unwrap() > ModelDomain::UnitDisk.density(z).unwrap());
        }
    }
}

#[test]
fn annulus_density_symmetries() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let (r_in, r_out) = (0.3, 5.0);
    let a = ModelDomain::annulus(r_in, r_out).unwrap();
    let bigger = ModelDomain::annulus(0.2, 6.0).unwrap();
    for _ in 0..300 {
        let z = Complex64::from_polar(rng.gen_range(r_in * 1.001..r_out * 0.999), rng.gen_range(-PI..PI));
        let rho = a.density(z).unwrap();
        // inversion z ↦ r_in·r_out/z is an automorphism
        let k = r_in * r_out;
        let w = k / z;
        assert_relative_eq!(rho, a.density(w).unwrap() * k / z.norm_sqr(), max_relative = 1e-10);
        // rotation invariance
        assert_relative_eq!(rho, a.density(c(z.norm(), 0.0)).unwrap(), max_relative = 1e-12);
        // Koebe upper bound and Schwarz–Pick
        assert!(rho <= 2.0 / a.boundary_distance(z));
        assert!(rho > bigger.density(z).unwrap());
    }
}

#[test]
fn schwarz_pick_for_smaller_disks() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for k in 1..=9 {
        let r = k as f64 / 10.0;
        let v = ModelDomain::disk_of_radius(r).unwrap();
        for _ in 0..200 {
            let z = Complex64::from_polar(r * rng.gen_range(0.0..0.999f64).sqrt(), rng.gen_range(-PI..PI));
            assert!(v.density(z).unwrap() > ModelDomain::UnitDisk.density(z).unwrap());
        }
    }
}

fn random_interior(d: ModelDomain, rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = match d {
            ModelDomain::UnitDisk => {
                Complex64::from_polar(rng.gen_range(0.0..1.0f64).sqrt(), rng.gen_range(-PI..PI))
            }
            ModelDomain::UpperHalfPlane => c(rng.gen_range(-20.0..20.0), rng.gen_range(1e-3..20.0)),
            _ => c(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)),
        };
        if d.contains(z) {
            return z;
        }
    }
}

#[test]
fn koebe_sandwich_for_simply_connected_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let domains = [
        ModelDomain::UnitDisk,
        ModelDomain::UpperHalfPlane,
        SLIT,
        ModelDomain::SlitPlane { base: -2.0, dir: Direction::Minus },
        ModelDomain::disk_of_radius(3.0).unwrap(),
    ];
    for d in domains {
        let g = GeneralDomain::from_model(d);
        assert!(g.is_simply_connected());
        for _ in 0..500 {
            let z = random_interior(d, &mut rng);
            let bounds = g.density_bounds(z).unwrap();
            let rho = d.density(z).unwrap();
            assert!(bounds.lo_known);
            assert!(bounds.lo * (1.0 - 1e-12) <= rho && rho <= bounds.hi * (1.0 + 1e-12), "{d} {z}");
        }
    }
    let disk = GeneralDomain::from_model(ModelDomain::UnitDisk);
    let b = disk.density_bounds(c(0.0, 0.0)).unwrap();
    assert!((b.hi - 2.0).abs() < 1e-12 && (b.lo - 0.5).abs() < 1e-12);
    let b = GeneralDomain::from_model(SLIT).density_bounds(c(-1.0, 0.0)).unwrap();
    assert!((b.lo - 0.5).abs() < 1e-12);
}

#[test]
fn koebe_lower_bound_unknown_for_multiply_connected() {
    let g = GeneralDomain::from_model(ModelDomain::annulus(1.0, 3.0).unwrap());
    assert!(!g.is_simply_connected());
    let b = g.density_bounds(c(2.0, 0.0)).unwrap();
    assert!(!b.lo_known);
    assert_eq!(b.hi, 2.0);
    let strip = GeneralDomain::new("strip |Im z| < 1", |z: Complex64| (1.0 - z.im.abs()).max(0.0), true);
    let b = strip.density_bounds(c(4.0, 0.0)).unwrap();
    // ρ = π/4 on the centre line of the width-2 strip
    assert!(b.contains(PI / 4.0));
    assert!(matches!(strip.density_bounds(c(0.0, 1.0)), Err(Error::DomainViolation { .. })));
}

#[test]
fn disk_distance_examples() {
    assert_eq!(disk_distance_from_origin(c(0.0, 0.0)).unwrap(), 0.0);
    assert_relative_eq!(disk_distance_from_origin(c(0.5, 0.0)).unwrap(), 3f64.ln(), max_relative = 1e-15);
    assert!(disk_distance_from_origin(c(0.0, 1.0)).is_err());
}

#[test]
fn radial_length_equals_disk_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..50 {
        let z = Complex64::from_polar(rng.gen_range(0.01..0.99), rng.gen_range(-PI..PI));
        let seg = Segment { from: c(0.0, 0.0), to: z };
        let len = curve_length(ModelDomain::UnitDisk, &seg, 1e-11).unwrap();
        assert!((len - disk_distance_from_origin(z).unwrap()).abs() < 1e-9, "{z}");
    }
    let half = curve_length(ModelDomain::UnitDisk, &Segment { from: c(0.0, 0.0), to: c(0.5, 0.0) }, 1e-11);
    assert!((half.unwrap() - 3f64.ln()).abs() < 1e-9);
}

#[test]
fn slit_circle_length_is_scale_invariant() {
    let eps: f64 = 0.05;
    // ∫_ε^{2π−ε} dθ/(2 sin(θ/2)) = 2·ln cot(ε/4)
    let closed = 2.0 * (1.0 / (eps / 4.0).tan()).ln();
    let mut lens = Vec::new();
    for r in [1.0, 100.0] {
        let arc = CircularArc { center: c(0.0, 0.0), radius: r, start: eps, end: 2.0 * PI - eps };
        let len = curve_length(SLIT, &arc, 1e-10).unwrap();
        assert!((len - closed).abs() < 1e-8, "r={r}: {len} vs {closed}");
        lens.push(len);
    }
    assert!((lens[0] - lens[1]).abs() < 1e-6);
}

#[test]
fn half_circle_through_negative_axis() {
    for r in [0.1, 1.0, 37.0] {
        let arc = CircularArc { center: c(0.0, 0.0), radius: r, start: FRAC_PI_2, end: 3.0 * FRAC_PI_2 };
        let len = curve_length(SLIT, &arc, 1e-10).unwrap();
        let closed = 2.0 * (3.0 * PI / 8.0).tan().ln();
        assert!((len - closed).abs() < 1e-8);
        assert!(len <= 8.0 * PI);
    }
}

#[test]
fn curve_length_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..20 {
        let pts: Vec<Complex64> =
            (0..4).map(|_| c(rng.gen_range(-3.0..-0.5), rng.gen_range(-3.0..3.0))).collect();
        let whole = curve_length(SLIT, &Polyline(pts.clone()), 1e-11).unwrap();
        let parts: f64 = pts
            .windows(2)
            .map(|w| curve_length(SLIT, &Segment { from: w[0], to: w[1] }, 1e-11).unwrap())
            .sum();
        assert!((whole - parts).abs() < 1e-9);
        let a = curve_length(SLIT, &Polyline(pts[..3].to_vec()), 1e-11).unwrap();
        let b = curve_length(SLIT, &Polyline(pts[2..].to_vec()), 1e-11).unwrap();
        assert!((whole - a - b).abs() < 1e-9);
    }
}

/// The arc `center + r·e^{iθ}` with `θ = start + (end − start)·t²`.
struct QuadraticArc(CircularArc);

impl Path for QuadraticArc {
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0, 1.0]
    }
    fn point(&self, t: f64) -> Complex64 {
        let a = self.0;
        a.point(a.start + (a.end - a.start) * t * t)
    }
    fn velocity(&self, _piece: usize, t: f64) -> Complex64 {
        let a = self.0;
        a.velocity(0, a.start + (a.end - a.start) * t * t) * (2.0 * (a.end - a.start) * t)
    }
}

#[test]
fn curve_length_is_parameterization_invariant() {
    let arc = CircularArc { center: c(-1.0, 0.5), radius: 0.8, start: 0.3, end: 4.0 };
    let a = curve_length(SLIT, &arc, 1e-10).unwrap();
    let b = curve_length(SLIT, &QuadraticArc(arc), 1e-10).unwrap();
    assert!((a - b).abs() < 1e-9);
    let reversed = CircularArc { start: arc.end, end: arc.start, ..arc };
    assert!((curve_length(SLIT, &reversed, 1e-10).unwrap() - a).abs() < 1e-12);
}

#[test]
fn curve_touching_boundary_is_rejected() {
    let seg = Segment { from: c(-1.0, 1.0), to: c(1.0, -1.0) };
    assert!(matches!(curve_length(SLIT, &seg, 1e-8), Err(Error::DomainViolation { .. })));
}

#[test]
fn hyperbolic_derivative_examples() {
    let e = EntireMap::exp();
    let v = hyp_derivative(&e, SLIT, SLIT, c(-4.0, PI)).unwrap();
    // |e^z| = e^{-4}, ρ(−e^{-4}) = e^4/2, ρ(−4+iπ) from the explicit formula
    let z = c(-4.0, PI);
    let rho_z = 1.0 / (2.0 * z.norm() * (z.arg() / 2.0).sin());
    assert_relative_eq!(v, (-4f64).exp() * (4f64.exp() / 2.0) / rho_z, max_relative = 1e-12);
    assert!((v - 4.806).abs() < 1e-3, "{v}");
    assert!(hyp_derivative(&e, SLIT, SLIT, c(-10.0, 1.0)).unwrap() >= 2.5);
    // e^z maps the strip 0 < Im z < 2π isometrically onto the slit plane,
    // where the strip density is 1/(2 sin(Im z/2))
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..200 {
        let z = c(rng.gen_range(-30.0..30.0), rng.gen_range(0.01..2.0 * PI - 0.01));
        let w = z.exp();
        let pulled_back = w.norm() * SLIT.density(w).unwrap();
        assert_relative_eq!(pulled_back, 1.0 / (2.0 * (z.im / 2.0).sin()), max_relative = 1e-10);
    }
}

#[test]
fn polyline_needs_two_vertices() {
    assert!(curve_length(SLIT, &Polyline(vec![c(-1.0, 0.0)]), 1e-8).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn comparison_bounds_ordered(r in 1e-3f64..30.0) {
        let b = comparison_bounds(r).unwrap();
        prop_assert!(1.0 <= b.lo && b.lo <= b.hi);
        prop_assert!(b.r_tilde > 0.0 && b.r_tilde < 1.0 || r > 18.0);
    }

    #[test]
    fn inclusion_ratio_between_comparison_bounds(p in 0.05f64..0.95, re in -0.9f64..0.9, im in -0.9f64..0.9) {
        // V = 𝔻∖{p}, U = 𝔻 at z: R = d_𝔻(z, p)
        let z = c(re, im);
        prop_assume!(z.norm() < 0.95 && (z - p).norm() > 1e-3);
        let m = ((z - p) / (1.0 - p * z)).norm();
        let r = ((1.0 + m) / (1.0 - m)).ln();
        let b = comparison_bounds(r).unwrap();
        let q = density_ratio(ModelDomain::punctured_unit_disk(p).unwrap(), ModelDomain::UnitDisk, z).unwrap();
        prop_assert!(b.lo * (1.0 - 1e-9) <= q && q <= b.hi * (1.0 + 1e-9));
    }

    #[test]
    fn disk_ratio_between_comparison_bounds(r0 in 0.05f64..0.95, t in 0.0f64..0.99, th in -PI..PI) {
        // V = D_{r0}, U = 𝔻 at z: R = d_𝔻(z, 𝔻∖V), attained on the circle |w| = r0 along the ray
        let z = Complex64::from_polar(r0 * t, th);
        let m = (r0 - z.norm()) / (1.0 - r0 * z.norm());
        let r = ((1.0 + m) / (1.0 - m)).ln();
        prop_assume!(r > 1e-6);
        let b = comparison_bounds(r).unwrap();
        let q = density_ratio(ModelDomain::disk_of_radius(r0).unwrap(), ModelDomain::UnitDisk, z).unwrap();
        prop_assert!(b.lo * (1.0 - 1e-9) <= q && q <= b.hi * (1.0 + 1e-9));
    }
}
