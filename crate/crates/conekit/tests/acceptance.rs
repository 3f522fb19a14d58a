//! Release gate: the nine headline checks, one test per criterion.
//!
//! Each test prints a single `criterion N (...): PASS/FAIL (...s)` line
//! (visible under `--nocapture`) and enforces both the numeric
//! tolerances, which are pinned inline, and the runtime budget.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use conekit::config::{three_point_config, two_point_config, Angle, ConeConfig, MarkedPoint};
use conekit::curvesing::{
    analyze_germ, flat_cone_angle_window, rescaling_exponent, RescalingVerdict,
};
use conekit::energy::{
    arrangements, cuspidal_cubic_volume_bound, elliptic_energy_split, quartic_energy_split,
};
use conekit::expr::parse_poly;
use conekit::flatcone::{flat_cone_from_base, FlatConeMetric};
use conekit::lift::{build_connection, hopf_lift, ConnectionForm};
use conekit::rational::{rat, rat_int};
use conekit::reflection::{self, degree_by_preimages, RationalMap};
use conekit::sample;
use conekit::spherical::{Chart, SolverOptions, SphericalMetric};

// ---------------------------------------------------------------------------
// Harness

struct Criterion {
    label: &'static str,
    start: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion {
            label,
            start: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn check_le(&mut self, what: &str, value: f64, bound: f64) {
        if !(value.is_finite() && value.abs() <= bound) {
            self.failures
                .push(format!("{what}: |{value:e}| > {bound:e}"));
        }
    }

    fn finish(mut self, budget: Duration) {
        let elapsed = self.start.elapsed();
        if elapsed > budget {
            self.failures.push(format!(
                "runtime {:.1}s exceeds the {:.0}s budget",
                elapsed.as_secs_f64(),
                budget.as_secs_f64()
            ));
        }
        let verdict = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        println!(
            "{}: {} ({:.1}s)",
            self.label,
            verdict,
            elapsed.as_secs_f64()
        );
        assert!(
            self.failures.is_empty(),
            "{} failed:\n  {}",
            self.label,
            self.failures.join("\n  ")
        );
    }
}

/// The solver-produced metric with angles (1/2, 2/3, 2/3), shared by the
/// flat-cone and solver criteria; solved once at the full 257² grid.
fn solved_three_point() -> &'static SphericalMetric {
    static SOLVED: OnceLock<SphericalMetric> = OnceLock::new();
    SOLVED.get_or_init(|| {
        let config = three_point_config(
            Angle::exact(1, 2),
            Angle::exact(2, 3),
            Angle::exact(2, 3),
        );
        SphericalMetric::solve(&config, 4.0, &SolverOptions::coarse(257))
            .expect("the (1/2, 2/3, 2/3) configuration is admissible and must solve")
    })
}

fn uniform_config(points: Vec<MarkedPoint>, num: i64, den: i64) -> ConeConfig {
    let angles = points.iter().map(|_| Angle::exact(num, den)).collect();
    ConeConfig::new(points, angles).expect("distinct marked points")
}

// ---------------------------------------------------------------------------
// 1. Arrangement ledger

#[test]
fn criterion_1_arrangement_ledger() {
    let mut c = Criterion::new("criterion 1 (arrangement ledger)");
    let zero = BigRational::zero();

    for m in 2..=20u32 {
        let ledger = arrangements::a0(m).unwrap().ledger().unwrap();
        c.check(
            format!("A0({m}) residual = {}", ledger.residual),
            ledger.residual == zero,
        );
        c.check(
            format!("A0({m}) total = {}", ledger.total_energy),
            ledger.total_energy == rat_int(9 * i64::from(m) - 6),
        );
        let ledger = arrangements::a3(m).unwrap().ledger().unwrap();
        c.check(
            format!("A3({m}) residual = {}", ledger.residual),
            ledger.residual == zero,
        );
    }
    for (arr, total) in [
        (arrangements::hesse(), 30),
        (arrangements::extended_hesse(), 57),
        (arrangements::icosahedral(), 39),
        (arrangements::g168(), 57),
        (arrangements::a6(), 129),
    ] {
        let name = arr.name.clone();
        let ledger = arr.ledger().unwrap();
        c.check(
            format!("{name} residual = {}", ledger.residual),
            ledger.residual == zero,
        );
        c.check(
            format!("{name} total = {}", ledger.total_energy),
            ledger.total_energy == rat_int(total),
        );
    }
    c.finish(Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// 2. Singularity exponents

#[test]
fn criterion_2_singularity_exponents() {
    let mut c = Criterion::new("criterion 2 (singularity exponents)");
    let c0_of = |text: &str| analyze_germ(&parse_poly(text).unwrap()).unwrap().c0;

    c.check("c0(w^2 - z^3) = 5/6", c0_of("w^2 - z^3") == rat(5, 6));
    for (m, n) in [(2i64, 5i64), (3, 4), (2, 7), (3, 5)] {
        let text = format!("w^{m} - z^{n}");
        c.check(
            format!("c0({text}) = 1/{m} + 1/{n}"),
            c0_of(&text) == rat(1, m) + rat(1, n),
        );
    }
    for d in 3i64..=8 {
        // `w^d − z^d` is a product of d distinct lines through the origin.
        let text = format!("w^{d} - z^{d}");
        c.check(format!("c0({text}) = 2/{d}"), c0_of(&text) == rat(2, d));
    }
    // The same count through the parenthesized product form.
    c.check(
        "c0((w - z)*(w + z)*w) = 2/3",
        c0_of("(w - z)*(w + z)*w") == rat(2, 3),
    );
    c.finish(Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// 3. Tangent-cone threshold

#[test]
fn criterion_3_tangent_cone_threshold() {
    let mut c = Criterion::new("criterion 3 (tangent-cone threshold)");
    let verdict_at = |m: u32, n: u32, beta: &BigRational| {
        rescaling_exponent(m, n, beta).unwrap().verdict
    };

    // The cusp: sign change exactly at 5/6.
    let t = rat(5, 6);
    let eps = rat(1, 1000);
    c.check(
        "(2,3) boundary at 5/6",
        verdict_at(2, 3, &t) == RescalingVerdict::Boundary,
    );
    c.check(
        "(2,3) exponent vanishes at 5/6",
        rescaling_exponent(2, 3, &t).unwrap().exponent.is_zero(),
    );
    c.check(
        "(2,3) product cone above",
        verdict_at(2, 3, &(&t + &eps)) == RescalingVerdict::ProductCone,
    );
    c.check(
        "(2,3) non-product below",
        verdict_at(2, 3, &(&t - &eps)) == RescalingVerdict::NonProduct,
    );

    // All co-prime (m, n) with 2 ≤ m < n ≤ 9, m ≤ 5: threshold at
    // 1 − 1/m + 1/n, strictly between the window endpoints and 1.
    for m in 2u32..=5 {
        for n in (m + 1)..=9 {
            if m.gcd(&n) != 1 {
                continue;
            }
            let hi = BigRational::one() - rat(1, i64::from(m)) + rat(1, i64::from(n));
            let (_, window_hi) = flat_cone_angle_window(m, n).unwrap();
            c.check(format!("({m},{n}) window endpoint"), window_hi == hi);
            c.check(
                format!("({m},{n}) boundary at endpoint"),
                verdict_at(m, n, &hi) == RescalingVerdict::Boundary,
            );
            let above = (&hi + BigRational::one()) / rat_int(2);
            c.check(
                format!("({m},{n}) product cone above"),
                verdict_at(m, n, &above) == RescalingVerdict::ProductCone,
            );
            let below = &hi - &eps;
            c.check(
                format!("({m},{n}) non-product below"),
                verdict_at(m, n, &below) == RescalingVerdict::NonProduct,
            );
        }
    }
    c.finish(Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// 4. Rugby-ball curvature and area

#[test]
fn criterion_4_rugby_curvature_and_area() {
    let mut c = Criterion::new("criterion 4 (rugby curvature and area)");
    let origin = [Complex64::new(0.0, 0.0)];
    for beta in [0.3f64, 0.5, 0.8] {
        let metric = SphericalMetric::rugby(beta, 1.0).unwrap();
        let mut rng = sample::rng(sample::DEFAULT_SEED);
        let mut worst = 0.0f64;
        for p in sample::points_avoiding(&mut rng, 100, 1.6, &origin, 0.2) {
            worst = worst.max((metric.curvature(Chart::Xi, p, 1e-3) - 1.0).abs());
        }
        c.check_le(&format!("beta = {beta}: sup |K - 1|"), worst, 1e-4);
        let area = metric.total_area(384);
        c.check_le(
            &format!("beta = {beta}: area defect"),
            area / metric.expected_area() - 1.0,
            1e-3,
        );
    }
    c.finish(Duration::from_secs(10));
}

// ---------------------------------------------------------------------------
// 5. Reflection-group suite

#[test]
fn criterion_5_reflection_suite() {
    let mut c = Criterion::new("criterion 5 (reflection-group suite)");

    for m in 2..=6u32 {
        let map = RationalMap::rugby(m).unwrap();
        let counted = degree_by_preimages(&map, 3).unwrap();
        c.check(
            format!("equal-degree family 2m = {}: counted {counted}", 2 * m),
            counted == 2 * m as usize,
        );
    }
    for (map, expected) in [
        (RationalMap::tetrahedral(), 12usize),
        (RationalMap::octahedral(), 24),
        (RationalMap::icosahedral(), 60),
    ] {
        let counted = degree_by_preimages(&map, 3).unwrap();
        c.check(
            format!("degree-{expected} map: counted {counted}"),
            counted == expected,
        );
    }

    c.check_le(
        "pullback of the closed-form base to the round sphere",
        reflection::pullback_round_defect(200),
        1e-9,
    );

    // The normalization constant 8√2, recovered from the ratio of the
    // flat-cone potential to its square-root profile, and the exact
    // pullback of the quotient potential to the Euclidean one.
    let cone = flat_cone_from_base(&SphericalMetric::g222()).unwrap();
    let mut rng = sample::rng(sample::DEFAULT_SEED);
    let mut worst_const = 0.0f64;
    let mut worst_euclid = 0.0f64;
    for _ in 0..50 {
        let u = sample::complex_in_annulus(&mut rng, 0.2, 1.5);
        let v = sample::complex_in_annulus(&mut rng, 0.2, 1.5);
        let profile = (u.norm() + v.norm() + (u - v).norm()).sqrt();
        let a = cone.potential(u, v) / profile;
        worst_const = worst_const.max((a - reflection::g222_potential_constant()).abs());

        let x1 = sample::complex_in_annulus(&mut rng, 0.3, 1.3);
        let x2 = sample::complex_in_annulus(&mut rng, 0.3, 1.3);
        let (p, q) = (x1 * x1, x2 * x2);
        let pulled = reflection::quotient_potential(2, p * q, (p + q) * (p + q) / 4.0);
        let euclid = x1.norm_sqr() + x2.norm_sqr();
        worst_euclid = worst_euclid.max((pulled / euclid - 1.0).abs());
    }
    c.check_le("potential constant a - 8*sqrt(2)", worst_const, 1e-9);
    c.check_le("quotient potential vs Euclidean", worst_euclid, 1e-9);
    c.finish(Duration::from_secs(30));
}

// ---------------------------------------------------------------------------
// 6. Flat-cone volume identity

fn volume_identity_sup(
    cone: &FlatConeMetric,
    samples: usize,
    step: f64,
    seed: u64,
) -> (f64, Vec<(Complex64, Complex64)>) {
    let mut rng = sample::rng(seed);
    let mut points = Vec::new();
    while points.len() < samples {
        let z = sample::complex_in_annulus(&mut rng, 0.3, 1.6);
        let w = sample::complex_in_annulus(&mut rng, 0.3, 1.6);
        if cone.singular_distance(z, w) > 0.15 {
            points.push((z, w));
        }
    }
    let mut worst = 0.0f64;
    for &(z, w) in &points {
        let defect = cone
            .volume_identity_defect(z, w, step)
            .expect("sample point is clear of the singular locus");
        worst = worst.max(defect.abs());
    }
    (worst, points)
}

#[test]
fn criterion_6_flatcone_volume_identity() {
    // The shared solve is timed under criterion 7 (the solver criterion);
    // this one times the Hessian sampling.
    let solved = solved_three_point();
    let mut c = Criterion::new("criterion 6 (flat-cone volume identity)");

    for beta in [0.4f64, 0.7] {
        let cone =
            flat_cone_from_base(&SphericalMetric::rugby(beta, 4.0).unwrap()).unwrap();
        let (worst, points) = volume_identity_sup(&cone, 50, 2e-3, sample::DEFAULT_SEED);
        c.check_le(
            &format!("product cone beta = {beta}: volume identity"),
            worst,
            1e-3,
        );
        c.check_le(
            &format!("product cone beta = {beta}: scaling law"),
            cone.scaling_check(1.7, &points).unwrap(),
            1e-6,
        );
    }

    let cone = flat_cone_from_base(solved).unwrap();
    let (worst, points) = volume_identity_sup(&cone, 50, 2e-3, sample::DEFAULT_SEED);
    c.check_le("solver-based cone: volume identity", worst, 1e-3);
    c.check_le(
        "solver-based cone: scaling law",
        cone.scaling_check(1.7, &points).unwrap(),
        1e-4,
    );
    c.finish(Duration::from_secs(60));
}

// ---------------------------------------------------------------------------
// 7. Liouville solver

#[test]
fn criterion_7_liouville_solver() {
    let mut c = Criterion::new("criterion 7 (curvature-equation solver)");

    // d = 2: radial solve against the closed form, sup over the regular
    // part at seeded points.
    let beta = 0.7f64;
    let solved = SphericalMetric::solve(
        &two_point_config(Angle::exact(7, 10)),
        4.0,
        &SolverOptions::coarse(257),
    );
    match solved {
        Ok(solved) => {
            let reference = SphericalMetric::rugby(beta, 4.0).unwrap();
            let mut rng = sample::rng(sample::DEFAULT_SEED);
            let mut worst = 0.0f64;
            for _ in 0..40 {
                let p = sample::complex_in_annulus(&mut rng, 0.2, 1.5);
                worst = worst.max(
                    (solved.regular_part(Chart::Xi, p)
                        - reference.regular_part(Chart::Xi, p))
                    .abs(),
                );
            }
            c.check_le("d = 2 regular-part sup error", worst, 1e-6);
            c.check_le(
                "d = 2 Gauss-Bonnet defect",
                solved.gauss_bonnet_defect(384),
                1e-3,
            );
        }
        Err(err) => c.check(format!("d = 2 solve failed: {err}"), false),
    }

    // d = 3, 4, 5: every admissible configuration must solve, and every
    // solution must close the Gauss-Bonnet budget.
    c.check_le(
        "d = 3 Gauss-Bonnet defect",
        solved_three_point().gauss_bonnet_defect(384),
        1e-3,
    );
    let inf = MarkedPoint::Infinity;
    let fin = MarkedPoint::finite;
    let harder = [
        (
            "d = 4 (3/4 x 4)",
            uniform_config(vec![fin(0.0, 0.0), fin(1.0, 0.0), fin(-1.0, 0.0), inf], 3, 4),
        ),
        (
            "d = 5 (4/5 x 5)",
            uniform_config(
                vec![
                    fin(0.0, 0.0),
                    fin(1.0, 0.0),
                    fin(-1.0, 0.0),
                    fin(0.0, 1.0),
                    MarkedPoint::Infinity,
                ],
                4,
                5,
            ),
        ),
    ];
    for (label, config) in harder {
        match SphericalMetric::solve(&config, 4.0, &SolverOptions::coarse(257)) {
            Ok(metric) => c.check_le(
                &format!("{label} Gauss-Bonnet defect"),
                metric.gauss_bonnet_defect(384),
                1e-3,
            ),
            Err(err) => c.check(format!("{label} solve failed: {err}"), false),
        }
    }
    c.finish(Duration::from_secs(300));
}

// ---------------------------------------------------------------------------
// 8. Lift suite

#[test]
fn criterion_8_lift_suite() {
    let mut c = Criterion::new("criterion 8 (circle-bundle lift)");
    let cells = 384;

    let rugby = SphericalMetric::rugby(0.6, 4.0).unwrap();
    let conn = build_connection(&rugby).unwrap();
    c.check_le(
        "connection total curvature - 1",
        conn.total_curvature(cells) - 1.0,
        1e-3,
    );

    let table = conn.holonomy_table(
        Chart::Xi,
        Complex64::new(0.0, 0.0),
        &ConnectionForm::standard_radii(),
        512,
    );
    c.check(
        format!(
            "holonomy magnitudes decrease: {:?}",
            table.iter().map(|r| r.1).collect::<Vec<_>>()
        ),
        table.windows(2).all(|w| w[1].1 < w[0].1),
    );
    c.check_le("final holonomy", table[3].1, 1e-2);

    for (label, base) in [("two-point base", rugby), ("three-point base", SphericalMetric::g222())]
    {
        let link = hopf_lift(&build_connection(&base).unwrap());
        let expected = link.expected_volume();
        c.check_le(
            &format!("{label}: lifted volume defect"),
            link.volume(cells) / expected - 1.0,
            1e-3,
        );
    }
    c.finish(Duration::from_secs(120));
}

// ---------------------------------------------------------------------------
// 9. Energy bookkeeping

#[test]
fn criterion_9_energy_bookkeeping() {
    let mut c = Criterion::new("criterion 9 (energy bookkeeping)");

    // 50 rational angles: both degeneration splits balance exactly.
    for k in 1..=50i64 {
        let beta = rat(k, 51);
        let e = elliptic_energy_split(&beta);
        c.check(
            format!("elliptic split at {beta}"),
            e.residual.is_zero()
                && e.ambient == rat_int(3)
                && e.bubbles == rat_int(3) * (BigRational::one() - &beta * &beta),
        );
        let q = quartic_energy_split(&beta);
        c.check(
            format!("quartic split at {beta}"),
            q.residual.is_zero()
                && q.bubbles == rat_int(8) * (BigRational::one() - &beta),
        );
    }

    // The volume-ratio bound on the cuspidal-cubic degeneration passes
    // only at angle one; the deficit below is exactly −(1−β)².
    for k in 51..=60i64 {
        let beta = rat(k, 60);
        let bound = cuspidal_cubic_volume_bound(&beta);
        c.check(
            format!("volume bound verdict at {beta}"),
            bound.pass == (k == 60),
        );
        let gap = BigRational::one() - &beta;
        c.check(
            format!("volume bound slack at {beta}"),
            bound.slack == -(gap.clone() * gap),
        );
        c.check(
            format!("slack sign at {beta}"),
            (k == 60 && bound.slack.is_zero()) || (k < 60 && bound.slack.is_negative()),
        );
    }
    c.finish(Duration::from_secs(1));
}
