//! Cone configurations on the Riemann sphere and their admissibility checks.
//!
//! A [`ConeConfig`] is a list of pairwise distinct marked points on the
//! sphere together with one cone angle `2πβ_j` per point, stored as the
//! normalized angles `β_j`.  Angles may be exact rationals or floats; every
//! check in this module runs exactly whenever all inputs are exact, and
//! falls back to floats with an explicit boundary tolerance otherwise.
//!
//! The central existence condition for a spherical metric with prescribed
//! cone angles (all `β_j < 1`) is
//!
//! ```text
//! 0  <  2 − d + Σ β_j  <  2 min_i β_i        (d ≥ 3)
//! β₁ = β₂                                    (d = 2)
//! ```
//!
//! and the positive quantity `c = 1 − d/2 + Σ β_j / 2` (half the left slack)
//! is the *cone number* of the configuration: the lift of the spherical
//! metric to the unit circle bundle has fibers of length `2πc`, and the flat
//! cone built over it scales with exponent `2c`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational, rat, rat_int, to_f64};
use crate::{Error, Result};

/// Default tolerance used to decide boundary cases on float inputs.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-12;

/// A marked point on the Riemann sphere, in the standard affine chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkedPoint {
    Finite(Complex64),
    Infinity,
}

impl MarkedPoint {
    pub fn finite(re: f64, im: f64) -> Self {
        MarkedPoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, MarkedPoint::Infinity)
    }
}

impl std::fmt::Display for MarkedPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MarkedPoint::Finite(z) => write!(f, "{}+{}i", z.re, z.im),
            MarkedPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// A normalized cone angle `β` (cone angle divided by `2π`), exact or float.
#[derive(Debug, Clone, PartialEq)]
pub enum Angle {
    Exact(BigRational),
    Approx(f64),
}

impl Angle {
    pub fn exact(num: i64, den: i64) -> Self {
        Angle::Exact(rat(num, den))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Angle::Exact(r) => to_f64(r),
            Angle::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Angle::Exact(r) => Some(r),
            Angle::Approx(_) => None,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Angle::Exact(r) => r.is_one(),
            Angle::Approx(x) => *x == 1.0,
        }
    }
}

impl std::fmt::Display for Angle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Angle::Exact(r) => write!(f, "{}", format_rational(r)),
            Angle::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Which per-angle range rule a configuration must satisfy.
///
/// The strict rule (`β ∈ (0,1)` everywhere) is what the spherical existence
/// theory needs.  Branched-cover pullbacks produce configurations whose two
/// axis points may carry angle exactly `1` (a smooth axis); the relaxed rule
/// admits those.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationContext {
    Strict,
    AllowUnitAngles,
}

/// Marked points plus angles; the input object for every metric constructor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigRepr", into = "ConfigRepr")]
pub struct ConeConfig {
    pub points: Vec<MarkedPoint>,
    pub angles: Vec<Angle>,
}

impl ConeConfig {
    pub fn new(points: Vec<MarkedPoint>, angles: Vec<Angle>) -> Result<Self> {
        let cfg = ConeConfig { points, angles };
        cfg.validate_shape()?;
        Ok(cfg)
    }

    /// Structural validation: matching lengths, `d ≥ 2`, distinct points.
    pub fn validate_shape(&self) -> Result<()> {
        if self.points.len() != self.angles.len() {
            return Err(Error::InvalidConfig(format!(
                "{} points but {} angles",
                self.points.len(),
                self.angles.len()
            )));
        }
        if self.points.len() < 2 {
            return Err(Error::InvalidConfig(
                "need at least two marked points".into(),
            ));
        }
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                if self.points[i] == self.points[j] {
                    return Err(Error::InvalidConfig(format!(
                        "marked points {i} and {j} coincide ({})",
                        self.points[i]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Range-checks the angles and runs the existence test.
    pub fn validate(&self, ctx: ValidationContext, tol: f64) -> Result<AdmissibilityReport> {
        self.validate_shape()?;
        for (j, a) in self.angles.iter().enumerate() {
            let x = a.as_f64();
            let in_range = match ctx {
                ValidationContext::Strict => x > 0.0 && x < 1.0,
                ValidationContext::AllowUnitAngles => x > 0.0 && (x < 1.0 || a.is_one()),
            };
            if !in_range {
                return Err(Error::InvalidConfig(format!(
                    "angle {j} = {a} out of range for {ctx:?}"
                )));
            }
        }
        check_troyanov(&self.angles, tol)
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn has_infinity(&self) -> bool {
        self.points.iter().any(MarkedPoint::is_infinity)
    }

    /// Finite punctures with their angles, in declaration order.
    pub fn finite_punctures(&self) -> Vec<(Complex64, f64)> {
        self.points
            .iter()
            .zip(&self.angles)
            .filter_map(|(p, a)| match p {
                MarkedPoint::Finite(z) => Some((*z, a.as_f64())),
                MarkedPoint::Infinity => None,
            })
            .collect()
    }

    /// Angle at infinity, when infinity is marked.
    pub fn infinity_angle(&self) -> Option<f64> {
        self.points
            .iter()
            .zip(&self.angles)
            .find(|(p, _)| p.is_infinity())
            .map(|(_, a)| a.as_f64())
    }

    /// All angles as exact rationals, when every angle is exact.
    pub fn exact_angles(&self) -> Option<Vec<BigRational>> {
        self.angles.iter().map(|a| a.as_exact().cloned()).collect()
    }

    /// Angle of the marked point at the given position of this config.
    pub fn angle_of(&self, point: &MarkedPoint) -> Option<&Angle> {
        self.points
            .iter()
            .position(|p| p == point)
            .map(|i| &self.angles[i])
    }

    /// Cone number as a float.
    pub fn cone_number_f64(&self) -> f64 {
        cone_number_f64(&self.angle_f64s())
    }

    /// Cone number, exact when all angles are exact.
    pub fn cone_number(&self) -> Angle {
        cone_number(&self.angles)
    }

    pub fn angle_f64s(&self) -> Vec<f64> {
        self.angles.iter().map(Angle::as_f64).collect()
    }

    /// True when the marked set and angles are invariant under complex
    /// conjugation (used by symmetry tests on solved metrics).
    pub fn is_conjugation_symmetric(&self) -> bool {
        self.points.iter().zip(&self.angles).all(|(p, a)| {
            let conj = match p {
                MarkedPoint::Finite(z) => MarkedPoint::Finite(z.conj()),
                MarkedPoint::Infinity => MarkedPoint::Infinity,
            };
            match self.angle_of(&conj) {
                Some(b) => b.as_f64() == a.as_f64(),
                None => false,
            }
        })
    }
}

/// Outcome of the existence check, with the deciding slack quantities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub pass: bool,
    /// True when a deciding quantity fell within tolerance of zero
    /// (failures of this kind are borderline rather than structural).
    pub boundary_hit: bool,
    /// `2 − d + Σβ`; must be positive.
    pub positivity_slack: f64,
    /// `2·min β − (2 − d + Σβ)`; must be positive when `d ≥ 3`.
    pub min_angle_slack: f64,
    /// `|β₁ − β₂|` when `d = 2`; must vanish.
    pub pair_gap: Option<f64>,
    /// True when the verdict was reached in exact arithmetic.
    pub exact: bool,
}

/// Existence test for spherical cone metrics with the given angles.
///
/// For `d ≥ 3` the test is `0 < 2 − d + Σβ_j < 2 min_i β_i`; for `d = 2`
/// the two angles must be equal.  Exact inputs get an exact verdict;
/// float inputs use `tol` to detect boundary cases, and a boundary hit
/// counts as a failure.
pub fn check_troyanov(angles: &[Angle], tol: f64) -> Result<AdmissibilityReport> {
    let d = angles.len();
    if d < 2 {
        return Err(Error::InvalidConfig(
            "existence test needs at least two angles".into(),
        ));
    }
    for (j, a) in angles.iter().enumerate() {
        let x = a.as_f64();
        if !(x > 0.0 && x < 1.0) && !a.is_one() {
            return Err(Error::InvalidConfig(format!(
                "angle {j} = {a} outside (0,1]"
            )));
        }
    }

    let exact_angles: Option<Vec<&BigRational>> = angles.iter().map(Angle::as_exact).collect();
    let floats: Vec<f64> = angles.iter().map(Angle::as_f64).collect();
    let sum_f: f64 = floats.iter().sum();
    let min_f = floats.iter().cloned().fold(f64::INFINITY, f64::min);
    let pos_slack_f = 2.0 - d as f64 + sum_f;
    let min_slack_f = 2.0 * min_f - pos_slack_f;

    if d == 2 {
        let (pass, boundary, gap, exact) = match &exact_angles {
            Some(v) => (v[0] == v[1], false, (floats[0] - floats[1]).abs(), true),
            None => {
                let gap = (floats[0] - floats[1]).abs();
                (gap <= tol, false, gap, false)
            }
        };
        return Ok(AdmissibilityReport {
            pass,
            boundary_hit: boundary,
            positivity_slack: pos_slack_f,
            min_angle_slack: min_slack_f,
            pair_gap: Some(gap),
            exact,
        });
    }

    match &exact_angles {
        Some(v) => {
            let sum: BigRational = v.iter().fold(BigRational::zero(), |acc, b| acc + *b);
            let min = v.iter().min().unwrap();
            let pos_slack = sum + rat_int(2) - rat_int(d as i64);
            let min_slack = rat_int(2) * *min - pos_slack.clone();
            let boundary = pos_slack.is_zero() || min_slack.is_zero();
            Ok(AdmissibilityReport {
                pass: pos_slack > BigRational::zero() && min_slack > BigRational::zero(),
                boundary_hit: boundary,
                positivity_slack: pos_slack_f,
                min_angle_slack: min_slack_f,
                pair_gap: None,
                exact: true,
            })
        }
        None => {
            let boundary = pos_slack_f.abs() <= tol || min_slack_f.abs() <= tol;
            Ok(AdmissibilityReport {
                pass: !boundary && pos_slack_f > 0.0 && min_slack_f > 0.0,
                boundary_hit: boundary,
                positivity_slack: pos_slack_f,
                min_angle_slack: min_slack_f,
                pair_gap: None,
                exact: false,
            })
        }
    }
}

/// Cone number `c = 1 − d/2 + Σβ_j/2` as a float.
pub fn cone_number_f64(angles: &[f64]) -> f64 {
    let d = angles.len() as f64;
    let sum: f64 = angles.iter().sum();
    1.0 - d / 2.0 + sum / 2.0
}

/// Cone number `c = 1 − d/2 + Σβ_j/2`, exact when every angle is exact.
pub fn cone_number(angles: &[Angle]) -> Angle {
    match angles
        .iter()
        .map(Angle::as_exact)
        .collect::<Option<Vec<_>>>()
    {
        Some(v) => {
            let sum: BigRational = v.iter().fold(BigRational::zero(), |acc, b| acc + *b);
            let d = rat_int(angles.len() as i64);
            Angle::Exact(BigRational::one() - d / rat_int(2) + sum / rat_int(2))
        }
        None => Angle::Approx(cone_number_f64(
            &angles.iter().map(Angle::as_f64).collect::<Vec<_>>(),
        )),
    }
}

/// Outcome of the three-angle spherical test, with the deciding slacks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TriangleReport {
    pub pass: bool,
    /// `Σβ − 1`; must be positive.
    pub sum_slack: f64,
    /// `1 + β_i − β_j − β_k` for each `i`; all must be positive.
    pub side_slacks: [f64; 3],
    /// `Σβ − 1`, the metric area divided by `π` (meaningful on pass).
    pub area_over_pi: f64,
    pub exact: bool,
}

/// Existence test for a spherical metric with three cone points: requires
/// `Σβ_j > 1` and, for each `i`, `1 − β_i < Σ_{j≠i} (1 − β_j)`.
/// On pass, the metric area is `π (Σβ_j − 1)`.
pub fn check_spherical_triangle(angles: &[Angle; 3], tol: f64) -> Result<TriangleReport> {
    for (j, a) in angles.iter().enumerate() {
        let x = a.as_f64();
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "angle {j} = {a} outside (0,1)"
            )));
        }
    }
    let f: Vec<f64> = angles.iter().map(Angle::as_f64).collect();
    let sum = f[0] + f[1] + f[2];
    let sum_slack = sum - 1.0;
    // 1 − β_i < (1 − β_j) + (1 − β_k)  ⟺  1 + β_i − β_j − β_k > 0.
    let side = |i: usize, j: usize, k: usize| 1.0 + f[i] - f[j] - f[k];
    let side_slacks = [side(0, 1, 2), side(1, 0, 2), side(2, 0, 1)];

    match angles
        .iter()
        .map(Angle::as_exact)
        .collect::<Option<Vec<_>>>()
    {
        Some(v) => {
            let one = BigRational::one;
            let sum_e: BigRational = v.iter().fold(BigRational::zero(), |acc, b| acc + *b);
            let t1 = sum_e > one();
            let t2 = (0..3).all(|i| {
                let j = (i + 1) % 3;
                let k = (i + 2) % 3;
                one() + v[i] > v[j] + v[k]
            });
            Ok(TriangleReport {
                pass: t1 && t2,
                sum_slack,
                side_slacks,
                area_over_pi: sum_slack,
                exact: true,
            })
        }
        None => {
            let t1 = sum_slack > tol;
            let t2 = side_slacks.iter().all(|s| *s > tol);
            Ok(TriangleReport {
                pass: t1 && t2,
                sum_slack,
                side_slacks,
                area_over_pi: sum_slack,
                exact: false,
            })
        }
    }
}

/// Angle produced when `k` cone points of equal angle `2πβ` collide:
/// `γ = kβ + 1 − k`, equivalently `1 − γ = k (1 − β)`.
///
/// Errors when `β ≤ 1 − 1/k`, where the limit angle degenerates.
pub fn collision_angle(k: u32, beta: &Angle) -> Result<Angle> {
    if k == 0 {
        return Err(Error::InvalidConfig("collision of zero points".into()));
    }
    let b = beta.as_f64();
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::InvalidConfig(format!("angle {beta} outside (0,1]")));
    }
    match beta {
        Angle::Exact(r) => {
            let k_r = rat_int(k as i64);
            let gamma = k_r.clone() * r + BigRational::one() - k_r;
            if gamma <= BigRational::zero() {
                return Err(Error::Inadmissible(format!(
                    "collision angle of {k} points with β = {beta} degenerates (β ≤ 1 − 1/{k})"
                )));
            }
            Ok(Angle::Exact(gamma))
        }
        Angle::Approx(x) => {
            let gamma = k as f64 * x + 1.0 - k as f64;
            if gamma <= 0.0 {
                return Err(Error::Inadmissible(format!(
                    "collision angle of {k} points with β = {x} degenerates (β ≤ 1 − 1/{k})"
                )));
            }
            Ok(Angle::Approx(gamma))
        }
    }
}

// ---------------------------------------------------------------------------
// Serialization: points as "inf" | [re, im], angles as "p/q" | float.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    points: Vec<PointRepr>,
    angles: Vec<AngleRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Named(String),
    Finite([f64; 2]),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AngleRepr {
    Text(String),
    Number(f64),
}

impl TryFrom<ConfigRepr> for ConeConfig {
    type Error = Error;

    fn try_from(repr: ConfigRepr) -> Result<Self> {
        let points = repr
            .points
            .into_iter()
            .map(|p| match p {
                PointRepr::Named(s) if s == "inf" => Ok(MarkedPoint::Infinity),
                PointRepr::Named(s) => Err(Error::Parse(format!(
                    "unknown point name {s:?} (expected \"inf\" or [re, im])"
                ))),
                PointRepr::Finite([re, im]) => Ok(MarkedPoint::finite(re, im)),
            })
            .collect::<Result<Vec<_>>>()?;
        let angles = repr
            .angles
            .into_iter()
            .map(|a| match a {
                AngleRepr::Text(s) => Ok(Angle::Exact(parse_rational(&s)?)),
                AngleRepr::Number(x) => Ok(Angle::Approx(x)),
            })
            .collect::<Result<Vec<_>>>()?;
        ConeConfig::new(points, angles)
    }
}

impl From<ConeConfig> for ConfigRepr {
    fn from(cfg: ConeConfig) -> Self {
        ConfigRepr {
            points: cfg
                .points
                .into_iter()
                .map(|p| match p {
                    MarkedPoint::Infinity => PointRepr::Named("inf".into()),
                    MarkedPoint::Finite(z) => PointRepr::Finite([z.re, z.im]),
                })
                .collect(),
            angles: cfg
                .angles
                .into_iter()
                .map(|a| match a {
                    Angle::Exact(r) => AngleRepr::Text(format_rational(&r)),
                    Angle::Approx(x) => AngleRepr::Number(x),
                })
                .collect(),
        }
    }
}

/// Convenience constructor: points `{0, ∞}` with equal angles.
pub fn two_point_config(beta: Angle) -> ConeConfig {
    ConeConfig {
        points: vec![MarkedPoint::finite(0.0, 0.0), MarkedPoint::Infinity],
        angles: vec![beta.clone(), beta],
    }
}

/// Convenience constructor: points `{0, 1, ∞}` with the given angles.
pub fn three_point_config(a0: Angle, a1: Angle, a_inf: Angle) -> ConeConfig {
    ConeConfig {
        points: vec![
            MarkedPoint::finite(0.0, 0.0),
            MarkedPoint::finite(1.0, 0.0),
            MarkedPoint::Infinity,
        ],
        angles: vec![a0, a1, a_inf],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn exact(n: i64, d: i64) -> Angle {
        Angle::exact(n, d)
    }

    #[test]
    fn troyanov_passes_known_admissible_triples() {
        // Angles (1/2, 1/2, 1/2): slack 1/2 < 2·min = 1.
        let rep = check_troyanov(
            &[exact(1, 2), exact(1, 2), exact(1, 2)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(rep.pass && rep.exact && !rep.boundary_hit);

        // Angles (1/2, 2/3, 2/3): slack 5/6 < 1.
        let rep = check_troyanov(
            &[exact(1, 2), exact(2, 3), exact(2, 3)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn troyanov_rejects_unbalanced_triples() {
        // One small angle dominated by the others: 2c ≥ 2·min β.
        let rep = check_troyanov(
            &[exact(1, 10), exact(9, 10), exact(9, 10)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(!rep.pass);
        // Total too small: 2 − d + Σβ ≤ 0.
        let rep = check_troyanov(
            &[exact(1, 4), exact(1, 4), exact(1, 4)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn troyanov_boundary_is_failure() {
        // β = (1/2, 1/2, 1/2, 1/2): positivity slack 0 exactly.
        let a = vec![exact(1, 2); 4];
        let rep = check_troyanov(&a, DEFAULT_ANGLE_TOL).unwrap();
        assert!(!rep.pass && rep.boundary_hit);

        // Same data as floats.
        let a = vec![Angle::Approx(0.5); 4];
        let rep = check_troyanov(&a, DEFAULT_ANGLE_TOL).unwrap();
        assert!(!rep.pass && rep.boundary_hit && !rep.exact);
    }

    #[test]
    fn troyanov_two_points_requires_equal_angles() {
        let rep =
            check_troyanov(&[exact(3, 5), exact(3, 5)], DEFAULT_ANGLE_TOL).unwrap();
        assert!(rep.pass);
        let rep =
            check_troyanov(&[exact(3, 5), exact(2, 5)], DEFAULT_ANGLE_TOL).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn troyanov_is_permutation_invariant() {
        let base = [exact(1, 2), exact(2, 3), exact(3, 4), exact(4, 5)];
        let r0 = check_troyanov(&base, DEFAULT_ANGLE_TOL).unwrap();
        let mut perm = base.to_vec();
        perm.rotate_left(2);
        perm.swap(0, 1);
        let r1 = check_troyanov(&perm, DEFAULT_ANGLE_TOL).unwrap();
        assert_eq!(r0.pass, r1.pass);
        assert_eq!(r0.positivity_slack, r1.positivity_slack);
        assert_eq!(r0.min_angle_slack, r1.min_angle_slack);
    }

    #[test]
    fn troyanov_rejects_out_of_range() {
        assert!(check_troyanov(&[exact(0, 1), exact(1, 2)], 1e-12).is_err());
        assert!(check_troyanov(&[exact(3, 2), exact(1, 2)], 1e-12).is_err());
        assert!(check_troyanov(&[exact(1, 2)], 1e-12).is_err());
    }

    #[test]
    fn cone_number_values() {
        // Equal angles β on two points: c = β.
        let c = cone_number(&[exact(3, 10), exact(3, 10)]);
        assert_eq!(c.as_exact().unwrap(), &rat(3, 10));
        // (1/2, 2/3, 2/3): c = 5/12.
        let c = cone_number(&[exact(1, 2), exact(2, 3), exact(2, 3)]);
        assert_eq!(c.as_exact().unwrap(), &rat(5, 12));
        // (1/2, 1/2, 1/2): c = 1/4.
        let c = cone_number(&[exact(1, 2), exact(1, 2), exact(1, 2)]);
        assert_eq!(c.as_exact().unwrap(), &rat(1, 4));
        // (1/3, β, 1/2) with β = 1/2: c = 1/6 + β/2 − 1/4 → 5/12 − 1/4.
        let c = cone_number(&[exact(1, 3), exact(1, 2), exact(1, 2)]);
        assert_eq!(c.as_exact().unwrap(), &rat(1, 6));
    }

    #[test]
    fn cone_number_in_unit_interval_for_admissible() {
        let cases: Vec<Vec<Angle>> = vec![
            vec![exact(1, 2), exact(2, 3), exact(2, 3)],
            vec![exact(4, 5); 4],
            vec![exact(9, 10); 5],
            vec![exact(3, 5), exact(3, 5)],
        ];
        for angles in cases {
            let rep = check_troyanov(&angles, DEFAULT_ANGLE_TOL).unwrap();
            assert!(rep.pass);
            let c = cone_number(&angles).as_f64();
            assert!(c > 0.0 && c < 1.0, "cone number {c} outside (0,1)");
        }
    }

    #[test]
    fn triangle_checks() {
        let rep = check_spherical_triangle(
            &[exact(1, 2), exact(1, 3), exact(1, 3)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(rep.pass && rep.exact);
        assert!((rep.area_over_pi - (1.0 / 2.0 + 2.0 / 3.0 - 1.0)).abs() < 1e-15);

        // Σβ ≤ 1 fails the first condition.
        let rep = check_spherical_triangle(
            &[exact(1, 4), exact(1, 4), exact(1, 4)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(!rep.pass);

        // One dominant angle fails the side condition.
        let rep = check_spherical_triangle(
            &[exact(9, 10), exact(1, 20), exact(1, 10)],
            DEFAULT_ANGLE_TOL,
        )
        .unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn equal_angle_triangle_iff_beta_above_third() {
        for num in 1..30 {
            let beta = rat(num, 30);
            if beta >= rat(1, 1) {
                break;
            }
            let a = Angle::Exact(beta.clone());
            let rep = check_spherical_triangle(
                &[a.clone(), a.clone(), a.clone()],
                DEFAULT_ANGLE_TOL,
            )
            .unwrap();
            assert_eq!(rep.pass, beta > rat(1, 3), "β = {beta}");
        }
    }

    #[test]
    fn collision_angle_values() {
        // k = 3, β = 5/6: γ = 3·5/6 − 2 = 1/2.
        let g = collision_angle(3, &exact(5, 6)).unwrap();
        assert_eq!(g.as_exact().unwrap(), &rat(1, 2));
        // Degenerate: β = 2/3 with k = 3 gives γ = 0.
        assert!(collision_angle(3, &exact(2, 3)).is_err());
        assert!(collision_angle(3, &exact(1, 2)).is_err());
    }

    #[test]
    fn collision_angle_complement_identity() {
        // 1 − γ = k (1 − β), exactly.
        for k in 1..8u32 {
            for num in 1..30i64 {
                let beta = rat(30 - num, 30);
                let a = Angle::Exact(beta.clone());
                if let Ok(Angle::Exact(gamma)) = collision_angle(k, &a) {
                    let lhs = rat(1, 1) - gamma;
                    let rhs = rat(k as i64, 1) * (rat(1, 1) - beta);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = three_point_config(exact(1, 2), exact(2, 3), Angle::Approx(0.75));
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ConeConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);

        let parsed: ConeConfig = serde_json::from_str(
            r#"{"points": [[0.0, 0.0], "inf"], "angles": ["1/2", 0.5]}"#,
        )
        .unwrap();
        assert_eq!(parsed.degree(), 2);
        assert!(parsed.has_infinity());
        assert_eq!(parsed.angles[0], exact(1, 2));
        assert_eq!(parsed.angles[1], Angle::Approx(0.5));
    }

    #[test]
    fn config_rejects_duplicates_and_bad_points() {
        let dup = ConeConfig::new(
            vec![MarkedPoint::finite(0.0, 0.0), MarkedPoint::finite(0.0, 0.0)],
            vec![exact(1, 2), exact(1, 2)],
        );
        assert!(dup.is_err());
        let r: std::result::Result<ConeConfig, _> =
            serde_json::from_str(r#"{"points": ["oo"], "angles": ["1/2"]}"#);
        assert!(r.is_err());
    }

    #[test]
    fn conjugation_symmetry_detection() {
        let sym = ConeConfig::new(
            vec![
                MarkedPoint::finite(0.0, 0.0),
                MarkedPoint::finite(0.0, 1.0),
                MarkedPoint::finite(0.0, -1.0),
                MarkedPoint::Infinity,
            ],
            vec![exact(4, 5), exact(3, 4), exact(3, 4), exact(4, 5)],
        )
        .unwrap();
        assert!(sym.is_conjugation_symmetric());

        let asym = ConeConfig::new(
            vec![
                MarkedPoint::finite(0.0, 1.0),
                MarkedPoint::finite(2.0, 0.0),
            ],
            vec![exact(1, 2), exact(1, 2)],
        )
        .unwrap();
        assert!(!asym.is_conjugation_symmetric());
    }
}
