//! Rank-2 unitary reflection groups and the finite subgroups of `SU(2)`:
//! exact catalog data (orders, invariant degrees, singular loci, orbit-space
//! equations), the induced rational self-maps of the projective line with
//! exact coefficients, and the closed-form quotient potentials.
//!
//! The catalog covers two kinds of groups.
//!
//! * Subgroups of `SU(2)` (cyclic, binary dihedral, binary tetrahedral /
//!   octahedral / icosahedral).  These are not reflection groups; their orbit
//!   space is the ADE hypersurface in `ℂ³` recorded in [`GroupSpec::surface`].
//! * Reflection groups of `U(2)`: the imprimitive family `G(m, p, 2)`
//!   (`p | m`, order `2m²/p`) and the three primitive types whose projective
//!   image is the tetrahedral, octahedral, or icosahedral rotation group.
//!   Their orbit space is `ℂ²` and the quotient of the Euclidean metric is a
//!   flat Kähler cone with cone angles `2π/mᵢ` along the images of the
//!   reflection lines.
//!
//! For the families whose two fundamental invariants share a degree, the
//! invariant map induces a rational self-map of the projective line that
//! realizes the base spherical metric as a quotient of the round sphere.
//! Those maps are stored with exact coefficients in `ℚ(i√3)` — the smallest
//! field containing every coefficient that occurs — so degree counts,
//! critical-point multiplicities, and the fiber factorizations are proved by
//! exact polynomial arithmetic, then cross-checked with a certified numeric
//! root finder.

use num_complex::Complex64;
use num_rational::BigRational;

use crate::config::{three_point_config, Angle, ConeConfig};
use crate::poly::{durand_kerner, Coeff, NumericRoots, QuadExt, UniPoly};
use crate::rational::{format_rational, rat, rat_int};
use crate::sample;
use crate::spherical::{Chart, SphericalMetric};
use crate::{Error, Result};

/// Coefficient field for every catalog map: `ℚ(i√3)` (elements `a + b·i√3`).
///
/// Only the tetrahedral-type map actually needs the extension; the other
/// maps have integer coefficients, which embed in any field, so a single
/// coefficient type keeps [`RationalMap`] monomorphic.
pub type MapCoeff = QuadExt<-3>;

fn mc(n: i64) -> MapCoeff {
    MapCoeff::from_i64(n)
}

/// `n·i√3` as an element of [`MapCoeff`].
fn mc_i3(n: i64) -> MapCoeff {
    MapCoeff::new(rat_int(0), rat_int(n))
}

fn poly_i64(coeffs: &[i64]) -> UniPoly<MapCoeff> {
    UniPoly::from_i64_coeffs(coeffs)
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// Identifies a group in the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Imprimitive reflection group `G(m, p, 2)` with `p | m`, `m ≥ 2`,
    /// `(m, p) ≠ (2, 2)`.
    Imprimitive { m: u32, p: u32 },
    /// Largest primitive group of tetrahedral type (order 144).
    Tetrahedral,
    /// Largest primitive group of octahedral type (order 576).
    Octahedral,
    /// Largest primitive group of icosahedral type (order 3600).
    Icosahedral,
    /// Cyclic subgroup of `SU(2)` of order `m ≥ 2`.
    Cyclic { m: u32 },
    /// Binary dihedral subgroup of `SU(2)` of order `4m`, `m ≥ 2`.
    BinaryDihedral { m: u32 },
    /// Binary tetrahedral subgroup of `SU(2)` (order 24).
    BinaryTetrahedral,
    /// Binary octahedral subgroup of `SU(2)` (order 48).
    BinaryOctahedral,
    /// Binary icosahedral subgroup of `SU(2)` (order 120).
    BinaryIcosahedral,
}

impl Family {
    /// Parses a CLI-style family name: `tetrahedral`, `octahedral`,
    /// `icosahedral`, `G(m,p,2)` (or `g(m,p)`), `cyclic(m)`,
    /// `binary-dihedral(m)`, `binary-tetrahedral`, `binary-octahedral`,
    /// `binary-icosahedral`.
    pub fn parse(name: &str) -> Result<Family> {
        let s = name.trim().to_ascii_lowercase();
        match s.as_str() {
            "tetrahedral" => return Ok(Family::Tetrahedral),
            "octahedral" => return Ok(Family::Octahedral),
            "icosahedral" => return Ok(Family::Icosahedral),
            "binary-tetrahedral" => return Ok(Family::BinaryTetrahedral),
            "binary-octahedral" => return Ok(Family::BinaryOctahedral),
            "binary-icosahedral" => return Ok(Family::BinaryIcosahedral),
            _ => {}
        }
        let args = |prefix: &str| -> Option<Vec<u32>> {
            let rest = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            rest.split(',')
                .map(|part| part.trim().parse::<u32>().ok())
                .collect()
        };
        if let Some(nums) = args("g") {
            if nums.len() == 2 || (nums.len() == 3 && nums[2] == 2) {
                return Ok(Family::Imprimitive {
                    m: nums[0],
                    p: nums[1],
                });
            }
        }
        if let Some(nums) = args("cyclic") {
            if nums.len() == 1 {
                return Ok(Family::Cyclic { m: nums[0] });
            }
        }
        if let Some(nums) = args("binary-dihedral") {
            if nums.len() == 1 {
                return Ok(Family::BinaryDihedral { m: nums[0] });
            }
        }
        Err(Error::Parse(format!("unknown group family `{name}`")))
    }

    /// Human-readable label, also accepted by [`Family::parse`].
    pub fn label(&self) -> String {
        match self {
            Family::Imprimitive { m, p } => format!("G({m},{p},2)"),
            Family::Tetrahedral => "tetrahedral".into(),
            Family::Octahedral => "octahedral".into(),
            Family::Icosahedral => "icosahedral".into(),
            Family::Cyclic { m } => format!("cyclic({m})"),
            Family::BinaryDihedral { m } => format!("binary-dihedral({m})"),
            Family::BinaryTetrahedral => "binary-tetrahedral".into(),
            Family::BinaryOctahedral => "binary-octahedral".into(),
            Family::BinaryIcosahedral => "binary-icosahedral".into(),
        }
    }
}

/// An irreducible curve in the orbit space along which the quotient metric
/// has a cone singularity.
#[derive(Debug, Clone)]
pub struct SingularCurve {
    /// Defining equation, written in the invariant coordinates named in the
    /// catalog entry.
    pub equation: String,
    /// Cone angle along the curve as a fraction of `2π`.
    pub angle: BigRational,
}

/// Catalog record for one group.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub family: Family,
    pub label: String,
    /// Group order.
    pub order: u64,
    /// Degrees of the fundamental invariant polynomials (two for reflection
    /// groups, three for the `SU(2)` subgroups where the catalog records
    /// them).  For reflection groups the product of the degrees equals the
    /// order.
    pub invariant_degrees: Vec<u32>,
    /// Order of the subgroup of scalar matrices, when recorded.  For the
    /// families with a projective map, `order / center_order` equals the map
    /// degree.
    pub center_order: Option<u64>,
    /// Degree of the induced rational self-map of the projective line, for
    /// the families whose invariants share a degree.
    pub map_degree: Option<u32>,
    /// Angles of the quotient spherical triangle as fractions of `π`
    /// (the map is a Riemann mapping for this triangle).
    pub triangle: Option<[BigRational; 3]>,
    /// Cone angles (fractions of `2π`) of the base spherical metric at its
    /// three marked points, listed in the order `(0, 1, ∞)` after the
    /// normalization that puts the three critical values there.
    pub base_angles: Option<[BigRational; 3]>,
    /// Cone-angle data along the singular curves of the quotient metric.
    pub singular_curves: Vec<SingularCurve>,
    /// Hypersurface model of the orbit space in `ℂ³` (`SU(2)` subgroups).
    pub surface: Option<String>,
    /// ADE label of the orbit-space singularity (`SU(2)` subgroups).
    pub ade: Option<String>,
}

impl GroupSpec {
    /// JSON rendering used by the CLI.
    pub fn to_json(&self) -> serde_json::Value {
        let frac_list = |triple: &Option<[BigRational; 3]>| {
            triple.as_ref().map(|t| {
                t.iter()
                    .map(|r| serde_json::Value::String(format_rational(r)))
                    .collect::<Vec<_>>()
            })
        };
        serde_json::json!({
            "family": self.label,
            "order": self.order,
            "invariant_degrees": self.invariant_degrees,
            "center_order": self.center_order,
            "map_degree": self.map_degree,
            "triangle_angles_over_pi": frac_list(&self.triangle),
            "base_angles": frac_list(&self.base_angles),
            "singular_curves": self.singular_curves.iter().map(|c| {
                serde_json::json!({
                    "equation": c.equation,
                    "angle": format_rational(&c.angle),
                })
            }).collect::<Vec<_>>(),
            "surface": self.surface,
            "ade": self.ade,
        })
    }
}

/// Builds the catalog record for a family.
///
/// Errors on parameters outside the classification: `G(m, p, 2)` requires
/// `m ≥ 2`, `p | m`, and `(m, p) ≠ (2, 2)` (that parameter pair does not act
/// irreducibly); cyclic and binary dihedral groups require `m ≥ 2`.
pub fn catalog(family: Family) -> Result<GroupSpec> {
    let half = || rat(1, 2);
    match family {
        Family::Imprimitive { m, p } => {
            if m < 2 || p == 0 || m % p != 0 || (m, p) == (2, 2) {
                return Err(Error::InvalidConfig(format!(
                    "G({m},{p},2) is not in the catalog: need m ≥ 2, p | m, (m,p) ≠ (2,2)"
                )));
            }
            let order = 2 * (m as u64) * (m as u64) / p as u64;
            // Fundamental invariant degrees m and 2m/p; scalar subgroup
            // order 2m/p for even p, m/p for odd p.
            let degrees = {
                let mut d = vec![m, 2 * m / p];
                d.sort_unstable();
                d
            };
            let center = if p % 2 == 0 {
                (2 * m / p) as u64
            } else {
                (m / p) as u64
            };
            let mut spec = GroupSpec {
                family,
                label: family.label(),
                order,
                invariant_degrees: degrees,
                center_order: Some(center),
                map_degree: None,
                triangle: None,
                base_angles: None,
                singular_curves: Vec::new(),
                surface: None,
                ade: None,
            };
            if p == m {
                // Invariants z = x₁x₂, w = (x₁^m + x₂^m)/2; angle π along
                // the image of the reflection lines.
                spec.singular_curves.push(SingularCurve {
                    equation: format!("w^2 = z^{m}"),
                    angle: half(),
                });
            }
            if p == 2 {
                // Equal-degree invariants u = (x₁x₂)^m ... with k = m/2 the
                // map is η ↦ 4η^k/(1+η^k)² of degree m.
                let k = (m / 2) as i64;
                spec.map_degree = Some(m);
                spec.triangle = Some([half(), half(), rat(1, k)]);
                spec.base_angles = Some([rat(1, k), half(), half()]);
                spec.singular_curves = vec![
                    SingularCurve {
                        equation: "u = 0".into(),
                        angle: rat(1, k),
                    },
                    SingularCurve {
                        equation: "v = 0".into(),
                        angle: half(),
                    },
                    SingularCurve {
                        equation: "u = v".into(),
                        angle: half(),
                    },
                ];
            }
            Ok(spec)
        }
        Family::Tetrahedral => Ok(GroupSpec {
            family,
            label: family.label(),
            order: 144,
            invariant_degrees: vec![12, 12],
            center_order: Some(12),
            map_degree: Some(12),
            triangle: Some([rat(1, 2), rat(1, 3), rat(1, 3)]),
            base_angles: Some([rat(1, 3), rat(1, 3), rat(1, 2)]),
            singular_curves: vec![
                SingularCurve {
                    equation: "X_1 = 0".into(),
                    angle: rat(1, 3),
                },
                SingularCurve {
                    equation: "X_1 = 12i*sqrt(3)*X_2".into(),
                    angle: rat(1, 3),
                },
                SingularCurve {
                    equation: "X_2 = 0".into(),
                    angle: rat(1, 2),
                },
            ],
            surface: None,
            ade: None,
        }),
        Family::Octahedral => Ok(GroupSpec {
            family,
            label: family.label(),
            order: 576,
            invariant_degrees: vec![24, 24],
            center_order: Some(24),
            map_degree: Some(24),
            triangle: Some([rat(1, 2), rat(1, 3), rat(1, 4)]),
            base_angles: Some([rat(1, 3), rat(1, 4), rat(1, 2)]),
            singular_curves: vec![
                SingularCurve {
                    equation: "X_1 = 0".into(),
                    angle: rat(1, 3),
                },
                SingularCurve {
                    equation: "X_1 = X_2".into(),
                    angle: rat(1, 4),
                },
                SingularCurve {
                    equation: "X_2 = 0".into(),
                    angle: rat(1, 2),
                },
            ],
            surface: None,
            ade: None,
        }),
        Family::Icosahedral => Ok(GroupSpec {
            family,
            label: family.label(),
            order: 3600,
            invariant_degrees: vec![60, 60],
            center_order: Some(60),
            map_degree: Some(60),
            triangle: Some([rat(1, 2), rat(1, 3), rat(1, 5)]),
            base_angles: Some([rat(1, 3), rat(1, 5), rat(1, 2)]),
            singular_curves: vec![
                SingularCurve {
                    equation: "X_1 = 0".into(),
                    angle: rat(1, 3),
                },
                SingularCurve {
                    equation: "X_1 = X_2".into(),
                    angle: rat(1, 5),
                },
                SingularCurve {
                    equation: "X_2 = 0".into(),
                    angle: rat(1, 2),
                },
            ],
            surface: None,
            ade: None,
        }),
        Family::Cyclic { m } => {
            if m < 2 {
                return Err(Error::InvalidConfig(
                    "cyclic subgroup catalog needs order ≥ 2".into(),
                ));
            }
            Ok(GroupSpec {
                family,
                label: family.label(),
                order: m as u64,
                invariant_degrees: vec![2, m, m],
                center_order: None,
                map_degree: None,
                triangle: None,
                base_angles: None,
                singular_curves: vec![SingularCurve {
                    // Branch curve of the double cover (z, w, t) ↦ (z, w);
                    // the order-two extension of the group gives angle π
                    // along it.
                    equation: format!("w^2 = z^{m}"),
                    angle: rat(1, 2),
                }],
                surface: Some(format!("w^2 + t^2 = z^{m}")),
                ade: Some(format!("A_{}", m - 1)),
            })
        }
        Family::BinaryDihedral { m } => {
            if m < 2 {
                return Err(Error::InvalidConfig(
                    "binary dihedral catalog needs parameter m ≥ 2".into(),
                ));
            }
            Ok(GroupSpec {
                family,
                label: family.label(),
                order: 4 * m as u64,
                invariant_degrees: Vec::new(),
                center_order: None,
                map_degree: None,
                triangle: None,
                base_angles: None,
                singular_curves: vec![SingularCurve {
                    equation: format!("z*w^2 = z^{}", m + 1),
                    angle: rat(1, 2),
                }],
                surface: Some(format!("t^2 + z*w^2 = z^{}", m + 1)),
                ade: Some(format!("D_{}", m + 2)),
            })
        }
        Family::BinaryTetrahedral => Ok(du_val(family, 24, "t^2 + w^3 = z^4", "w^3 = z^4", "E_6")),
        Family::BinaryOctahedral => {
            Ok(du_val(family, 48, "t^2 + w^3 = w*z^3", "w^3 = w*z^3", "E_7"))
        }
        Family::BinaryIcosahedral => {
            Ok(du_val(family, 120, "t^2 + w^3 = z^5", "w^3 = z^5", "E_8"))
        }
    }
}

fn du_val(family: Family, order: u64, surface: &str, curve: &str, ade: &str) -> GroupSpec {
    GroupSpec {
        family,
        label: family.label(),
        order,
        invariant_degrees: Vec::new(),
        center_order: None,
        map_degree: None,
        triangle: None,
        base_angles: None,
        singular_curves: vec![SingularCurve {
            equation: curve.into(),
            angle: rat(1, 2),
        }],
        surface: Some(surface.into()),
        ade: Some(ade.into()),
    }
}

/// A representative slice of the catalog, used by the CLI listing.
pub fn default_catalog() -> Vec<GroupSpec> {
    let mut families = vec![
        Family::Imprimitive { m: 2, p: 1 },
        Family::Imprimitive { m: 3, p: 3 },
        Family::Imprimitive { m: 4, p: 2 },
        Family::Imprimitive { m: 4, p: 4 },
        Family::Imprimitive { m: 6, p: 2 },
        Family::Tetrahedral,
        Family::Octahedral,
        Family::Icosahedral,
        Family::Cyclic { m: 5 },
        Family::BinaryDihedral { m: 3 },
        Family::BinaryTetrahedral,
        Family::BinaryOctahedral,
        Family::BinaryIcosahedral,
    ];
    families
        .drain(..)
        .map(|f| catalog(f).expect("default catalog entries are valid"))
        .collect()
}

// ---------------------------------------------------------------------------
// Rational maps
// ---------------------------------------------------------------------------

/// A rational self-map of the projective line with exact coefficients,
/// written as `η ↦ num(t)/den(t)` with the inner substitution `t = η^s`.
#[derive(Debug, Clone)]
pub struct RationalMap {
    num: UniPoly<MapCoeff>,
    den: UniPoly<MapCoeff>,
    power: usize,
    declared_degree: usize,
}

impl RationalMap {
    /// Validates and builds a map.  The numerator and denominator must be
    /// coprime, and the declared degree must equal
    /// `max(deg num, deg den) · s`.
    pub fn new(
        num: UniPoly<MapCoeff>,
        den: UniPoly<MapCoeff>,
        power: usize,
        declared_degree: usize,
    ) -> Result<Self> {
        let (dn, dd) = match (num.degree(), den.degree()) {
            (Some(dn), Some(dd)) => (dn, dd),
            _ => {
                return Err(Error::InvalidConfig(
                    "rational map needs nonzero numerator and denominator".into(),
                ))
            }
        };
        if power == 0 {
            return Err(Error::InvalidConfig(
                "inner substitution exponent must be at least 1".into(),
            ));
        }
        let gcd = num.gcd(&den);
        if gcd.degree() != Some(0) {
            return Err(Error::InvalidConfig(
                "rational map numerator and denominator share a root".into(),
            ));
        }
        if dn.max(dd) * power != declared_degree {
            return Err(Error::InvalidConfig(format!(
                "declared degree {declared_degree} does not match max({dn},{dd})·{power}"
            )));
        }
        Ok(RationalMap {
            num,
            den,
            power,
            declared_degree,
        })
    }

    /// `η ↦ 4η^m/(1+η^m)²`, degree `2m`; the map of the imprimitive family
    /// with equal-degree invariants (first parameter `2m`, second `2`).
    /// Stored directly in `η` (identity inner substitution).
    pub fn rugby(m: u32) -> Result<RationalMap> {
        if m < 2 {
            return Err(Error::InvalidConfig(
                "the equal-degree imprimitive map needs m ≥ 2".into(),
            ));
        }
        let m = m as usize;
        let num = UniPoly::monomial(mc(4), m);
        let one_plus = UniPoly::from_coeffs({
            let mut c = vec![MapCoeff::zero(); m + 1];
            c[0] = mc(1);
            c[m] = mc(1);
            c
        });
        RationalMap::new(num, one_plus.pow(2), 1, 2 * m)
    }

    /// Degree-12 map of the largest tetrahedral-type group:
    /// `(t² + 2i√3·t + 1)³ / (t(t² − 1)²)` with `t = η²`.
    pub fn tetrahedral() -> RationalMap {
        let quad = UniPoly::from_coeffs(vec![mc(1), mc_i3(2), mc(1)]);
        let den = UniPoly::monomial(mc(1), 1).mul(&poly_i64(&[-1, 0, 1]).pow(2));
        RationalMap::new(quad.pow(3), den, 2, 12).expect("fixed catalog map is valid")
    }

    /// Degree-24 map of the largest octahedral-type group:
    /// `(t² + 14t + 1)³ / (t³ − 33t² − 33t + 1)²` with `t = η⁴`.
    pub fn octahedral() -> RationalMap {
        let num = poly_i64(&[1, 14, 1]).pow(3);
        let den = poly_i64(&[1, -33, -33, 1]).pow(2);
        RationalMap::new(num, den, 4, 24).expect("fixed catalog map is valid")
    }

    /// Degree-60 map of the largest icosahedral-type group:
    /// `(t⁴ − 228t³ + 494t² + 228t + 1)³ /
    ///  (t⁶ + 522t⁵ − 10005t⁴ − 10005t² − 522t + 1)²` with `t = η⁵`.
    pub fn icosahedral() -> RationalMap {
        let num = poly_i64(&[1, 228, 494, -228, 1]).pow(3);
        let den = poly_i64(&[1, -522, 0, -10005, 0, 522, 1]).pow(2);
        RationalMap::new(num, den, 5, 60).expect("fixed catalog map is valid")
    }

    /// The projective-line map of a catalog family, for the families whose
    /// fundamental invariants share a degree.
    pub fn for_family(family: Family) -> Result<RationalMap> {
        match family {
            Family::Imprimitive { m, p } if p == 2 && m % 2 == 0 && m >= 4 => {
                RationalMap::rugby(m / 2)
            }
            Family::Tetrahedral => Ok(RationalMap::tetrahedral()),
            Family::Octahedral => Ok(RationalMap::octahedral()),
            Family::Icosahedral => Ok(RationalMap::icosahedral()),
            _ => Err(Error::Unsupported(format!(
                "{} does not induce a projective-line map with equal-degree invariants",
                family.label()
            ))),
        }
    }

    /// Declared degree of the map.
    pub fn degree(&self) -> usize {
        self.declared_degree
    }

    /// Inner substitution exponent `s` in `t = η^s`.
    pub fn power(&self) -> usize {
        self.power
    }

    /// Numerator in the inner variable `t`.
    pub fn num(&self) -> &UniPoly<MapCoeff> {
        &self.num
    }

    /// Denominator in the inner variable `t`.
    pub fn den(&self) -> &UniPoly<MapCoeff> {
        &self.den
    }

    /// Numerator as a polynomial in `η`.
    pub fn expanded_num(&self) -> UniPoly<MapCoeff> {
        self.num.compose_power(self.power)
    }

    /// Denominator as a polynomial in `η`.
    pub fn expanded_den(&self) -> UniPoly<MapCoeff> {
        self.den.compose_power(self.power)
    }

    /// Numerator of the derivative in `η`: `num′·den − num·den′` for the
    /// expanded polynomials.  Its roots (with multiplicity) are the finite
    /// critical points of the map away from poles.
    pub fn wronskian(&self) -> UniPoly<MapCoeff> {
        let n = self.expanded_num();
        let d = self.expanded_den();
        n.derivative().mul(&d).sub(&n.mul(&d.derivative()))
    }

    /// Numeric evaluation; returns `∞` (as an `f64` infinity pair) at poles.
    pub fn eval(&self, eta: Complex64) -> Complex64 {
        let t = eta.powu(self.power as u32);
        let n = horner(&self.num.to_complex_coeffs(), t);
        let d = horner(&self.den.to_complex_coeffs(), t);
        if d.norm() == 0.0 {
            Complex64::new(f64::INFINITY, f64::INFINITY)
        } else {
            n / d
        }
    }

    /// Numeric derivative dΦ/dη via the exact quotient rule polynomials.
    pub fn eval_derivative(&self, eta: Complex64) -> Complex64 {
        let w = horner(&self.wronskian().to_complex_coeffs(), eta);
        let d = horner(&self.expanded_den().to_complex_coeffs(), eta);
        w / (d * d)
    }

    /// Exact fiber polynomial `num(η) − v·den(η)` over a field value.
    pub fn fiber_polynomial(&self, value: &MapCoeff) -> UniPoly<MapCoeff> {
        self.expanded_num().sub(&self.expanded_den().scale(value))
    }

    /// Numeric preimages of an arbitrary complex value, via the certified
    /// root finder on the fiber polynomial.
    pub fn preimages(&self, value: Complex64) -> Result<Vec<Complex64>> {
        let num = self.expanded_num().to_complex_coeffs();
        let den = self.expanded_den().to_complex_coeffs();
        let len = num.len().max(den.len());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (k, c) in num.iter().enumerate() {
            coeffs[k] += c;
        }
        for (k, c) in den.iter().enumerate() {
            coeffs[k] -= value * c;
        }
        while coeffs.len() > 1 && coeffs.last().map(|c| c.norm() < 1e-12).unwrap_or(false) {
            coeffs.pop();
        }
        Ok(balanced_roots(&coeffs)?.roots)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Durand–Kerner with a root-magnitude rescale: the variable is scaled by
/// the Fujiwara bound `R = 2·max_k (|a_{n−k}|/|a_n|)^{1/k}` so the iteration
/// starts near the unit circle regardless of coefficient size.
fn balanced_roots(coeffs: &[Complex64]) -> Result<NumericRoots> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::Numeric(
            "cannot extract roots of a constant polynomial".into(),
        ));
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::Numeric("zero leading coefficient".into()));
    }
    let mut scale = 0.0f64;
    for k in 1..=n {
        let a = coeffs[n - k].norm();
        if a > 0.0 {
            scale = scale.max((a / lead.norm()).powf(1.0 / k as f64));
        }
    }
    let r = (2.0 * scale).max(1e-6);
    let scaled: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * r.powi(k as i32) / lead / r.powi(n as i32))
        .collect();
    let mut found = durand_kerner(&scaled)?;
    for root in &mut found.roots {
        *root *= r;
    }
    Ok(found)
}

/// Counts the preimages of one rational value exactly.
///
/// Returns `Ok(None)` when the value is unusable as a generic probe: the
/// fiber polynomial drops degree (the value is attained at `η = ∞`), has a
/// multiple root (the value is critical), or the numeric certification of
/// the root count fails.  Otherwise the count equals the degree of the
/// square-free fiber polynomial.
pub fn preimage_count_at(map: &RationalMap, value: &BigRational) -> Result<Option<usize>> {
    let v = MapCoeff::rational(value.clone());
    let q = map.fiber_polynomial(&v);
    let expected = map
        .expanded_num()
        .degree()
        .unwrap_or(0)
        .max(map.expanded_den().degree().unwrap_or(0));
    let deg = match q.degree() {
        Some(d) if d == expected => d,
        _ => return Ok(None),
    };
    if !q.is_squarefree() {
        return Ok(None);
    }
    // Independent numeric certification: all roots located in pairwise
    // disjoint inclusion disks.
    let numeric = balanced_roots(&q.to_complex_coeffs())?;
    if !numeric.certified {
        return Ok(None);
    }
    Ok(Some(deg))
}

/// Degree of a rational map by preimage counting: the number of simple
/// roots of `num − v·den` for `trials` generic rational values `v`, which
/// must all agree.  Critical or degenerate probe values are skipped.
pub fn degree_by_preimages(map: &RationalMap, trials: usize) -> Result<usize> {
    const PROBES: [(i64, i64); 10] = [
        (7, 3),
        (-5, 2),
        (13, 6),
        (22, 7),
        (-9, 4),
        (17, 11),
        (31, 9),
        (-3, 8),
        (23, 5),
        (11, 13),
    ];
    let mut counts = Vec::new();
    for (p, q) in PROBES {
        if counts.len() >= trials {
            break;
        }
        if let Some(count) = preimage_count_at(map, &rat(p, q))? {
            counts.push(count);
        }
    }
    if counts.len() < trials {
        return Err(Error::NonConvergence(
            "ran out of generic probe values for preimage counting".into(),
        ));
    }
    if counts.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Numeric(format!(
            "preimage counts disagree across probe values: {counts:?}"
        )));
    }
    Ok(counts[0])
}

// ---------------------------------------------------------------------------
// Quotient potentials and base metrics
// ---------------------------------------------------------------------------

/// Quotient potential of the flat cone for the family with base angles
/// `(1/m, 1/2, 1/2)`, up to overall normalization:
/// `(h + √(h² − |u|²))^{1/m} + (h − √(h² − |u|²))^{1/m}` with
/// `h = |v| + |u − v|`.
///
/// Its pullback under `(u, v) = (x₁^m x₂^m, (x₁^m + x₂^m)²/4)` is exactly
/// `|x₁|² + |x₂|²`, and it is homogeneous of degree `1/m = 2c` under
/// `(u, v) ↦ (λu, λv)`.
pub fn quotient_potential(m: u32, u: Complex64, v: Complex64) -> f64 {
    let h = v.norm() + (u - v).norm();
    let s = (h * h - u.norm_sqr()).max(0.0).sqrt();
    let e = 1.0 / m as f64;
    (h + s).powf(e) + (h - s).powf(e)
}

/// Normalization constant `8√2` of the `m = 2` potential.
pub fn g222_potential_constant() -> f64 {
    128f64.sqrt()
}

/// Volume-normalized `m = 2` quotient potential `8√2·√(|u| + |v| + |u−v|)`.
///
/// The constant is pinned by the flat-cone volume normalization
/// `det Hess_ℂ(r²) = (|u|·|v|·|u−v|)^{−1}`; it equals `8` times the
/// unnormalized [`quotient_potential`] (which for `m = 2` collapses to
/// `√2·√(|u| + |v| + |u−v|)`).
pub fn g222_potential(u: Complex64, v: Complex64) -> f64 {
    g222_potential_constant() * (u.norm() + v.norm() + (u - v).norm()).sqrt()
}

/// Maximum deviation, over seeded sample points, of the pullback of the
/// three-right-angle closed-form base metric under the degree-4 map
/// `ξ = (1 + η²)²/(4η²)` from the round metric `(1 + |η|²)^{−2}` of
/// curvature 4.
pub fn pullback_round_defect(samples: usize) -> f64 {
    let base = SphericalMetric::g222();
    let map = RationalMap::rugby(2).expect("m = 2 is valid");
    let mut rng = sample::rng(sample::DEFAULT_SEED);
    // Critical points of the map (0, ±1, ±i) are the preimages of the cone
    // points; the identity holds across them but loses floating-point
    // accuracy, so the samples keep a small clearance.
    let avoid = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    let points = sample::points_avoiding(&mut rng, samples, 2.2, &avoid, 0.15);
    let mut worst = 0.0f64;
    for eta in points {
        let xi = map.eval(eta);
        let phi = base.log_conformal(Chart::Xi, xi);
        let jac = map.eval_derivative(eta).norm_sqr();
        let round = (1.0 + eta.norm_sqr()).powi(-2);
        worst = worst.max(((2.0 * phi).exp() * jac / round - 1.0).abs());
    }
    worst
}

/// Base spherical metric of a projective-line quotient map, evaluated by
/// inverting the map numerically: at a point `ζ` of the normalized base
/// (marked points at `0, 1, ∞`), the conformal factor is
/// `|λ|²·(1 + |η|²)^{−2}/|Φ′(η)|²` for any preimage `η` of `λζ`, where `λ`
/// is the critical value that the normalization sends to `1`.
///
/// The factor is the same for every preimage (the deck group acts by round
/// isometries), which [`QuotientBase::fiber_spread`] checks.
pub struct QuotientBase {
    map: RationalMap,
    value_scale: Complex64,
    angles: [Angle; 3],
    wronskian: Vec<Complex64>,
    den: Vec<Complex64>,
}

impl QuotientBase {
    fn build(map: RationalMap, value_scale: Complex64, angles: [Angle; 3]) -> Self {
        let wronskian = map.wronskian().to_complex_coeffs();
        let den = map.expanded_den().to_complex_coeffs();
        QuotientBase {
            map,
            value_scale,
            angles,
            wronskian,
            den,
        }
    }

    /// Base of the equal-degree imprimitive family: angles `(1/m, 1/2, 1/2)`.
    pub fn rugby(m: u32) -> Result<Self> {
        let map = RationalMap::rugby(m)?;
        Ok(Self::build(
            map,
            Complex64::new(1.0, 0.0),
            [
                Angle::exact(1, m as i64),
                Angle::exact(1, 2),
                Angle::exact(1, 2),
            ],
        ))
    }

    /// Tetrahedral-type base: angles `(1/3, 1/3, 1/2)`.  The third critical
    /// value of the degree-12 map is `12i√3`; the normalization divides it
    /// out so the marked points sit at `0, 1, ∞`.
    pub fn tetrahedral() -> Self {
        Self::build(
            RationalMap::tetrahedral(),
            Complex64::new(0.0, 12.0 * 3f64.sqrt()),
            [Angle::exact(1, 3), Angle::exact(1, 3), Angle::exact(1, 2)],
        )
    }

    /// Octahedral-type base: angles `(1/3, 1/4, 1/2)`.
    pub fn octahedral() -> Self {
        Self::build(
            RationalMap::octahedral(),
            Complex64::new(1.0, 0.0),
            [Angle::exact(1, 3), Angle::exact(1, 4), Angle::exact(1, 2)],
        )
    }

    /// Icosahedral-type base: angles `(1/3, 1/5, 1/2)`.
    pub fn icosahedral() -> Self {
        Self::build(
            RationalMap::icosahedral(),
            Complex64::new(1.0, 0.0),
            [Angle::exact(1, 3), Angle::exact(1, 5), Angle::exact(1, 2)],
        )
    }

    /// Marked-point configuration of the normalized base.
    pub fn config(&self) -> ConeConfig {
        three_point_config(
            self.angles[0].clone(),
            self.angles[1].clone(),
            self.angles[2].clone(),
        )
    }

    pub fn map(&self) -> &RationalMap {
        &self.map
    }

    fn factors_at(&self, zeta: Complex64) -> Result<Vec<f64>> {
        let target = self.value_scale * zeta;
        let roots = self.map.preimages(target)?;
        let mut factors = Vec::with_capacity(roots.len());
        for eta in roots {
            let w = horner(&self.wronskian, eta);
            let d = horner(&self.den, eta);
            let phi_prime = w / (d * d);
            if !phi_prime.norm().is_finite() || phi_prime.norm() == 0.0 {
                continue;
            }
            let round = (1.0 + eta.norm_sqr()).powi(-2);
            factors.push(self.value_scale.norm_sqr() * round / phi_prime.norm_sqr());
        }
        if factors.is_empty() {
            return Err(Error::Numeric(
                "no usable preimage for the quotient base factor".into(),
            ));
        }
        Ok(factors)
    }

    /// Conformal factor `e^{2φ(ζ)}` of the normalized base metric
    /// (curvature 4), away from the marked points.
    pub fn conformal_factor(&self, zeta: Complex64) -> Result<f64> {
        let mut factors = self.factors_at(zeta)?;
        factors.sort_by(|a, b| a.total_cmp(b));
        Ok(factors[factors.len() / 2])
    }

    /// Relative spread of the factor across the fiber: zero in exact
    /// arithmetic because the deck transformations are isometries of the
    /// round sphere.
    pub fn fiber_spread(&self, zeta: Complex64) -> Result<f64> {
        let factors = self.factors_at(zeta)?;
        let lo = factors.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = factors.iter().cloned().fold(0.0f64, f64::max);
        Ok((hi - lo) / hi.max(f64::MIN_POSITIVE))
    }

    /// Finite-difference Gaussian curvature of the base at `ζ`; the metric
    /// has constant curvature 4 away from the marked points.
    pub fn curvature_fd(&self, zeta: Complex64, step: f64) -> Result<f64> {
        let phi = |x: f64, y: f64| -> f64 {
            0.5 * self
                .conformal_factor(Complex64::new(x, y))
                .map(f64::ln)
                .unwrap_or(f64::NAN)
        };
        let lap = crate::fd::laplacian(&phi, zeta.re, zeta.im, step);
        let factor = self.conformal_factor(zeta)?;
        Ok(-lap / factor)
    }

    /// Verifies the number of numeric preimages of a generic value matches
    /// the declared map degree.
    pub fn degree(&self) -> usize {
        self.map.degree()
    }
}

// ---------------------------------------------------------------------------
// Exact invariance bookkeeping
// ---------------------------------------------------------------------------

/// A term `c·x₁^a·x₂^b` of an invariant polynomial, with rational `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
    pub coeff: (i64, i64),
}

fn mono(a: u32, b: u32, num: i64, den: i64) -> Monomial {
    Monomial {
        a,
        b,
        coeff: (num, den),
    }
}

/// The diagonal generator `(x₁, x₂) ↦ (ω_m x₁, ω_m^{−1} x₂)` multiplies
/// `x₁^a x₂^b` by `ω_m^{a−b}`; a polynomial is fixed exactly when every
/// monomial satisfies `a ≡ b (mod m)`.
pub fn fixed_by_diagonal(poly: &[Monomial], m: u32) -> bool {
    poly.iter()
        .all(|t| (i64::from(t.a) - i64::from(t.b)).rem_euclid(i64::from(m)) == 0)
}

/// The scalar generator `(x₁, x₂) ↦ (ω_k x₁, ω_k x₂)` multiplies
/// `x₁^a x₂^b` by `ω_k^{a+b}`; a polynomial is fixed exactly when every
/// monomial satisfies `a + b ≡ 0 (mod k)`.
pub fn fixed_by_scalar(poly: &[Monomial], k: u32) -> bool {
    poly.iter().all(|t| (t.a + t.b) % k == 0)
}

/// The transposition `(x₁, x₂) ↦ (x₂, x₁)` swaps exponents; a polynomial is
/// fixed exactly when its monomial list is symmetric with equal
/// coefficients.
pub fn fixed_by_transposition(poly: &[Monomial]) -> bool {
    poly.iter().all(|t| {
        poly.iter()
            .any(|s| s.a == t.b && s.b == t.a && s.coeff.0 * t.coeff.1 == t.coeff.0 * s.coeff.1)
    })
}

/// Invariants `z = x₁x₂` and `w = (x₁^m + x₂^m)/2` of the index-two
/// extension of the cyclic group by the transposition.
pub fn invariants_m_m(m: u32) -> (Vec<Monomial>, Vec<Monomial>) {
    let z = vec![mono(1, 1, 1, 1)];
    let w = vec![mono(m, 0, 1, 2), mono(0, m, 1, 2)];
    (z, w)
}

/// Invariants `u = z^m = (x₁x₂)^m` and `v = w² = (x₁^m + x₂^m)²/4` of the
/// larger group extended by the scalar `ω_{2m}`.
pub fn invariants_2m_2(m: u32) -> (Vec<Monomial>, Vec<Monomial>) {
    let u = vec![mono(m, m, 1, 1)];
    let v = vec![
        mono(2 * m, 0, 1, 4),
        mono(m, m, 1, 2),
        mono(0, 2 * m, 1, 4),
    ];
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::to_f64;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!(
            (a - b).abs() <= tol,
            "{what}: {a} vs {b} (|Δ| = {:.3e} > {tol:.1e})",
            (a - b).abs()
        );
    }

    #[test]
    fn catalog_orders_match_the_formulas() {
        // Imprimitive order 2m²/p.
        assert_eq!(catalog(Family::Imprimitive { m: 4, p: 2 }).unwrap().order, 16);
        assert_eq!(catalog(Family::Imprimitive { m: 5, p: 5 }).unwrap().order, 10);
        assert_eq!(catalog(Family::Imprimitive { m: 6, p: 1 }).unwrap().order, 72);
        assert_eq!(catalog(Family::Imprimitive { m: 6, p: 2 }).unwrap().order, 36);
        // Primitive orders are perfect squares of the map degrees.
        assert_eq!(catalog(Family::Tetrahedral).unwrap().order, 144);
        assert_eq!(catalog(Family::Octahedral).unwrap().order, 576);
        assert_eq!(catalog(Family::Icosahedral).unwrap().order, 3600);
        // Product of the invariant degrees equals the order for every
        // reflection family in the catalog.
        for spec in default_catalog() {
            if spec.invariant_degrees.len() == 2 {
                let product: u64 = spec.invariant_degrees.iter().map(|&d| d as u64).product();
                assert_eq!(product, spec.order, "degree product for {}", spec.label);
            }
            if let (Some(center), Some(deg)) = (spec.center_order, spec.map_degree) {
                if spec.triangle.is_some() {
                    assert_eq!(spec.order / center, deg as u64, "map degree for {}", spec.label);
                }
            }
        }
        // The primitive groups are generated by the scalars together with
        // the corresponding binary group, overlapping in ±1, so the order
        // is (scalar order)·(binary order)/2.
        for (family, binary) in [
            (Family::Tetrahedral, Family::BinaryTetrahedral),
            (Family::Octahedral, Family::BinaryOctahedral),
            (Family::Icosahedral, Family::BinaryIcosahedral),
        ] {
            let spec = catalog(family).unwrap();
            let b = catalog(binary).unwrap();
            let center = spec.center_order.unwrap();
            assert_eq!(center * b.order / 2, spec.order, "{}", spec.label);
        }
    }

    #[test]
    fn catalog_rejects_parameters_outside_the_classification() {
        assert!(catalog(Family::Imprimitive { m: 2, p: 2 }).is_err());
        assert!(catalog(Family::Imprimitive { m: 5, p: 2 }).is_err());
        assert!(catalog(Family::Imprimitive { m: 0, p: 1 }).is_err());
        assert!(catalog(Family::Cyclic { m: 1 }).is_err());
        assert!(Family::parse("dodecahedral").is_err());
    }

    #[test]
    fn catalog_records_the_orbit_space_equations() {
        let c5 = catalog(Family::Cyclic { m: 5 }).unwrap();
        assert_eq!(c5.surface.as_deref(), Some("w^2 + t^2 = z^5"));
        assert_eq!(c5.ade.as_deref(), Some("A_4"));
        assert_eq!(c5.singular_curves[0].equation, "w^2 = z^5");
        assert_eq!(c5.singular_curves[0].angle, rat(1, 2));

        let d3 = catalog(Family::BinaryDihedral { m: 3 }).unwrap();
        assert_eq!(d3.order, 12);
        assert_eq!(d3.surface.as_deref(), Some("t^2 + z*w^2 = z^4"));
        assert_eq!(d3.ade.as_deref(), Some("D_5"));

        assert_eq!(
            catalog(Family::BinaryOctahedral).unwrap().surface.as_deref(),
            Some("t^2 + w^3 = w*z^3")
        );

        let g33 = catalog(Family::Imprimitive { m: 3, p: 3 }).unwrap();
        assert_eq!(g33.singular_curves[0].equation, "w^2 = z^3");
        assert_eq!(g33.invariant_degrees, vec![2, 3]);

        let g42 = catalog(Family::Imprimitive { m: 4, p: 2 }).unwrap();
        assert_eq!(g42.map_degree, Some(4));
        assert_eq!(
            g42.base_angles.as_ref().unwrap().to_vec(),
            vec![rat(1, 2), rat(1, 2), rat(1, 2)]
        );
        assert_eq!(g42.singular_curves.len(), 3);

        let octa = catalog(Family::Octahedral).unwrap();
        assert_eq!(
            octa.triangle.as_ref().unwrap().to_vec(),
            vec![rat(1, 2), rat(1, 3), rat(1, 4)]
        );
    }

    #[test]
    fn family_labels_parse_back() {
        for spec in default_catalog() {
            assert_eq!(Family::parse(&spec.label).unwrap(), spec.family);
        }
        assert_eq!(
            Family::parse("G(6,2,2)").unwrap(),
            Family::Imprimitive { m: 6, p: 2 }
        );
    }

    #[test]
    fn equal_degree_imprimitive_maps_count_their_preimages() {
        for m in 2..=6u32 {
            let map = RationalMap::rugby(m).unwrap();
            assert_eq!(degree_by_preimages(&map, 3).unwrap(), 2 * m as usize);
        }
    }

    #[test]
    fn tetrahedral_and_octahedral_maps_count_their_preimages() {
        assert_eq!(degree_by_preimages(&RationalMap::tetrahedral(), 3).unwrap(), 12);
        assert_eq!(degree_by_preimages(&RationalMap::octahedral(), 3).unwrap(), 24);
    }

    #[test]
    fn icosahedral_map_counts_its_preimages() {
        assert_eq!(degree_by_preimages(&RationalMap::icosahedral(), 3).unwrap(), 60);
    }

    #[test]
    fn critical_probe_values_are_rejected_and_retried() {
        let map = RationalMap::rugby(2).unwrap();
        // 1 is a critical value: 4η² − (1+η²)² = −(1−η²)² has double roots.
        assert_eq!(preimage_count_at(&map, &rat_int(1)).unwrap(), None);
        assert_eq!(preimage_count_at(&map, &rat(7, 3)).unwrap(), Some(4));
        // 0 is attained with multiplicity m at the origin.
        assert_eq!(preimage_count_at(&map, &rat_int(0)).unwrap(), None);
    }

    #[test]
    fn rugby_map_critical_structure_is_exact() {
        for m in 2..=5usize {
            let map = RationalMap::rugby(m as u32).unwrap();
            // num′den − num den′ = 4m·η^{m−1}·(1 − η^{2m}).
            let mut expect = UniPoly::monomial(mc(4 * m as i64), m - 1);
            let band = UniPoly::from_coeffs({
                let mut c = vec![MapCoeff::zero(); 2 * m + 1];
                c[0] = mc(1);
                c[2 * m] = mc(-1);
                c
            });
            expect = expect.mul(&band);
            assert_eq!(map.wronskian(), expect, "critical polynomial for m = {m}");

            // Boundary values: Φ(1) = 1 exactly, Φ(0) = 0, and every root of
            // η^m + 1 is a pole (Φ = ∞ there).
            let one = MapCoeff::one();
            assert_eq!(map.expanded_num().eval(&one), mc(4));
            assert_eq!(map.expanded_den().eval(&one), mc(4));
            assert!(map.expanded_num().coeff(0).is_zero());
            assert_eq!(map.expanded_den().coeff(0), mc(1));
            let cyclo = UniPoly::from_coeffs({
                let mut c = vec![MapCoeff::zero(); m + 1];
                c[0] = mc(1);
                c[m] = mc(1);
                c
            });
            let (_, rem) = map.expanded_den().divrem(&cyclo);
            assert!(rem.is_zero(), "η^m + 1 divides the denominator");
            assert_eq!(map.expanded_num().gcd(&cyclo).degree(), Some(0));

            // Fiber over the third critical value 1: uniform ramification 2,
            // i.e. 4η^m − (1+η^m)² = −(1−η^m)².
            let minus_band = UniPoly::from_coeffs({
                let mut c = vec![MapCoeff::zero(); m + 1];
                c[0] = mc(1);
                c[m] = mc(-1);
                c
            });
            let fiber = map.fiber_polynomial(&MapCoeff::one());
            assert_eq!(fiber, minus_band.pow(2).scale(&mc(-1)));
        }
    }

    #[test]
    fn primitive_fibers_factor_with_uniform_ramification() {
        // Over 0 the fiber is a perfect cube and over ∞ a perfect square for
        // all three primitive maps (angles 1/3 and 1/2 there).
        for (map, name) in [
            (RationalMap::tetrahedral(), "tetrahedral"),
            (RationalMap::octahedral(), "octahedral"),
            (RationalMap::icosahedral(), "icosahedral"),
        ] {
            let num = map.expanded_num();
            let cube_root = num.squarefree_part();
            assert_eq!(
                cube_root.degree().unwrap() * 3,
                num.degree().unwrap(),
                "{name} numerator is a cube of a square-free polynomial"
            );
            assert_eq!(cube_root.pow(3), num.monic(), "{name} numerator cube");

            let den = map.expanded_den();
            let sqrt = den.squarefree_part();
            assert_eq!(
                sqrt.degree().unwrap() * 2,
                den.degree().unwrap(),
                "{name} denominator is a square of a square-free polynomial"
            );
            assert_eq!(sqrt.pow(2), den.monic(), "{name} denominator square");
        }

        // Third critical value with its uniform ramification, as exact
        // polynomial identities in the inner variable t:
        //   tetrahedral:  num − 12i√3·den = (t² − 2i√3·t + 1)³   (ram. 3)
        //   octahedral:   num − den = 108·t·(t − 1)⁴             (ram. 4)
        //   icosahedral:  num − den = −1728·t·(t² + 11t − 1)⁵    (ram. 5)
        let tetra = RationalMap::tetrahedral();
        let lhs = tetra.num().sub(&tetra.den().scale(&mc_i3(12)));
        let conj = UniPoly::from_coeffs(vec![mc(1), mc_i3(-2), mc(1)]);
        assert_eq!(lhs, conj.pow(3));

        let octa = RationalMap::octahedral();
        let lhs = octa.num().sub(octa.den());
        let rhs = UniPoly::monomial(mc(108), 1).mul(&poly_i64(&[-1, 1]).pow(4));
        assert_eq!(lhs, rhs);

        let icosa = RationalMap::icosahedral();
        let lhs = icosa.num().sub(icosa.den());
        let rhs = UniPoly::monomial(mc(-1728), 1).mul(&poly_i64(&[-1, 11, 1]).pow(5));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn maps_with_shared_roots_are_rejected() {
        let num = poly_i64(&[-1, 1]).mul(&poly_i64(&[1, 1]));
        let den = poly_i64(&[-1, 1]);
        assert!(RationalMap::new(num.clone(), den, 1, 2).is_err());
        assert!(RationalMap::new(num.clone(), poly_i64(&[1, 1, 1]), 1, 5).is_err());
        assert!(RationalMap::new(num, poly_i64(&[1, 1, 1]), 0, 2).is_err());
        assert!(RationalMap::for_family(Family::Cyclic { m: 3 }).is_err());
        assert!(RationalMap::for_family(Family::Imprimitive { m: 3, p: 3 }).is_err());
    }

    #[test]
    fn pullback_of_the_closed_form_base_is_round() {
        assert!(
            pullback_round_defect(200) <= 1e-9,
            "pullback deviates from the round metric by {:.3e}",
            pullback_round_defect(200)
        );
    }

    #[test]
    fn quotient_potential_pulls_back_to_the_euclidean_one() {
        let mut rng = sample::rng(sample::DEFAULT_SEED);
        for m in 2..=5u32 {
            for _ in 0..50 {
                let x1 = sample::complex_in_annulus(&mut rng, 0.3, 1.4);
                let x2 = sample::complex_in_annulus(&mut rng, 0.3, 1.4);
                let a = x1.powu(m);
                let b = x2.powu(m);
                let u = a * b;
                let v = (a + b) * (a + b) / 4.0;
                let pulled = quotient_potential(m, u, v);
                let euclid = x1.norm_sqr() + x2.norm_sqr();
                assert_close(pulled, euclid, 1e-12 * euclid, "potential pullback");
            }
        }
    }

    #[test]
    fn quotient_potential_is_homogeneous_of_the_cone_degree() {
        let u = Complex64::new(0.4, 0.7);
        let v = Complex64::new(-0.9, 0.2);
        for m in 2..=5u32 {
            let base = quotient_potential(m, u, v);
            for lambda in [0.5f64, 2.0, std::f64::consts::E] {
                let scaled = quotient_potential(m, lambda * u, lambda * v);
                let expect = lambda.powf(1.0 / m as f64) * base;
                assert_close(scaled, expect, 1e-12 * expect.abs(), "homogeneity");
            }
        }
    }

    #[test]
    fn normalized_potential_matches_the_flat_cone_closed_form() {
        // The flat cone built over the three-right-angle base must reproduce
        // the normalized potential 8√2·√(|u|+|v|+|u−v|), and the recovered
        // constant is 8√2 to near machine precision.
        let cone = crate::flatcone::flat_cone_from_base(&SphericalMetric::g222()).unwrap();
        let mut rng = sample::rng(sample::DEFAULT_SEED);
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let u = sample::complex_in_annulus(&mut rng, 0.2, 1.8);
            let v = sample::complex_in_annulus(&mut rng, 0.2, 1.8);
            let direct = cone.potential(u, v);
            let closed = g222_potential(u, v);
            worst = worst.max((direct / closed - 1.0).abs());
            let recovered = direct / (u.norm() + v.norm() + (u - v).norm()).sqrt();
            worst = worst.max((recovered / g222_potential_constant() - 1.0).abs());
        }
        assert!(worst <= 1e-9, "potential constant defect {worst:.3e}");
    }

    #[test]
    fn invariant_polynomials_are_fixed_by_the_generators() {
        for m in 2..=7u32 {
            let (z, w) = invariants_m_m(m);
            assert!(fixed_by_diagonal(&z, m));
            assert!(fixed_by_diagonal(&w, m));
            assert!(fixed_by_transposition(&z));
            assert!(fixed_by_transposition(&w));

            let (u, v) = invariants_2m_2(m);
            // Fixed by the smaller group…
            assert!(fixed_by_diagonal(&u, m));
            assert!(fixed_by_diagonal(&v, m));
            assert!(fixed_by_transposition(&u));
            assert!(fixed_by_transposition(&v));
            // …and by the extending scalar of order 2m.
            assert!(fixed_by_scalar(&u, 2 * m));
            assert!(fixed_by_scalar(&v, 2 * m));
            // The plain invariants of the smaller group are not fixed by the
            // extension (w ↦ −w), which is why u, v are needed.
            let (_, w) = invariants_m_m(m);
            assert!(!fixed_by_scalar(&w, 2 * m));
        }
    }

    #[test]
    fn quotient_base_factors_are_constant_on_fibers() {
        let base = QuotientBase::tetrahedral();
        for zeta in [
            Complex64::new(0.4, 0.3),
            Complex64::new(-0.8, 0.9),
            Complex64::new(2.1, -0.5),
            Complex64::new(0.2, -1.4),
        ] {
            let spread = base.fiber_spread(zeta).unwrap();
            assert!(spread <= 1e-8, "fiber spread {spread:.3e} at {zeta}");
        }
    }

    #[test]
    fn quotient_base_matches_the_closed_form_for_the_right_angle_family() {
        let base = QuotientBase::rugby(2).unwrap();
        let closed = SphericalMetric::g222();
        let mut rng = sample::rng(sample::DEFAULT_SEED);
        let avoid = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        for zeta in sample::points_avoiding(&mut rng, 30, 2.0, &avoid, 0.2) {
            let via_roots = base.conformal_factor(zeta).unwrap();
            let direct = (2.0 * closed.log_conformal(Chart::Xi, zeta)).exp();
            assert_close(via_roots, direct, 1e-9 * direct, "m = 2 base factor");
        }
    }

    #[test]
    fn quotient_bases_have_curvature_four() {
        for (base, name) in [
            (QuotientBase::tetrahedral(), "tetrahedral"),
            (QuotientBase::octahedral(), "octahedral"),
        ] {
            for zeta in [Complex64::new(0.5, 0.4), Complex64::new(-0.7, 1.1)] {
                // Step balances the h² truncation error against root-finder
                // noise amplified by 1/h² in the second difference.
                let k = base.curvature_fd(zeta, 1e-2).unwrap();
                assert_close(k, 4.0, 1e-3, &format!("{name} curvature at {zeta}"));
            }
        }
    }

    #[test]
    fn quotient_base_angles_are_admissible() {
        for base in [
            QuotientBase::rugby(3).unwrap(),
            QuotientBase::tetrahedral(),
            QuotientBase::octahedral(),
            QuotientBase::icosahedral(),
        ] {
            let config = base.config();
            let report = config
                .validate(crate::config::ValidationContext::Strict, 1e-12)
                .unwrap();
            assert!(report.pass);
            // Cone number² · group order = 1 for every quotient base in the
            // catalog: the map degree is |G|/|center| and c = center/|G|… in
            // short the quotient link has 1/|G| of the round volume.
            let family = match base.degree() {
                6 => Family::Imprimitive { m: 6, p: 2 },
                12 => Family::Tetrahedral,
                24 => Family::Octahedral,
                60 => Family::Icosahedral,
                other => panic!("unexpected degree {other}"),
            };
            let spec = catalog(family).unwrap();
            let c = config.cone_number();
            let c = c.as_exact().unwrap();
            assert_eq!(
                c * c * rat_int(spec.order as i64),
                rat_int(1),
                "c²·|G| = 1 for {}",
                spec.label
            );
        }
        let c = QuotientBase::rugby(3).unwrap().config().cone_number();
        assert_eq!(to_f64(c.as_exact().unwrap()), 1.0 / 6.0);
    }
}
