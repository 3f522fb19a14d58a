//! Plane-curve germ analysis: orders, first Puiseux exponents and the
//! singularity exponent `c₀` read off a Newton polygon.
//!
//! For a germ `f(z,w)` vanishing at the origin with multiplicity `d`
//! (the degree of its lowest homogeneous part `P_d`), the singularity
//! exponent is
//!
//! ```text
//! c₀(f) = 1/d + 1/e,
//! ```
//!
//! where `e/d ≥ 1` is the first Puiseux exponent of the branches.  Three
//! germ families are supported, covering every case where the polygon
//! determines `e` outright:
//!
//! * smooth germs (`d = 1`): `c₀ = 1`;
//! * ordinary `d`-fold points (`P_d` square-free): all branches smooth
//!   and transverse, `e = d`, so `c₀ = 2/d`;
//! * one-edge germs: after normalizing the tangent cone to `w^d` (by a
//!   swap of the variables and/or a linear shear), the Newton polygon has
//!   a single compact edge from `(0,d)` to `(e,0)`, as for `w^m − z^n`
//!   and any perturbation supported on or above that edge.
//!
//! Everything else is rejected with a diagnostic rather than guessed at.
//!
//! Two derived quantities accompany `c₀`: the admissible range `(1−c₀, 1)`
//! of edge angles `β` along the curve, and — for co-prime `(m,n)` germs —
//! the rescaling exponent `n − m/γ`, `γ = mβ + 1 − m`, whose sign decides
//! whether blow-down rescalings of the edge metric converge to a product
//! cone (positive exactly when `β > 1 − 1/m + 1/n`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::UniPoly;
use crate::rational::{format_rational, rat, rat_int};
use crate::{Error, Result};

/// Sparse bivariate polynomial in `z, w` over the rationals; keys are
/// `(z-exponent, w-exponent)` and zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn monomial(c: BigRational, i: u32, j: u32) -> Self {
        let mut p = BiPoly::zero();
        p.add_term(c, i, j);
        p
    }

    pub fn add_term(&mut self, c: BigRational, i: u32, j: u32) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> BigRational {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(c.clone(), i, j);
        }
        out
    }

    pub fn neg(&self) -> Self {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&k, c)| (k, -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BiPoly::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(c1 * c2, i1 + i2, j1 + j2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BiPoly::monomial(BigRational::one(), 0, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Minimal total degree of the support (the order of vanishing at 0).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    /// Homogeneous part of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(i, j), _)| i + j == degree)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
        }
    }

    /// Swaps the two variables.
    pub fn swap_vars(&self) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(i, j), c)| ((j, i), c.clone()))
                .collect(),
        }
    }

    /// Substitutes `z ↦ z + t·w`.
    pub fn shear_z(&self, t: &BigRational) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(i, j), c) in &self.terms {
            // (z + t w)^i = Σ_k C(i,k) t^(i−k) z^k w^(i−k).
            let mut binom = BigInt::one();
            // Iterate k from i down to 0 so the binomial update is integral.
            for k in (0..=i).rev() {
                let t_pow = pow_rational(t, i - k);
                let coeff = c * BigRational::from_integer(binom.clone()) * t_pow;
                out.add_term(coeff, k, j + (i - k));
                if k > 0 {
                    // C(i, k−1) = C(i, k) · k / (i − k + 1).
                    binom = binom * BigInt::from(k) / BigInt::from(i - k + 1);
                }
            }
        }
        out
    }

    /// Dehomogenization `r(t) = P(t, 1)` of a homogeneous part, with the
    /// z-exponent as the variable power.
    fn dehomogenize(&self, degree: u32) -> UniPoly<BigRational> {
        let mut coeffs = vec![BigRational::zero(); degree as usize + 1];
        for (&(i, j), c) in &self.terms {
            if i + j == degree {
                coeffs[i as usize] = c.clone();
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

fn pow_rational(t: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= t;
    }
    acc
}

/// Which of the supported germ families the analysis landed in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GermFamily {
    Smooth,
    /// `d` pairwise transverse smooth branches.
    Ordinary { d: u32 },
    /// Single Newton-polygon edge from `(0,d)` to `(e,0)` after
    /// normalization.
    OneEdge { d: u32, e: u32 },
}

/// Coordinate changes applied before reading the polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalization {
    SwapVariables,
    /// `z ↦ z + t·w` with the recorded rational `t`.
    Shear,
}

/// Output of [`analyze_germ`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GermAnalysis {
    /// Multiplicity `d` of the germ at the origin.
    pub order: u32,
    /// First Puiseux exponent `e/d` (equal to 1 for smooth/ordinary).
    pub puiseux_exponent: BigRational,
    /// Singularity exponent `c₀ = 1/d + 1/e` (capped to 1 for smooth).
    pub c0: BigRational,
    pub family: GermFamily,
    pub normalizations: Vec<Normalization>,
}

/// Computes order, first Puiseux exponent and `c₀` of a plane germ.
pub fn analyze_germ(f: &BiPoly) -> Result<GermAnalysis> {
    if f.is_zero() {
        return Err(Error::InvalidConfig("zero polynomial".into()));
    }
    let d = f.order().unwrap();
    if d == 0 {
        return Err(Error::InvalidConfig(
            "germ does not vanish at the origin".into(),
        ));
    }
    if d == 1 {
        return Ok(GermAnalysis {
            order: 1,
            puiseux_exponent: BigRational::one(),
            c0: BigRational::one(),
            family: GermFamily::Smooth,
            normalizations: Vec::new(),
        });
    }

    // Lowest homogeneous part P_d; its dehomogenization r(t) = P_d(t, 1)
    // has the tangent directions as roots (t = root ↔ factor z − t·w,
    // drop in degree ↔ factor w).
    let p_d = f.homogeneous_part(d);
    let r = p_d.dehomogenize(d);
    let r_deg = r.degree().unwrap_or(0) as u32;
    let distinct = r.distinct_root_count() as u32 + u32::from(r_deg < d);

    if distinct == d {
        // Square-free tangent cone: d transverse smooth branches.
        return Ok(GermAnalysis {
            order: d,
            puiseux_exponent: BigRational::one(),
            c0: rat(2, d as i64),
            family: GermFamily::Ordinary { d },
            normalizations: Vec::new(),
        });
    }
    if distinct != 1 {
        return Err(Error::Unsupported(format!(
            "tangent cone has {distinct} distinct directions with multiplicities; \
             only ordinary and one-edge germs are supported"
        )));
    }

    // Single repeated tangent direction: normalize it to {w = 0}.
    let mut g = f.clone();
    let mut normalizations = Vec::new();
    if r_deg == d {
        // Tangent factor (z − τ w)^d with τ the unique root of r.
        let sf = r.squarefree_part();
        debug_assert_eq!(sf.degree(), Some(1));
        let tau = -(sf.coeff(0) / sf.coeff(1));
        if !tau.is_zero() {
            g = g.shear_z(&tau);
            normalizations.push(Normalization::Shear);
        }
        g = g.swap_vars();
        normalizations.push(Normalization::SwapVariables);
    } else if r_deg > 0 {
        // Mixed factor w^(d - r_deg) · (…) with one direction: cannot
        // happen when distinct == 1 unless r is a monomial c·t^r_deg,
        // which has roots {0} and the ∞ direction — two directions.
        return Err(Error::Unsupported(
            "tangent cone mixes the two axes; only ordinary and one-edge germs are supported"
                .into(),
        ));
    }
    // Now the tangent cone of g is c·w^d.
    debug_assert_eq!(
        g.homogeneous_part(d).dehomogenize(d).degree().unwrap_or(0),
        0
    );

    // Newton polygon: need a pure z-power for the edge to terminate.
    let e = g
        .terms()
        .filter(|(&(_, j), _)| j == 0)
        .map(|(&(i, _), _)| i)
        .min()
        .ok_or_else(|| {
            Error::Unsupported(
                "germ is divisible by its tangent line (non-reduced or axis component)".into(),
            )
        })?;
    debug_assert!(e > d);
    // Single-edge test: every support point must satisfy i/e + j/d ≥ 1.
    for (&(i, j), _) in g.terms() {
        if (i as u64) * (d as u64) + (j as u64) * (e as u64) < (e as u64) * (d as u64) {
            return Err(Error::Unsupported(format!(
                "Newton polygon has a vertex at ({i},{j}) below the edge from (0,{d}) to ({e},0); \
                 multi-edge germs are not supported"
            )));
        }
    }

    Ok(GermAnalysis {
        order: d,
        puiseux_exponent: rat(e as i64, d as i64),
        c0: rat(1, d as i64) + rat(1, e as i64),
        family: GermFamily::OneEdge { d, e },
        normalizations,
    })
}

/// Open range `(1 − c₀, 1)` of edge angles `β` admissible along a curve
/// with singularity exponent `c₀`.
pub fn admissible_angle_range(c0: &BigRational) -> Result<(BigRational, BigRational)> {
    if !(c0 > &BigRational::zero() && c0 <= &BigRational::one()) {
        return Err(Error::InvalidConfig(format!(
            "c₀ = {} outside (0,1]",
            format_rational(c0)
        )));
    }
    Ok((BigRational::one() - c0, BigRational::one()))
}

/// Open angle window `(1 − 1/m − 1/n, 1 − 1/m + 1/n)` in which the germ
/// `w^m − z^n` bounds a flat-cone edge metric; requires `2 ≤ m < n`
/// co-prime.
pub fn flat_cone_angle_window(m: u32, n: u32) -> Result<(BigRational, BigRational)> {
    if !(2 <= m && m < n) {
        return Err(Error::InvalidConfig(format!(
            "need 2 ≤ m < n, got ({m},{n})"
        )));
    }
    if m.gcd(&n) != 1 {
        return Err(Error::InvalidConfig(format!(
            "({m},{n}) are not co-prime"
        )));
    }
    let one = BigRational::one();
    let lo = &one - rat(1, m as i64) - rat(1, n as i64);
    let hi = &one - rat(1, m as i64) + rat(1, n as i64);
    Ok((lo, hi))
}

/// Verdict of the rescaling analysis at a `(m,n)` germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RescalingVerdict {
    /// Positive exponent: rescalings converge to a product cone.
    ProductCone,
    /// Zero exponent: borderline angle `β = 1 − 1/m + 1/n`.
    Boundary,
    /// Negative exponent: no product-cone limit.
    NonProduct,
}

/// Result of [`rescaling_exponent`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RescalingReport {
    /// The collision angle `γ = mβ + 1 − m` of the `m` colliding sheets.
    pub gamma: BigRational,
    /// The exponent `n − m/γ` controlling the rescaled edge divisor.
    pub exponent: BigRational,
    pub verdict: RescalingVerdict,
}

/// Exponent `n − m/γ`, `γ = mβ + 1 − m`, of the rescaled germ `w^m − z^n`
/// under the weighted dilations adapted to the collision angle `γ`.
///
/// Requires `γ > 0`, i.e. `β > 1 − 1/m`; the verdict is positive exactly
/// when `β` exceeds the upper window endpoint `1 − 1/m + 1/n`.
pub fn rescaling_exponent(m: u32, n: u32, beta: &BigRational) -> Result<RescalingReport> {
    if !(2 <= m && m < n) {
        return Err(Error::InvalidConfig(format!(
            "need 2 ≤ m < n, got ({m},{n})"
        )));
    }
    if !(beta > &BigRational::zero() && beta < &BigRational::one()) {
        return Err(Error::InvalidConfig(format!(
            "β = {} outside (0,1)",
            format_rational(beta)
        )));
    }
    let gamma = rat_int(m as i64) * beta + BigRational::one() - rat_int(m as i64);
    if !gamma.is_positive() {
        return Err(Error::Inadmissible(format!(
            "collision angle γ = mβ + 1 − m = {} is not positive (β ≤ 1 − 1/{m})",
            format_rational(&gamma)
        )));
    }
    let exponent = rat_int(n as i64) - rat_int(m as i64) / gamma.clone();
    let verdict = if exponent.is_positive() {
        RescalingVerdict::ProductCone
    } else if exponent.is_zero() {
        RescalingVerdict::Boundary
    } else {
        RescalingVerdict::NonProduct
    };
    Ok(RescalingReport {
        gamma,
        exponent,
        verdict,
    })
}
