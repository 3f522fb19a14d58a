//! Exact energy bookkeeping for Kähler–Einstein edge metrics and their
//! bubble decompositions.
//!
//! All quantities here are rational functions of the edge angle parameter
//! `β` and small integer topological data, so every identity is checked in
//! exact arithmetic.  The three energy normalizations are
//!
//! * `ke_energy(χ_X, χ_D, β) = χ_X + (β − 1) χ_D` for an edge metric on a
//!   compact surface `X` with edge of angle `2πβ` along a divisor `D`;
//! * `ale_energy(χ_M, |Γ|) = χ_M − 1/|Γ|` for an ALE gravitational
//!   instanton asymptotic to a quotient of flat space by `Γ`;
//! * `rf_cone_energy(χ_C, β, ν) = 1 + (β − 1) χ_C − ν` for a Ricci-flat
//!   Kähler cone metric with volume ratio `ν` and an edge along a curve
//!   `C` of Euler characteristic `χ_C`.
//!
//! A point where `r` lines of equal angle `2πβ` meet contributes the
//! bubble energy
//!
//! ```text
//! E_r(β) = 1 + (β − 1)(2r − r²) − (1 − r/2 + rβ/2)²,
//! ```
//!
//! and for the classical rigid line arrangements the total energy
//! `3 + (1 − β)((k−1)(k−2) − 2)` decomposes exactly as `Σ_r t_r E_r(β)`
//! over the multiple points (`t_r` = number of `r`-fold points).  The
//! [`Arrangement`] type carries that data and [`Arrangement::ledger`]
//! verifies the decomposition with zero residual.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, rat, rat_int};
use crate::{Error, Result};

/// `χ_X + (β − 1) χ_D`: normalized energy of an edge metric.
pub fn ke_energy(chi_x: i64, chi_d: i64, beta: &BigRational) -> BigRational {
    rat_int(chi_x) + (beta - BigRational::one()) * rat_int(chi_d)
}

/// `χ_M − 1/|Γ|`: normalized energy of an ALE space asymptotic to a flat
/// quotient by a group of the given order.
pub fn ale_energy(chi_m: i64, group_order: u64) -> Result<BigRational> {
    if group_order == 0 {
        return Err(Error::InvalidConfig("group order must be positive".into()));
    }
    Ok(rat_int(chi_m) - rat(1, group_order as i64))
}

/// `1 + (β − 1) χ_C − ν`: normalized energy of a Ricci-flat Kähler cone
/// with volume ratio `ν` and edge along a curve of Euler characteristic
/// `χ_C`.
pub fn rf_cone_energy(chi_c: i64, beta: &BigRational, nu: &BigRational) -> BigRational {
    BigRational::one() + (beta - BigRational::one()) * rat_int(chi_c) - nu
}

/// Cone number of the flat cone over `r` lines through one point with
/// equal angles `2πβ`: `1 − r/2 + rβ/2`.
pub fn bubble_cone_number(r: u32, beta: &BigRational) -> BigRational {
    BigRational::one() - rat(r as i64, 2) + rat(r as i64, 2) * beta
}

/// Bubble energy `E_r(β)` of an `r`-fold point of an arrangement with
/// equal angles `2πβ`; the volume-ratio term is the square of the cone
/// number, so `E_r = 1 + (β−1)(2r − r²) − (1 − r/2 + rβ/2)²`.
pub fn bubble_energy(r: u32, beta: &BigRational) -> Result<BigRational> {
    if r < 2 {
        return Err(Error::InvalidConfig(
            "bubble energy needs r ≥ 2 lines through the point".into(),
        ));
    }
    if !(beta > &BigRational::zero() && beta <= &BigRational::one()) {
        return Err(Error::InvalidConfig(format!(
            "β = {} outside (0,1]",
            format_rational(beta)
        )));
    }
    let r_i = r as i64;
    let chi_c = rat_int(2 * r_i - r_i * r_i);
    let c = bubble_cone_number(r, beta);
    let nu = c.clone() * c;
    Ok(BigRational::one() + (beta - BigRational::one()) * chi_c - nu)
}

/// Total energy `3 + (1 − β)((k−1)(k−2) − 2)` of the edge metric on the
/// projective plane along an arrangement of `k` lines with angle `2πβ`.
pub fn arrangement_energy(k: u32, beta: &BigRational) -> BigRational {
    // χ of the plane is 3, χ of the (normalized) degree-k divisor is
    // 2 − (k−1)(k−2), so this is ke_energy(3, 2 − (k−1)(k−2), β).
    let k_i = k as i64;
    ke_energy(3, 2 - (k_i - 1) * (k_i - 2), beta)
}

/// A rigid line arrangement: `k` lines in the projective plane with `t_r`
/// points of multiplicity `r` and a designated edge angle `2πβ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arrangement {
    pub name: String,
    pub line_count: u32,
    /// Map multiplicity `r` → number `t_r` of `r`-fold points.
    pub multiplicities: BTreeMap<u32, u32>,
    /// Edge angle parameter `β` at which the decomposition is evaluated.
    pub beta: BigRational,
}

/// One row of an arrangement ledger: `t_r` points of multiplicity `r`,
/// each contributing `E_r(β)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerRow {
    pub r: u32,
    pub count: u32,
    pub bubble_energy: BigRational,
}

/// Exact decomposition of the total arrangement energy into bubble terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ledger {
    pub total_energy: BigRational,
    pub rows: Vec<LedgerRow>,
    /// `total − Σ t_r E_r`; zero when the decomposition balances.
    pub residual: BigRational,
}

impl Arrangement {
    pub fn new(
        name: impl Into<String>,
        line_count: u32,
        multiplicities: BTreeMap<u32, u32>,
        beta: BigRational,
    ) -> Result<Self> {
        let arr = Arrangement {
            name: name.into(),
            line_count,
            multiplicities,
            beta,
        };
        arr.validate()?;
        Ok(arr)
    }

    /// Structural checks: multiplicities in range, the pairwise-incidence
    /// identity `k(k−1)/2 = Σ t_r r(r−1)/2`, and positivity of every
    /// bubble cone number at this `β`.
    pub fn validate(&self) -> Result<()> {
        if self.line_count < 3 {
            return Err(Error::InvalidConfig(
                "arrangement needs at least three lines".into(),
            ));
        }
        if !(self.beta > BigRational::zero() && self.beta <= BigRational::one()) {
            return Err(Error::InvalidConfig(format!(
                "β = {} outside (0,1]",
                format_rational(&self.beta)
            )));
        }
        let k = self.line_count as i64;
        let mut pairs = 0i64;
        for (&r, &t) in &self.multiplicities {
            if r < 2 || r > self.line_count {
                return Err(Error::InvalidConfig(format!(
                    "multiplicity {r} out of range 2..={}",
                    self.line_count
                )));
            }
            let r = r as i64;
            pairs += t as i64 * r * (r - 1) / 2;
        }
        if pairs != k * (k - 1) / 2 {
            return Err(Error::InvalidConfig(format!(
                "pairwise incidences don't balance: k(k−1)/2 = {} but Σ t_r r(r−1)/2 = {}",
                k * (k - 1) / 2,
                pairs
            )));
        }
        for &r in self.multiplicities.keys() {
            if bubble_cone_number(r, &self.beta) <= BigRational::zero() {
                return Err(Error::Inadmissible(format!(
                    "cone number of the {r}-fold point vanishes at β = {}",
                    format_rational(&self.beta)
                )));
            }
        }
        Ok(())
    }

    /// Total energy and its exact bubble decomposition.
    pub fn ledger(&self) -> Result<Ledger> {
        self.validate()?;
        let total = arrangement_energy(self.line_count, &self.beta);
        let mut rows = Vec::new();
        let mut sum = BigRational::zero();
        for (&r, &count) in &self.multiplicities {
            let e = bubble_energy(r, &self.beta)?;
            sum += rat_int(count as i64) * &e;
            rows.push(LedgerRow {
                r,
                count,
                bubble_energy: e,
            });
        }
        let residual = total.clone() - sum;
        Ok(Ledger {
            total_energy: total,
            rows,
            residual,
        })
    }
}

/// The seven classical rigid arrangements with their natural angles.
pub mod arrangements {
    use super::*;

    /// `A₀(m)`: the `3m` lines fixed by the symmetry group of the
    /// `m`-fold cover construction; `m²` triple points and 3 points of
    /// multiplicity `m`, angle `β = (m−1)/m`.  For `m = 3` the two kinds
    /// of point coincide, for `m = 2` the `m`-fold points are double
    /// points; the multiplicity map merges both cases automatically.
    pub fn a0(m: u32) -> Result<Arrangement> {
        if m < 2 {
            return Err(Error::InvalidConfig("A₀(m) needs m ≥ 2".into()));
        }
        let mut mult = BTreeMap::new();
        *mult.entry(3).or_insert(0) += m * m;
        *mult.entry(m).or_insert(0) += 3;
        Arrangement::new(
            format!("A0({m})"),
            3 * m,
            mult,
            rat(m as i64 - 1, m as i64),
        )
    }

    /// `A₃(m)`: `3m + 3` lines with `3m` double points, `m²` triple
    /// points and 3 points of multiplicity `m + 2`, angle `β = m/(m+1)`.
    pub fn a3(m: u32) -> Result<Arrangement> {
        if m < 2 {
            return Err(Error::InvalidConfig("A₃(m) needs m ≥ 2".into()));
        }
        let mut mult = BTreeMap::new();
        *mult.entry(2).or_insert(0) += 3 * m;
        *mult.entry(3).or_insert(0) += m * m;
        *mult.entry(m + 2).or_insert(0) += 3;
        Arrangement::new(
            format!("A3({m})"),
            3 * m + 3,
            mult,
            rat(m as i64, m as i64 + 1),
        )
    }

    /// Hesse arrangement: 12 lines, 12 double and 9 quadruple points,
    /// `β = 3/4`.
    pub fn hesse() -> Arrangement {
        Arrangement::new(
            "Hesse",
            12,
            BTreeMap::from([(2, 12), (4, 9)]),
            rat(3, 4),
        )
        .expect("built-in arrangement")
    }

    /// Extended Hesse arrangement: 21 lines, 36 double, 9 quadruple and
    /// 12 quintuple points, `β = 6/7`.
    pub fn extended_hesse() -> Arrangement {
        Arrangement::new(
            "ExtendedHesse",
            21,
            BTreeMap::from([(2, 36), (4, 9), (5, 12)]),
            rat(6, 7),
        )
        .expect("built-in arrangement")
    }

    /// Icosahedral arrangement: 15 lines, 15 double, 10 triple and 6
    /// quintuple points, `β = 4/5`.
    pub fn icosahedral() -> Arrangement {
        Arrangement::new(
            "Icosahedral",
            15,
            BTreeMap::from([(2, 15), (3, 10), (5, 6)]),
            rat(4, 5),
        )
        .expect("built-in arrangement")
    }

    /// Klein arrangement of the simple group of order 168: 21 lines,
    /// 28 triple and 21 quadruple points, `β = 6/7`.
    pub fn g168() -> Arrangement {
        Arrangement::new(
            "G168",
            21,
            BTreeMap::from([(3, 28), (4, 21)]),
            rat(6, 7),
        )
        .expect("built-in arrangement")
    }

    /// Valentiner arrangement of the alternating group on six letters:
    /// 45 lines, 120 triple, 45 quadruple and 36 quintuple points,
    /// `β = 14/15`.
    pub fn a6() -> Arrangement {
        Arrangement::new(
            "A6",
            45,
            BTreeMap::from([(3, 120), (4, 45), (5, 36)]),
            rat(14, 15),
        )
        .expect("built-in arrangement")
    }

    /// All seven built-in arrangements at their natural angles, with the
    /// parametrized families instantiated at `m`.
    pub fn all(m: u32) -> Result<Vec<Arrangement>> {
        Ok(vec![
            a0(m)?,
            a3(m)?,
            hesse(),
            extended_hesse(),
            icosahedral(),
            g168(),
            a6(),
        ])
    }
}

/// Outcome of a volume-ratio lower-bound test `ν ≥ (1/9)(a − (1−β) b)²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeBoundReport {
    pub pass: bool,
    /// Left side `ν`.
    pub nu: BigRational,
    /// Right side `(1/9)(a − (1−β) b)²`.
    pub bound: BigRational,
    /// `ν − bound` (nonnegative on pass).
    pub slack: BigRational,
}

/// Comparison-geometry lower bound for the volume ratio of a Ricci-flat
/// cone limit: `ν ≥ (1/9)(a − (1−β) b)²`, where `a` and `b` are the
/// degrees of the ambient anticanonical class and of the edge divisor
/// class against the hyperplane.
pub fn bishop_gromov_check(
    beta: &BigRational,
    nu: &BigRational,
    a: i64,
    b: i64,
) -> VolumeBoundReport {
    let inner = rat_int(a) - (BigRational::one() - beta) * rat_int(b);
    let bound = inner.clone() * inner / rat_int(9);
    let slack = nu - bound.clone();
    VolumeBoundReport {
        pass: !slack.is_negative(),
        nu: nu.clone(),
        bound,
        slack,
    }
}

/// The volume-bound test specialized to the cuspidal-cubic degeneration:
/// the limit cone has `ν = 2β − 1` and the bound is `β²`, so the test
/// holds only at `β = 1`.
pub fn cuspidal_cubic_volume_bound(beta: &BigRational) -> VolumeBoundReport {
    let nu = rat_int(2) * beta - BigRational::one();
    bishop_gromov_check(beta, &nu, 3, 3)
}

/// Energy bookkeeping of a degeneration: ambient energy, energy of the
/// limit metric, and the total carried away by bubbles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergySplit {
    pub ambient: BigRational,
    pub limit: BigRational,
    pub bubbles: BigRational,
    /// `ambient − limit − bubbles`; zero when the split balances.
    pub residual: BigRational,
}

impl EnergySplit {
    fn new(ambient: BigRational, limit: BigRational, bubbles: BigRational) -> Self {
        let residual = ambient.clone() - limit.clone() - bubbles.clone();
        EnergySplit {
            ambient,
            limit,
            bubbles,
            residual,
        }
    }
}

/// Energy split for edge metrics along a smooth cubic degenerating to a
/// cone: `(3, 3β², 3(1 − β²))`.
pub fn elliptic_energy_split(beta: &BigRational) -> EnergySplit {
    let three = rat_int(3);
    let b2 = beta * beta;
    EnergySplit::new(
        three.clone(),
        three.clone() * &b2,
        three * (BigRational::one() - b2),
    )
}

/// Energy split for edge metrics along a smooth quartic degenerating to a
/// double conic: `(7 − 4β, 4β − 1, 8(1 − β))`.
pub fn quartic_energy_split(beta: &BigRational) -> EnergySplit {
    EnergySplit::new(
        rat_int(7) - rat_int(4) * beta,
        rat_int(4) * beta - BigRational::one(),
        rat_int(8) * (BigRational::one() - beta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energies_at_angle_one_reduce_to_euler_characteristics() {
        let one = BigRational::one();
        assert_eq!(ke_energy(3, -108, &one), rat_int(3));
        for r in 2..30 {
            assert!(bubble_energy(r, &one).unwrap().is_zero());
        }
    }

    #[test]
    fn bubble_energy_small_cases() {
        // E_2(β) = 1 − β², a double point.
        let beta = rat(3, 4);
        let e2 = bubble_energy(2, &beta).unwrap();
        assert_eq!(e2, BigRational::one() - beta.clone() * beta);
        // E_3(1/2): χ_C = −3, c = 1 − 3/2 + 3/4 = 1/4 → 1 + 3/2 − 1/16.
        let e3 = bubble_energy(3, &rat(1, 2)).unwrap();
        assert_eq!(e3, rat(39, 16));
    }

    #[test]
    fn ale_energy_formula() {
        assert_eq!(ale_energy(3, 4).unwrap(), rat(11, 4));
        assert!(ale_energy(3, 0).is_err());
    }

    #[test]
    fn rf_cone_energy_for_cuspidal_cubic() {
        // χ_C = 1, ν = 2β − 1 gives E = 1 − β.
        let beta = rat(9, 10);
        let nu = rat_int(2) * &beta - BigRational::one();
        let e = rf_cone_energy(1, &beta, &nu);
        assert_eq!(e, BigRational::one() - beta);
    }

    #[test]
    fn ledger_totals_match_closed_forms() {
        // A₀(m): E = 9m − 6; A₃(m): E = 9m + 3.
        for m in 2..8u32 {
            let l = arrangements::a0(m).unwrap().ledger().unwrap();
            assert_eq!(l.total_energy, rat_int(9 * m as i64 - 6), "A0({m})");
            assert!(l.residual.is_zero(), "A0({m}) residual {}", l.residual);

            let l = arrangements::a3(m).unwrap().ledger().unwrap();
            assert_eq!(l.total_energy, rat_int(9 * m as i64 + 3), "A3({m})");
            assert!(l.residual.is_zero(), "A3({m}) residual {}", l.residual);
        }
        let cases: Vec<(Arrangement, i64)> = vec![
            (arrangements::hesse(), 30),
            (arrangements::extended_hesse(), 57),
            (arrangements::icosahedral(), 39),
            (arrangements::g168(), 57),
            (arrangements::a6(), 129),
        ];
        for (arr, expected) in cases {
            let l = arr.ledger().unwrap();
            assert_eq!(l.total_energy, rat_int(expected), "{}", arr.name);
            assert!(l.residual.is_zero(), "{} residual {}", arr.name, l.residual);
        }
    }

    #[test]
    fn a0_multiplicity_merges() {
        // m = 3: the three m-fold points are themselves triple points.
        let arr = arrangements::a0(3).unwrap();
        assert_eq!(arr.multiplicities, BTreeMap::from([(3, 12)]));
        // m = 2: they are double points.
        let arr = arrangements::a0(2).unwrap();
        assert_eq!(arr.multiplicities, BTreeMap::from([(2, 3), (3, 4)]));
    }

    #[test]
    fn validate_rejects_unbalanced_incidences() {
        let bad = Arrangement::new(
            "bad",
            12,
            BTreeMap::from([(2, 11), (4, 9)]),
            rat(3, 4),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn ledger_at_shifted_angle_has_nonzero_residual() {
        // The decomposition balances only at the arrangement's natural β.
        let mut arr = arrangements::hesse();
        arr.beta = rat(4, 5);
        let l = arr.ledger().unwrap();
        assert!(!l.residual.is_zero());
    }

    #[test]
    fn volume_bound_only_at_unit_angle() {
        // 2β − 1 ≥ β² fails for all β < 1 and holds with equality at 1.
        for num in 1..40i64 {
            let beta = rat(num, 40);
            let rep = cuspidal_cubic_volume_bound(&beta);
            assert!(!rep.pass, "unexpected pass at β = {beta}");
        }
        let rep = cuspidal_cubic_volume_bound(&BigRational::one());
        assert!(rep.pass && rep.slack.is_zero());
    }

    #[test]
    fn energy_splits_balance() {
        for num in 1..20i64 {
            let beta = rat(num, 20);
            assert!(elliptic_energy_split(&beta).residual.is_zero());
            assert!(quartic_energy_split(&beta).residual.is_zero());
        }
        // Spot values at β = 1/2.
        let s = quartic_energy_split(&rat(1, 2));
        assert_eq!(s.ambient, rat_int(5));
        assert_eq!(s.limit, rat_int(1));
        assert_eq!(s.bubbles, rat_int(4));
    }
}
