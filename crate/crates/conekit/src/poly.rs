//! Exact univariate polynomial arithmetic over small coefficient fields,
//! plus a numeric root finder used as an independent cross-check.
//!
//! The exact side works over any [`Coeff`] field:
//!
//! * [`num_rational::BigRational`] — plain rationals;
//! * [`QuadExt<D>`] — the quadratic extension `ℚ(√D)` for a fixed
//!   square-free integer `D` (the crate uses `D = −1` for Gaussian
//!   rationals and `D = −3` for coefficients involving `i√3`).
//!
//! Distinct-root counting is done exactly via `deg p − deg gcd(p, p′)`
//! (characteristic zero, so the square-free part has exactly the distinct
//! roots of `p`), and numerically via a Durand–Kerner iteration whose
//! output is certified with pairwise-disjoint Newton inclusion disks
//! (`|z − root| ≤ n·|p(z)/p′(z)|` always contains a root).

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::{rat_int, to_f64};
use crate::{Error, Result};

/// Field operations needed for exact polynomial arithmetic.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Field inverse; panics on zero.
    fn inv(&self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(n: i64) -> Self;
    /// Embedding into the complex numbers (for numeric cross-checks).
    fn to_complex(&self) -> Complex64;

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(n: i64) -> Self {
        rat_int(n)
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(to_f64(self), 0.0)
    }
}

/// Element `a + b·√D` of the quadratic field `ℚ(√D)`.
///
/// For negative `D` the embedding into `ℂ` uses `√D = i·√|D|`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadExt<const D: i64> {
    pub a: BigRational,
    pub b: BigRational,
}

impl<const D: i64> QuadExt<D> {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadExt { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadExt {
            a,
            b: Zero::zero(),
        }
    }

    pub fn from_pair(a: (i64, i64), b: (i64, i64)) -> Self {
        QuadExt {
            a: BigRational::new(a.0.into(), a.1.into()),
            b: BigRational::new(b.0.into(), b.1.into()),
        }
    }

    /// Field norm `a² − D b²` (nonzero for nonzero elements when `D` is
    /// not a square).
    fn norm(&self) -> BigRational {
        &self.a * &self.a - rat_int(D) * &self.b * &self.b
    }
}

impl<const D: i64> Coeff for QuadExt<D> {
    fn zero() -> Self {
        QuadExt::rational(Zero::zero())
    }
    fn one() -> Self {
        QuadExt::rational(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn add(&self, other: &Self) -> Self {
        QuadExt::new(&self.a + &other.a, &self.b + &other.b)
    }
    fn sub(&self, other: &Self) -> Self {
        QuadExt::new(&self.a - &other.a, &self.b - &other.b)
    }
    fn mul(&self, other: &Self) -> Self {
        // (a + b√D)(c + e√D) = ac + D·be + (ae + bc)√D.
        let ac = &self.a * &other.a;
        let be = &self.b * &other.b;
        let ae = &self.a * &other.b;
        let bc = &self.b * &other.a;
        QuadExt::new(ac + rat_int(D) * be, ae + bc)
    }
    fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!Zero::is_zero(&n), "inverse of zero");
        QuadExt::new(&self.a / &n, -&self.b / &n)
    }
    fn neg(&self) -> Self {
        QuadExt::new(-&self.a, -&self.b)
    }
    fn from_i64(n: i64) -> Self {
        QuadExt::rational(rat_int(n))
    }
    fn to_complex(&self) -> Complex64 {
        let a = to_f64(&self.a);
        let b = to_f64(&self.b);
        if D >= 0 {
            Complex64::new(a + b * (D as f64).sqrt(), 0.0)
        } else {
            Complex64::new(a, b * ((-D) as f64).sqrt())
        }
    }
}

/// Gaussian rationals `ℚ(i)`.
pub type GaussRational = QuadExt<-1>;

/// Dense univariate polynomial with ascending coefficients and no
/// trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<F: Coeff> {
    coeffs: Vec<F>,
}

impl<F: Coeff> UniPoly<F> {
    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().map(F::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    /// `c · x^k`.
    pub fn monomial(c: F, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&n| F::from_i64(n)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeff(k).add(&other.coeff(k)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeff(k).sub(&other.coeff(k)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        UniPoly {
            coeffs: self.coeffs.iter().map(F::neg).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.mul(&F::from_i64(k as i64)))
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Substitutes `x ↦ x^s` (coefficient interleaving).
    pub fn compose_power(&self, s: usize) -> Self {
        assert!(s >= 1);
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); (self.coeffs.len() - 1) * s + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * s] = c.clone();
        }
        Self::from_coeffs(coeffs)
    }

    /// Leading coefficient scaled to one; zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lead) => self.scale(&lead.inv()),
        }
    }

    /// Euclidean division; panics on zero divisor.
    pub fn divrem(&self, divisor: &Self) -> (Self, Self) {
        let d_deg = divisor.degree().expect("division by zero polynomial");
        let d_lead_inv = divisor.leading().unwrap().inv();
        let mut rem = self.clone();
        let mut quot = vec![F::zero(); self.coeffs.len().saturating_sub(d_deg)];
        while let Some(r_deg) = rem.degree() {
            if r_deg < d_deg {
                break;
            }
            let factor = rem.leading().unwrap().mul(&d_lead_inv);
            let shift = r_deg - d_deg;
            quot[shift] = factor.clone();
            let sub = divisor.mul(&Self::monomial(factor, shift));
            rem = rem.sub(&sub);
        }
        (Self::from_coeffs(quot), rem)
    }

    /// Monic greatest common divisor via the Euclidean algorithm.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p′)`: same distinct roots, all simple.
    pub fn squarefree_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let g = self.gcd(&self.derivative());
        let (q, r) = self.divrem(&g);
        debug_assert!(r.is_zero());
        q.monic()
    }

    /// Number of distinct complex roots, computed exactly.
    pub fn distinct_root_count(&self) -> usize {
        self.squarefree_part().degree().unwrap_or(0)
    }

    /// True when all roots are simple.
    pub fn is_squarefree(&self) -> bool {
        match self.degree() {
            None | Some(0) => true,
            Some(d) => self.distinct_root_count() == d,
        }
    }

    pub fn to_complex_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(F::to_complex).collect()
    }
}

/// Result of the numeric root count of a square-free polynomial.
#[derive(Debug, Clone)]
pub struct NumericRoots {
    pub roots: Vec<Complex64>,
    /// True when the Newton inclusion disks around the approximations are
    /// pairwise disjoint, which certifies one simple root per disk.
    pub certified: bool,
}

/// Durand–Kerner (Weierstrass) iteration for all roots at once.
///
/// `coeffs` are ascending; the polynomial must have nonzero leading
/// coefficient and degree ≥ 1.
pub fn durand_kerner(coeffs: &[Complex64]) -> Result<NumericRoots> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 || coeffs.last().map(|c| c.norm() == 0.0).unwrap_or(true) {
        return Err(Error::Numeric(
            "root finder needs degree ≥ 1 with nonzero leading coefficient".into(),
        ));
    }
    let lead = *coeffs.last().unwrap();
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };

    // Cauchy-style radius bound and staggered initial angles.
    let radius = 1.0
        + monic
            .iter()
            .take(n)
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32 + 1) * radius)
        .collect();

    let mut converged = false;
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // Collided iterates: nudge and continue.
                z[k] += Complex64::new(1e-8, 1e-8);
                max_step = f64::INFINITY;
                continue;
            }
            let step = eval(z[k]) / denom;
            z[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 * radius.max(1.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence(
            "Durand-Kerner iteration did not settle".into(),
        ));
    }

    // Newton inclusion disks: |z − root| ≤ n |p(z)/p′(z)|.
    let dcoeffs: Vec<Complex64> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let deval = |zv: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in dcoeffs.iter().rev() {
            acc = acc * zv + c;
        }
        acc
    };
    let radii: Vec<f64> = z
        .iter()
        .map(|&zk| {
            let dp = deval(zk);
            if dp.norm() == 0.0 {
                f64::INFINITY
            } else {
                n as f64 * (eval(zk) / dp).norm()
            }
        })
        .collect();
    let mut certified = true;
    for i in 0..n {
        if !radii[i].is_finite() {
            certified = false;
        }
        for j in (i + 1)..n {
            if (z[i] - z[j]).norm() <= radii[i] + radii[j] {
                certified = false;
            }
        }
    }
    Ok(NumericRoots {
        roots: z,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    type Q = BigRational;

    fn qp(coeffs: &[i64]) -> UniPoly<Q> {
        UniPoly::from_i64_coeffs(coeffs)
    }

    #[test]
    fn divrem_and_gcd() {
        // (x−1)(x−2)(x+3) and (x−2)(x+5): gcd x−2.
        let p = qp(&[-1, 1]).mul(&qp(&[-2, 1])).mul(&qp(&[3, 1]));
        let q = qp(&[-2, 1]).mul(&qp(&[5, 1]));
        assert_eq!(p.gcd(&q), qp(&[-2, 1]));
        let (quot, rem) = p.divrem(&qp(&[-2, 1]));
        assert!(rem.is_zero());
        assert_eq!(quot, qp(&[-1, 1]).mul(&qp(&[3, 1])));
    }

    #[test]
    fn squarefree_part_strips_multiplicities() {
        // (x−1)³(x+2)² → (x−1)(x+2).
        let p = qp(&[-1, 1]).pow(3).mul(&qp(&[2, 1]).pow(2));
        assert_eq!(p.squarefree_part(), qp(&[-1, 1]).mul(&qp(&[2, 1])).monic());
        assert_eq!(p.distinct_root_count(), 2);
        assert!(!p.is_squarefree());
        assert!(qp(&[-1, 0, 1]).is_squarefree());
    }

    #[test]
    fn compose_power_interleaves() {
        // p = 1 + 2x + x³, s = 2 → 1 + 2x² + x⁶.
        let p = qp(&[1, 2, 0, 1]);
        let c = p.compose_power(2);
        assert_eq!(c, qp(&[1, 0, 2, 0, 0, 0, 1]));
        assert_eq!(p.compose_power(1), p);
    }

    #[test]
    fn quad_ext_field_ops() {
        type E = QuadExt<-3>;
        // (1 + √-3)(1 − √-3) = 1 + 3 = 4.
        let x = E::new(rat(1, 1), rat(1, 1));
        let y = E::new(rat(1, 1), rat(-1, 1));
        assert_eq!(x.mul(&y), E::rational(rat(4, 1)));
        // x · x⁻¹ = 1.
        assert_eq!(x.mul(&x.inv()), E::one());
        // Embedding: 1 + √-3 ↦ 1 + i√3.
        let z = x.to_complex();
        assert!((z.re - 1.0).abs() < 1e-15);
        assert!((z.im - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn durand_kerner_finds_simple_roots() {
        // x⁴ − 1: roots ±1, ±i.
        let p: UniPoly<Q> = qp(&[-1, 0, 0, 0, 1]);
        let out = durand_kerner(&p.to_complex_coeffs()).unwrap();
        assert_eq!(out.roots.len(), 4);
        assert!(out.certified);
        for r in &out.roots {
            assert!((r.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn durand_kerner_flags_multiple_roots() {
        // (x−1)²: inclusion disks around the double root overlap.
        let p: UniPoly<Q> = qp(&[1, -2, 1]);
        if let Ok(out) = durand_kerner(&p.to_complex_coeffs()) {
            assert!(!out.certified);
        }
    }
}
