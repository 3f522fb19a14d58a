//! Flat Kähler cone metrics on ℂ² built from spherical base metrics,
//! and their pullbacks under weighted branched covers.
//!
//! Writing `ξ = z/w`, a curvature-4 base metric with regular part `u`
//! and cone number `c` determines the potential
//!
//! ```text
//! r²(z, w) = (1/c)·|w|^{2c}·e^{−u_ξ(z/w)}          (|z| ≤ |w|)
//!          = (1/c)·|z|^{2c}·e^{S}·e^{−u_η(w/z)}    (|z| > |w|)
//! ```
//!
//! (`S` is the constant of the chart transition; the two branches agree
//! on `|z| = |w|`).  The metric `g_F = Re Σ ψ_{ab̄} dz_a dz̄_b` with
//! `ψ = r²` is flat away from the lines `l_j = z − a_j w` (and `w`)
//! over the base punctures, has cone angle `2πβ_j` along `l_j`, scales
//! as `λ^{2c}` under `(z,w) ↦ (λz, λw)`, and its volume density obeys
//! the Monge–Ampère identity `det Hessℂ(r²) = Π_j |l_j|^{2β_j−2}`.
//!
//! The weighted substitution `(z, w) ↦ (z^q, w^p)` with the matching
//! `1/(pq)` normalization turns a suitable base into a cone metric
//! that is singular along curves `{z^q = a_j w^p}` and the two axes;
//! the same identities hold with `c̃ = pq·c` and the transformed
//! density.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::config::ConeConfig;
use crate::spherical::liouville::adaptive_simpson;
use crate::spherical::{Chart, SphericalMetric};
use crate::{fd, Error, Result};

/// A linear form on ℂ², either `z − a·w` (monic in `z`) or `w`,
/// carrying the cone angle of the line it cuts out.
#[derive(Debug, Clone, Copy)]
pub struct Line {
    /// `Some(a)` for `z − a·w`; `None` for `w` (the line over `ξ = ∞`).
    pub slope: Option<Complex64>,
    pub angle: f64,
}

impl Line {
    pub fn eval(&self, z: Complex64, w: Complex64) -> Complex64 {
        match self.slope {
            Some(a) => z - a * w,
            None => w,
        }
    }

    /// Euclidean distance from `(z, w)` to the line.
    pub fn distance(&self, z: Complex64, w: Complex64) -> f64 {
        match self.slope {
            Some(a) => (z - a * w).norm() / (1.0 + a.norm_sqr()).sqrt(),
            None => w.norm(),
        }
    }
}

/// The lines cut out by the punctures of a base metric.
pub fn lines_from_base(base: &SphericalMetric) -> Vec<Line> {
    let mut lines: Vec<Line> = base
        .punctures(Chart::Xi)
        .iter()
        .map(|&(a, beta)| Line {
            slope: Some(a),
            angle: beta,
        })
        .collect();
    if let Some(&(_, beta)) = base
        .punctures(Chart::Eta)
        .iter()
        .find(|(b, _)| b.norm() < 1e-12)
    {
        lines.push(Line { slope: None, angle: beta });
    }
    lines
}

/// Flat cone metric on ℂ², represented by its potential `r²`.
#[derive(Debug, Clone)]
pub struct FlatConeMetric {
    base: SphericalMetric,
    lines: Vec<Line>,
    /// `Some((p,q))` after a weighted pullback `(z,w) ↦ (z^q, w^p)`.
    cover: Option<(u32, u32)>,
}

/// Builds the flat cone metric over a curvature-4 base.  The supplied
/// lines must match the base punctures (slope `a_j` for the puncture
/// `a_j`, the form `w` for the puncture at infinity).
pub fn build_flat_cone(base: &SphericalMetric, lines: &[Line]) -> Result<FlatConeMetric> {
    if (base.kappa() - 4.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "flat cone construction requires base curvature 4, got {}",
            base.kappa()
        )));
    }
    let expected = lines_from_base(base);
    if lines.len() != expected.len() {
        return Err(Error::InvalidConfig(format!(
            "{} lines supplied but the base has {} punctures",
            lines.len(),
            expected.len()
        )));
    }
    for want in &expected {
        let found = lines.iter().any(|l| {
            let slopes_match = match (l.slope, want.slope) {
                (Some(a), Some(b)) => (a - b).norm() < 1e-9,
                (None, None) => true,
                _ => false,
            };
            slopes_match && (l.angle - want.angle).abs() < 1e-9
        });
        if !found {
            return Err(Error::InvalidConfig(format!(
                "no supplied line matches the base puncture with slope {:?} and angle {}",
                want.slope, want.angle
            )));
        }
    }
    Ok(FlatConeMetric {
        base: base.clone(),
        lines: expected,
        cover: None,
    })
}

/// Convenience constructor taking the lines straight from the base.
pub fn flat_cone_from_base(base: &SphericalMetric) -> Result<FlatConeMetric> {
    build_flat_cone(base, &lines_from_base(base))
}

/// Pulls a flat cone metric back through `(z, w) ↦ (z^q, w^p)` with
/// the density-preserving `1/(pq)` normalization of the potential.
pub fn seifert_flat_pullback(metric: &FlatConeMetric, p: u32, q: u32) -> Result<FlatConeMetric> {
    if metric.cover.is_some() {
        return Err(Error::Unsupported(
            "weighted pullback starts from an unbranched flat cone metric".into(),
        ));
    }
    if p == 0 || p >= q {
        return Err(Error::InvalidConfig(format!(
            "cover indices must satisfy 1 ≤ p < q, got ({p}, {q})"
        )));
    }
    if num_integer::gcd(p, q) != 1 {
        return Err(Error::InvalidConfig(format!(
            "cover indices must be co-prime, got ({p}, {q})"
        )));
    }
    let ax0 = q as f64 * metric.base_angle_at_zero();
    let ax1 = p as f64 * metric.base_angle_at_infinity();
    if ax0 > 1.0 + 1e-12 || ax1 > 1.0 + 1e-12 {
        return Err(Error::Inadmissible(format!(
            "axis cone angles q·β₀ = {ax0} and p·β_∞ = {ax1} must lie in (0, 1]"
        )));
    }
    Ok(FlatConeMetric {
        base: metric.base.clone(),
        lines: metric.lines.clone(),
        cover: Some((p, q)),
    })
}

impl FlatConeMetric {
    pub fn base(&self) -> &SphericalMetric {
        &self.base
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn cover(&self) -> Option<(u32, u32)> {
        self.cover
    }

    fn base_angle_at_zero(&self) -> f64 {
        self.lines
            .iter()
            .find(|l| matches!(l.slope, Some(a) if a.norm() < 1e-12))
            .map(|l| l.angle)
            .unwrap_or(1.0)
    }

    fn base_angle_at_infinity(&self) -> f64 {
        self.lines
            .iter()
            .find(|l| l.slope.is_none())
            .map(|l| l.angle)
            .unwrap_or(1.0)
    }

    /// Homogeneity exponent: the base cone number `c`, multiplied by
    /// `pq` for a weighted pullback.
    pub fn cone_number(&self) -> f64 {
        let c = self.base.cone_number();
        match self.cover {
            Some((p, q)) => c * (p * q) as f64,
            None => c,
        }
    }

    /// The potential `r²(z, w)`.
    pub fn potential(&self, z: Complex64, w: Complex64) -> f64 {
        match self.cover {
            None => self.potential_direct(z, w),
            Some((p, q)) => {
                self.potential_direct(z.powu(q), w.powu(p)) / ((p * q) as f64)
            }
        }
    }

    fn potential_direct(&self, z: Complex64, w: Complex64) -> f64 {
        let c = self.base.cone_number();
        let (az, aw) = (z.norm(), w.norm());
        if az == 0.0 && aw == 0.0 {
            return 0.0;
        }
        if az <= aw {
            let u = self.base.regular_part(Chart::Xi, z / w);
            aw.powf(2.0 * c) * (-u).exp() / c
        } else {
            let u = self.base.regular_part(Chart::Eta, w / z);
            let s = self.base.transition_constant();
            az.powf(2.0 * c) * (s - u).exp() / c
        }
    }

    /// Scaling map of this metric: `(λz, λw)`, or `(λ^p z, λ^q w)` in
    /// the weighted case.
    pub fn scaling_map(&self, lambda: f64, z: Complex64, w: Complex64) -> (Complex64, Complex64) {
        match self.cover {
            None => (z * lambda, w * lambda),
            Some((p, q)) => (z * lambda.powi(p as i32), w * lambda.powi(q as i32)),
        }
    }

    /// Max relative deviation of `r²∘m_λ` from `λ^{2c}·r²` over the
    /// samples.
    pub fn scaling_check(&self, lambda: f64, samples: &[(Complex64, Complex64)]) -> Result<f64> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "scaling factor must be positive, got {lambda}"
            )));
        }
        let factor = lambda.powf(2.0 * self.cone_number());
        let mut worst: f64 = 0.0;
        for &(z, w) in samples {
            let (sz, sw) = self.scaling_map(lambda, z, w);
            let lhs = self.potential(sz, sw);
            let rhs = factor * self.potential(z, w);
            if rhs != 0.0 {
                worst = worst.max(((lhs - rhs) / rhs).abs());
            }
        }
        Ok(worst)
    }

    /// Euclidean distance from `(z, w)` to the singular locus (the
    /// lines in the unbranched case; the two axes plus the curves
    /// `{z^q = a_j w^p}`, estimated to first order, in the weighted
    /// case).
    pub fn singular_distance(&self, z: Complex64, w: Complex64) -> f64 {
        match self.cover {
            None => self
                .lines
                .iter()
                .map(|l| l.distance(z, w))
                .fold(f64::INFINITY, f64::min),
            Some((p, q)) => {
                let mut d = z.norm().min(w.norm());
                for l in &self.lines {
                    if let Some(a) = l.slope {
                        if a.norm() < 1e-12 {
                            continue; // already counted as the z-axis
                        }
                        let f = z.powu(q) - a * w.powu(p);
                        let gz = q as f64 * z.powu(q - 1).norm();
                        let gw = (p as f64 * w.powu(p - 1).norm()) * a.norm();
                        let grad = (gz * gz + gw * gw).sqrt();
                        if grad > 0.0 {
                            d = d.min(f.norm() / grad);
                        }
                    }
                }
                d
            }
        }
    }

    /// Determinant of the finite-difference complex Hessian of the
    /// potential — the measured volume density.
    pub fn volume_density_fd(&self, z: Complex64, w: Complex64, step: f64) -> Result<f64> {
        let dist = self.singular_distance(z, w).min(z.norm().hypot(w.norm()));
        if dist <= 10.0 * step {
            return Err(Error::InvalidConfig(format!(
                "point within {dist:.3e} of the singular locus; need > 10·step = {:.3e}",
                10.0 * step
            )));
        }
        let h = fd::complex_hessian(|a, b| self.potential(a, b), z, w, step);
        Ok(fd::hermitian_det(&h))
    }

    /// The predicted volume density `Π_j |l_j|^{2β_j−2}` (with the
    /// transformed exponents in the weighted case).
    pub fn predicted_density(&self, z: Complex64, w: Complex64) -> f64 {
        match self.cover {
            None => self
                .lines
                .iter()
                .map(|l| l.eval(z, w).norm().powf(2.0 * l.angle - 2.0))
                .product(),
            Some((p, q)) => {
                let mut density = z
                    .norm()
                    .powf(2.0 * q as f64 * self.base_angle_at_zero() - 2.0)
                    * w.norm()
                        .powf(2.0 * p as f64 * self.base_angle_at_infinity() - 2.0);
                for l in &self.lines {
                    if let Some(a) = l.slope {
                        if a.norm() < 1e-12 {
                            continue;
                        }
                        density *= (z.powu(q) - a * w.powu(p))
                            .norm()
                            .powf(2.0 * l.angle - 2.0);
                    }
                }
                density
            }
        }
    }

    /// Relative volume-identity defect at one point.
    pub fn volume_identity_defect(&self, z: Complex64, w: Complex64, step: f64) -> Result<f64> {
        let measured = self.volume_density_fd(z, w, step)?;
        let predicted = self.predicted_density(z, w);
        Ok((measured - predicted) / predicted)
    }

    /// Mixed-partial closedness residual of the Kähler form, assembled
    /// by finite differences from the metric coefficients:
    /// `|∂_w ψ_{zz̄} − ∂_z ψ_{wz̄}| + |∂_z ψ_{ww̄} − ∂_w ψ_{zw̄}|`.
    pub fn kahler_closedness_fd(&self, z: Complex64, w: Complex64, step: f64) -> f64 {
        let hess = |a: Complex64, b: Complex64| fd::complex_hessian(|x, y| self.potential(x, y), a, b, step);
        let dz = |f: &dyn Fn(Complex64, Complex64) -> Complex64| {
            let s = step;
            let fx = (f(z + s, w) - f(z - s, w)) / (2.0 * s);
            let fy = (f(z + Complex64::i() * s, w) - f(z - Complex64::i() * s, w)) / (2.0 * s);
            (fx - Complex64::i() * fy) / 2.0
        };
        let dw = |f: &dyn Fn(Complex64, Complex64) -> Complex64| {
            let s = step;
            let fx = (f(z, w + s) - f(z, w - s)) / (2.0 * s);
            let fy = (f(z, w + Complex64::i() * s) - f(z, w - Complex64::i() * s)) / (2.0 * s);
            (fx - Complex64::i() * fy) / 2.0
        };
        let g_zz = |a: Complex64, b: Complex64| hess(a, b)[0][0];
        let g_zw = |a: Complex64, b: Complex64| hess(a, b)[0][1];
        let g_wz = |a: Complex64, b: Complex64| hess(a, b)[1][0];
        let g_ww = |a: Complex64, b: Complex64| hess(a, b)[1][1];
        let r1 = dw(&g_zz) - dz(&g_wz);
        let r2 = dz(&g_ww) - dw(&g_zw);
        r1.norm() + r2.norm()
    }

    /// Squared length, in the flat cone metric, of the fiber direction
    /// `V = (ipz, iqw)` divided by the potential; equals `c̃²` (the
    /// restriction of the metric to the link is the lifted metric,
    /// whose fibers have speed `c̃`).
    pub fn fiber_direction_ratio(&self, z: Complex64, w: Complex64, step: f64) -> f64 {
        let (p, q) = self.cover.unwrap_or((1, 1));
        let h = fd::complex_hessian(|a, b| self.potential(a, b), z, w, step);
        let v = [
            Complex64::i() * p as f64 * z,
            Complex64::i() * q as f64 * w,
        ];
        let mut quad = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                quad += h[a][b] * v[a] * v[b].conj();
            }
        }
        quad.re / self.potential(z, w)
    }

    /// Cone structure of the restriction to the complex line through
    /// `(z₀, w₀)` (unbranched metrics): returns the measured total
    /// angle divided by 2π, and the max deviation of the angular
    /// coefficient `ψ_{tt̄}` from constancy on the unit circle of the
    /// line.  The angle is `length(circle)/radius` with the geodesic
    /// radius integrated from the apex.
    pub fn line_cone_angle(&self, z0: Complex64, w0: Complex64, step: f64) -> (f64, f64) {
        assert!(self.cover.is_none(), "line restrictions apply to the unbranched case");
        let h = |t: Complex64| {
            fd::complex_hessian_1d(|s| self.potential(s * z0, s * w0), t, step)
        };
        // Constancy of ψ_{tt̄} on |t| = 1 (the diagonal circle acts by
        // isometries, so the restriction is rotation-invariant).
        let h1 = h(Complex64::new(1.0, 0.0));
        let mut defect: f64 = 0.0;
        for k in 1..12 {
            let t = Complex64::from_polar(1.0, 0.5 * k as f64);
            defect = defect.max((h(t) - h1).abs() / h1);
        }
        // Geodesic radius of the unit circle: ∫₀¹ √h(s) ds, with the
        // |t| → 0 tail handled by the measured local exponent.
        let delta = 1e-3;
        let sqrt_h = |s: f64| h(Complex64::new(s, 0.0)).max(0.0).sqrt();
        let outer = adaptive_simpson(&sqrt_h, delta, 1.0, 1e-10);
        // Near 0, √h ≈ √h(δ)·(s/δ)^{c−1}; its integral over (0, δ] is
        // √h(δ)·δ/c with the exponent measured from two FD samples.
        let c_local = 1.0
            + 0.5 * (h(Complex64::new(2.0 * delta, 0.0)) / h(Complex64::new(delta, 0.0))).ln()
                / 2f64.ln();
        let rho = outer + sqrt_h(delta) * delta / c_local.max(0.05);
        let circumference = std::f64::consts::TAU * h1.max(0.0).sqrt();
        (circumference / rho / std::f64::consts::TAU, defect)
    }
}

/// Exact cone number `c̃ = pq·c` of the weighted pullback of a base
/// configuration with exact rational angles.
pub fn seifert_cone_number_exact(config: &ConeConfig, p: u32, q: u32) -> Result<BigRational> {
    let c = config
        .cone_number()
        .as_exact()
        .cloned()
        .ok_or_else(|| Error::InvalidConfig("base angles must be exact rationals".into()))?;
    Ok(c * BigRational::from(BigInt::from(u64::from(p) * u64::from(q))))
}
