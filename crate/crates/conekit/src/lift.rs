//! Circle-bundle lifts of spherical cone metrics: the connection
//! 1-form on the Hopf bundle, the induced metric on the three-sphere,
//! and pullbacks through Seifert branched covers.
//!
//! For a curvature-4 base metric `e^{2φ}|dξ|²` with regular part `u`
//! and cone number `c`, the connection is represented in each
//! trivialization by the chart-local form
//!
//! ```text
//! γ = (1/2c)(u_y dx − u_x dy),
//! ```
//!
//! which is `α₀` in the `ξ`-chart and `β₀ = α₀ + d(arg η)` in the
//! `η`-chart (the winding term is produced by the `−2c·log|η|` part of
//! the regular-part transition).  Its exterior derivative is the global
//! curvature form `(1/2c)·K dV`; loop integrals of `γ` around the
//! punctures of its own chart vanish in the small-radius limit, which
//! is the gauge condition that pins the trivializations down.
//!
//! The lifted metric on the `(ξ, e^{it})` trivialization of `S³` is
//! `ḡ = e^{2φ}|dξ|² + c²(dt + α₀)²`: a Riemannian submersion onto the
//! base with geodesic fibers of length `2πc` and total volume `2π²c²`.
//! The Seifert cover `Ψ_{(p,q)}` multiplies the fiber scale by `pq`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_rational::BigRational;

use crate::rational::rat;
use crate::spherical::liouville::adaptive_simpson;
use crate::spherical::{chart_weight, Chart, SphericalMetric};
use crate::{fd, Error, Result};

/// Connection 1-form of the circle bundle over a curvature-4 base.
#[derive(Debug, Clone)]
pub struct ConnectionForm {
    base: SphericalMetric,
    cone: f64,
}

/// Builds the connection for a curvature-4 base metric.
pub fn build_connection(metric: &SphericalMetric) -> Result<ConnectionForm> {
    if (metric.kappa() - 4.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "connection form requires base curvature 4, got {}",
            metric.kappa()
        )));
    }
    let cone = metric.cone_number();
    if !(cone > 0.0 && cone.is_finite()) {
        return Err(Error::Inadmissible(format!(
            "cone number must be positive, got {cone}"
        )));
    }
    Ok(ConnectionForm {
        base: metric.clone(),
        cone,
    })
}

impl ConnectionForm {
    pub fn base(&self) -> &SphericalMetric {
        &self.base
    }

    pub fn cone_number(&self) -> f64 {
        self.cone
    }

    /// Components `(P, Q)` with `γ = P dx + Q dy` of the connection
    /// form in the given trivialization (`α₀` on the `ξ`-chart, `β₀`
    /// on the `η`-chart).
    pub fn components(&self, chart: Chart, p: Complex64) -> (f64, f64) {
        let (ux, uy) = self.base.regular_part_grad(chart, p);
        (uy / (2.0 * self.cone), -ux / (2.0 * self.cone))
    }

    /// `∮ γ` over the counterclockwise circle of given center and
    /// radius, by the periodic trapezoid rule with `n` nodes.
    pub fn circle_integral(&self, chart: Chart, center: Complex64, radius: f64, n: usize) -> f64 {
        self.circle_integral_gauged(chart, center, radius, n, None)
    }

    /// Same loop integral with an optional gauge term `dψ` added to the
    /// form; for any smooth `ψ` the result must not change.
    pub fn circle_integral_gauged(
        &self,
        chart: Chart,
        center: Complex64,
        radius: f64,
        n: usize,
        bump: Option<&GaugeBump>,
    ) -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            let theta = TAU * k as f64 / n as f64;
            let p = center + Complex64::from_polar(radius, theta);
            let (mut gx, mut gy) = self.components(chart, p);
            if let Some(b) = bump {
                let (bx, by) = b.gradient(p);
                gx += bx;
                gy += by;
            }
            let (dx, dy) = (-radius * theta.sin(), radius * theta.cos());
            acc += gx * dx + gy * dy;
        }
        acc * TAU / n as f64
    }

    /// `(radius, |∮γ|)` rows for a decreasing sequence of loop radii
    /// around a puncture of the given chart.
    pub fn holonomy_table(
        &self,
        chart: Chart,
        center: Complex64,
        radii: &[f64],
        n: usize,
    ) -> Vec<(f64, f64)> {
        radii
            .iter()
            .map(|&r| (r, self.circle_integral(chart, center, r, n).abs()))
            .collect()
    }

    /// The standard verification radii `10^{−1} .. 10^{−4}`.
    pub fn standard_radii() -> [f64; 4] {
        [1e-1, 1e-2, 1e-3, 1e-4]
    }

    /// Curvature density `dγ = (curl γ) dx∧dy` by a fourth-order
    /// finite-difference curl of the component evaluators.
    pub fn curvature_density(&self, chart: Chart, p: Complex64, step: f64) -> f64 {
        fd::curl(
            |x, y| self.components(chart, Complex64::new(x, y)).0,
            |x, y| self.components(chart, Complex64::new(x, y)).1,
            p.re,
            p.im,
            step,
        )
    }

    /// Pointwise residual of the curvature identity
    /// `dγ = (1/2c)·K·e^{2φ} dx∧dy`.
    pub fn curvature_identity_residual(&self, chart: Chart, p: Complex64, step: f64) -> f64 {
        let lhs = self.curvature_density(chart, p, step);
        let k = self.base.curvature(chart, p, step);
        let rhs = k * (2.0 * self.base.log_conformal(chart, p)).exp() / (2.0 * self.cone);
        lhs - rhs
    }

    /// Total normalized curvature `(1/2π)∫ dγ` over the sphere; for an
    /// admissible base this must equal 1.
    ///
    /// Quadrature: the two charts are combined with the same smooth
    /// partition of unity as the area integral.  Cells away from the
    /// punctures contribute `curl γ · h²` with the curl taken by finite
    /// differences from the form evaluator; cells within `6h` of a
    /// puncture contribute the exact cell mass `∮_{∂cell} γ` (Stokes —
    /// valid across a puncture because the loop integrals of `γ` vanish
    /// in the small-radius limit).  Cell nodes sit on the lattice
    /// `(1/160)·ℤ` when `cells` is a multiple of 32, so punctures at
    /// lattice points land at cell centers, never on cell edges.
    pub fn total_curvature(&self, cells: usize) -> f64 {
        let lim = 1.6;
        let h = 2.0 * lim / cells as f64;
        let fd_step = (h / 8.0).min(1e-3);
        let near = 6.0 * h;
        let mut acc = 0.0;
        for &chart in &[Chart::Xi, Chart::Eta] {
            let punctures = self.base.punctures(chart);
            for j in 0..=cells {
                for i in 0..=cells {
                    let p = Complex64::new(-lim + i as f64 * h, -lim + j as f64 * h);
                    let w = chart_weight(chart, p.norm());
                    if w == 0.0 {
                        continue;
                    }
                    let dmin = punctures
                        .iter()
                        .map(|(a, _)| (p - a).norm())
                        .fold(f64::INFINITY, f64::min);
                    let mass = if dmin > near {
                        self.curvature_density(chart, p, fd_step) * h * h
                    } else {
                        self.cell_boundary_integral(chart, p, h)
                    };
                    acc += w * mass;
                }
            }
        }
        acc / TAU
    }

    /// Exact curvature mass of one cell: `∮ γ` counterclockwise around
    /// the square of side `h` centered at `p`.
    fn cell_boundary_integral(&self, chart: Chart, p: Complex64, h: f64) -> f64 {
        let (x0, x1) = (p.re - h / 2.0, p.re + h / 2.0);
        let (y0, y1) = (p.im - h / 2.0, p.im + h / 2.0);
        let tol = 1e-11;
        let bottom = adaptive_simpson(
            &|x| self.components(chart, Complex64::new(x, y0)).0,
            x0,
            x1,
            tol,
        );
        let top = adaptive_simpson(
            &|x| self.components(chart, Complex64::new(x, y1)).0,
            x0,
            x1,
            tol,
        );
        let right = adaptive_simpson(
            &|y| self.components(chart, Complex64::new(x1, y)).1,
            y0,
            y1,
            tol,
        );
        let left = adaptive_simpson(
            &|y| self.components(chart, Complex64::new(x0, y)).1,
            y0,
            y1,
            tol,
        );
        bottom + right - top - left
    }
}

/// Compactly supported smooth function used to test gauge invariance
/// of loop integrals: `ψ = A·exp(−1/(1 − |p−c|²/R²))` inside the disk
/// of radius `R`, identically zero outside.
#[derive(Debug, Clone, Copy)]
pub struct GaugeBump {
    pub center: Complex64,
    pub radius: f64,
    pub amplitude: f64,
}

impl GaugeBump {
    pub fn value(&self, p: Complex64) -> f64 {
        let s2 = (p - self.center).norm_sqr() / (self.radius * self.radius);
        if s2 >= 1.0 {
            0.0
        } else {
            self.amplitude * (-1.0 / (1.0 - s2)).exp()
        }
    }

    /// Analytic gradient `∇ψ`.
    pub fn gradient(&self, p: Complex64) -> (f64, f64) {
        let r2 = self.radius * self.radius;
        let d = p - self.center;
        let s2 = d.norm_sqr() / r2;
        if s2 >= 1.0 {
            return (0.0, 0.0);
        }
        let psi = self.amplitude * (-1.0 / (1.0 - s2)).exp();
        let factor = -psi * 2.0 / (r2 * (1.0 - s2) * (1.0 - s2));
        (factor * d.re, factor * d.im)
    }
}

/// A cone-singular metric on the three-sphere presented as (base
/// metric, connection, fiber scale), either the Hopf lift itself or
/// its pullback under a Seifert branched cover.
#[derive(Debug, Clone)]
pub struct LinkMetric {
    connection: ConnectionForm,
    /// Cone number of the base.
    cone: f64,
    /// `Some((p, q))` after a Seifert pullback, `None` for the Hopf lift.
    cover: Option<(u32, u32)>,
    /// Cone angles along the two axis circles after a Seifert pullback.
    axis_angles: Option<(f64, f64)>,
}

/// Lifts the base metric of a connection to the three-sphere.
pub fn hopf_lift(connection: &ConnectionForm) -> LinkMetric {
    LinkMetric {
        cone: connection.cone_number(),
        connection: connection.clone(),
        cover: None,
        axis_angles: None,
    }
}

/// Pulls a Hopf-lifted link metric back through the degree-`pq`
/// Seifert cover `Ψ_{(p,q)}`.  Requires `1 ≤ p < q` co-prime and base
/// angles at the poles at most `1/q` (at `0`) and `1/p` (at `∞`), so
/// that the axis cone angles `q·β₀` and `p·β_∞` stay in `(0, 1]`.
pub fn seifert_pullback(link: &LinkMetric, p: u32, q: u32) -> Result<LinkMetric> {
    if link.cover.is_some() {
        return Err(Error::Unsupported(
            "Seifert pullback starts from the Hopf lift, not from another cover".into(),
        ));
    }
    if p == 0 || p >= q {
        return Err(Error::InvalidConfig(format!(
            "Seifert indices must satisfy 1 ≤ p < q, got ({p}, {q})"
        )));
    }
    if num_integer::gcd(p, q) != 1 {
        return Err(Error::InvalidConfig(format!(
            "Seifert indices must be co-prime, got ({p}, {q})"
        )));
    }
    let base = link.connection.base();
    let angle_at = |chart: Chart| {
        base.punctures(chart)
            .iter()
            .find(|(a, _)| a.norm() < 1e-12)
            .map(|&(_, b)| b)
            .unwrap_or(1.0)
    };
    let beta_zero = angle_at(Chart::Xi);
    let beta_inf = angle_at(Chart::Eta);
    let ax0 = q as f64 * beta_zero;
    let ax1 = p as f64 * beta_inf;
    if ax0 > 1.0 + 1e-12 || ax1 > 1.0 + 1e-12 {
        return Err(Error::Inadmissible(format!(
            "axis cone angles q·β₀ = {ax0} and p·β_∞ = {ax1} must lie in (0, 1]"
        )));
    }
    Ok(LinkMetric {
        connection: link.connection.clone(),
        cone: link.cone,
        cover: Some((p, q)),
        axis_angles: Some((ax0, ax1)),
    })
}

impl LinkMetric {
    pub fn connection(&self) -> &ConnectionForm {
        &self.connection
    }

    pub fn base(&self) -> &SphericalMetric {
        self.connection.base()
    }

    pub fn cover(&self) -> Option<(u32, u32)> {
        self.cover
    }

    pub fn axis_angles(&self) -> Option<(f64, f64)> {
        self.axis_angles
    }

    /// Covering degree `pq` (1 for the Hopf lift itself).
    pub fn covering_degree(&self) -> f64 {
        match self.cover {
            Some((p, q)) => (p * q) as f64,
            None => 1.0,
        }
    }

    /// Fiber scale: `c` for the Hopf lift, `c̃ = pq·c` after a
    /// `(p,q)`-pullback.
    pub fn fiber_scale(&self) -> f64 {
        self.cone * self.covering_degree()
    }

    /// Length `2πc̃` of the regular fibers.
    pub fn expected_fiber_length(&self) -> f64 {
        TAU * self.fiber_scale()
    }

    /// Exact total volume: `2π²c²` for the Hopf lift, multiplied by
    /// the covering degree for a Seifert pullback.
    pub fn expected_volume(&self) -> f64 {
        2.0 * PI * PI * self.cone * self.cone * self.covering_degree()
    }

    /// Volume by quadrature: the fibration has geodesic fibers over a
    /// base of quadrature area `A`, so `Vol = (degree)·2πc·A`.
    pub fn volume(&self, cells: usize) -> f64 {
        self.covering_degree() * TAU * self.cone * self.base().total_area(cells)
    }

    /// Volume of the link divided by the volume `2π²` of the unit
    /// three-sphere; equals `c²·pq`.
    pub fn volume_ratio(&self, cells: usize) -> f64 {
        self.volume(cells) / (2.0 * PI * PI)
    }

    /// The lifted quadratic form at `(p, e^{it})` applied to a tangent
    /// vector with chart component `v` and fiber component `v_t`:
    /// `ḡ = e^{2φ}|v|² + c²(v_t + α₀(v))²`.  Hopf lift only (a Seifert
    /// pullback is evaluated through its covering map instead).
    pub fn quadratic_form(&self, chart: Chart, p: Complex64, v: Complex64, v_t: f64) -> f64 {
        assert!(
            self.cover.is_none(),
            "direct evaluation is defined for the Hopf lift"
        );
        let base = self.base();
        let e2phi = (2.0 * base.log_conformal(chart, p)).exp();
        let (gx, gy) = self.connection.components(chart, p);
        let vert = v_t + gx * v.re + gy * v.im;
        e2phi * v.norm_sqr() + self.cone * self.cone * vert * vert
    }

    /// Determinant of the lifted metric in trivialization coordinates
    /// `(x, y, t)`, assembled from the quadratic form by polarization.
    /// Must equal `c²·e^{4φ}` (which integrates to `Vol = 2πc·Area`).
    pub fn gram_determinant(&self, chart: Chart, p: Complex64) -> f64 {
        let basis = [
            (Complex64::new(1.0, 0.0), 0.0),
            (Complex64::new(0.0, 1.0), 0.0),
            (Complex64::new(0.0, 0.0), 1.0),
        ];
        let mut g = [[0.0f64; 3]; 3];
        let quad: Vec<f64> = basis
            .iter()
            .map(|&(v, vt)| self.quadratic_form(chart, p, v, vt))
            .collect();
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    g[a][b] = quad[a];
                } else {
                    let (va, ta) = basis[a];
                    let (vb, tb) = basis[b];
                    let s = self.quadratic_form(chart, p, va + vb, ta + tb);
                    g[a][b] = (s - quad[a] - quad[b]) / 2.0;
                }
            }
        }
        g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
            - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
            + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
    }

    /// Defect of the Riemannian-submersion property at one point: the
    /// lifted length of the horizontal lift of `v` (fiber component
    /// chosen so the connection annihilates it) minus the base length.
    pub fn submersion_defect(&self, chart: Chart, p: Complex64, v: Complex64) -> f64 {
        let (gx, gy) = self.connection.components(chart, p);
        let v_t = -(gx * v.re + gy * v.im);
        let lifted = self.quadratic_form(chart, p, v, v_t);
        let base = (2.0 * self.base().log_conformal(chart, p)).exp() * v.norm_sqr();
        lifted - base
    }

    /// Length of the fiber circle over `p`, by quadrature through the
    /// metric evaluator (the integrand is the constant `c`).
    pub fn fiber_length_at(&self, chart: Chart, p: Complex64, n: usize) -> f64 {
        assert!(self.cover.is_none());
        let mut acc = 0.0;
        for _k in 0..n {
            acc += self
                .quadratic_form(chart, p, Complex64::new(0.0, 0.0), 1.0)
                .sqrt();
        }
        acc * TAU / n as f64
    }
}

/// Admissible third-angle window `(1 − 1/p − 1/q, 1 − 1/p + 1/q)` for
/// a base with angles `(1/q, 1/p, β)`.
pub fn seifert_base_window(p: u32, q: u32) -> (BigRational, BigRational) {
    let one = rat(1, 1);
    let ip = rat(1, i64::from(p));
    let iq = rat(1, i64::from(q));
    (&one - &ip - &iq, &one - &ip + &iq)
}

/// Checks that `beta` lies inside the admissibility window of
/// [`seifert_base_window`].
pub fn seifert_base_admissible(p: u32, q: u32, beta: &BigRational) -> bool {
    let (lo, hi) = seifert_base_window(p, q);
    *beta > lo && *beta < hi
}

// ---------------------------------------------------------------------------
// The Seifert covering map on the three-sphere.

/// `Ψ_{(p,q)}(z₁, z₂) = (z₁^q, z₂^p)/√(|z₁|^{2q} + |z₂|^{2p})`.
pub fn seifert_map_s3(z1: Complex64, z2: Complex64, p: u32, q: u32) -> (Complex64, Complex64) {
    let a = z1.powu(q);
    let b = z2.powu(p);
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / norm, b / norm)
}

/// Trivialization coordinates `(ξ, t) = (z₁/z₂, arg z₂)` of a point of
/// `S³` with `z₂ ≠ 0`.
pub fn trivialize(z1: Complex64, z2: Complex64) -> (Complex64, f64) {
    (z1 / z2, z2.arg())
}

/// Inverse of [`trivialize`] onto the unit sphere.
pub fn untrivialize(xi: Complex64, t: f64) -> (Complex64, Complex64) {
    let phase = Complex64::from_polar(1.0, t);
    let scale = (1.0 + xi.norm_sqr()).sqrt();
    (xi * phase / scale, phase / scale)
}

/// The Seifert map expressed in trivialization coordinates:
/// `(ξ, t) ↦ (ξ^q (1+|ξ|²)^{(p−q)/2} e^{i(q−p)t}, p·t)`.
pub fn seifert_map_trivialized(xi: Complex64, t: f64, p: u32, q: u32) -> (Complex64, f64) {
    let xq = xi.powu(q);
    let scale = (1.0 + xi.norm_sqr()).powf((p as f64 - q as f64) / 2.0);
    let phase = Complex64::from_polar(1.0, (q as f64 - p as f64) * t);
    (xq * scale * phase, p as f64 * t)
}

/// Squared speed, in the lifted metric upstairs, of the image under
/// `Ψ_{(p,q)}` of the unit-period orbit of the weighted circle action
/// `s·(z₁,z₂) = (e^{ips}z₁, e^{iqs}z₂)`, computed by finite
/// differences through [`seifert_map_trivialized`].  Equals `c̃²`, so
/// regular fibers of the pullback have length `2πc̃`.
pub fn seifert_fiber_speed_sq(
    link: &LinkMetric,
    p: u32,
    q: u32,
    xi: Complex64,
    t: f64,
    step: f64,
) -> f64 {
    assert!(link.cover.is_none());
    // Orbit s ↦ (ξ e^{i(p−q)s}, t + q s) through (ξ, t) downstairs on
    // the covering copy; push forward by the map and measure upstairs.
    let at = |s: f64| {
        let xis = xi * Complex64::from_polar(1.0, (p as f64 - q as f64) * s);
        seifert_map_trivialized(xis, t + q as f64 * s, p, q)
    };
    let (xi_plus, t_plus) = at(step);
    let (xi_minus, t_minus) = at(-step);
    let (xi0, _t0) = at(0.0);
    let dxi = (xi_plus - xi_minus) / (2.0 * step);
    let dt = (t_plus - t_minus) / (2.0 * step);
    link.quadratic_form(Chart::Xi, xi0, dxi, dt)
}
