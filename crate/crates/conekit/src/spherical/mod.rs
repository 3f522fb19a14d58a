//! Constant-curvature metrics on the sphere with prescribed cone
//! angles: closed forms, grid solutions, and the geometric quantities
//! (curvature, area, chart consistency) used to verify them.
//!
//! A metric is described on the two standard charts `ξ` and `η = 1/ξ`
//! as `e^{2φ}|dξ|²` with `φ = u + Σ_j (β_j − 1) log|ξ − a_j|`; the
//! regular part `u` is what the representations below actually store.
//! Away from the punctures the singular summands are harmonic, so the
//! Gaussian curvature reduces to `K = −e^{−2φ} Δu`.

pub mod grid;
pub mod liouville;
pub mod poisson;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::ConeConfig;
use crate::{Error, Result};
use grid::Spline2d;
pub use liouville::{GridSolution, SolveMethod, SolverOptions};

/// Which of the two coordinate charts a point lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Xi,
    Eta,
}

#[derive(Debug, Clone)]
enum Repr {
    /// Two equal angles `β` at `0` and `∞`:
    /// `e^{2φ} = (4β²/κ)·|ξ|^{2β−2}/(1 + |ξ|^{2β})²`.
    Rugby { beta: f64, kappa: f64 },
    /// Three right cone angles (`β = 1/2`) at `0`, `1`, `∞` with `κ = 4`:
    /// `e^{2φ} = [8 |ξ| |ξ−1| (1 + |ξ| + |ξ−1|)]^{−1}`, a form symmetric
    /// under the chart swap `ξ ↦ 1/ξ`.
    G222,
    /// Output of the Liouville solver with C² chart interpolants.
    Grid {
        solution: GridSolution,
        spline_xi: Spline2d,
        spline_eta: Spline2d,
    },
}

/// A spherical metric with cone points, queryable on both charts.
#[derive(Debug, Clone)]
pub struct SphericalMetric {
    repr: Repr,
}

impl SphericalMetric {
    /// The two-point metric with equal angles `β` at `0` and `∞`.
    pub fn rugby(beta: f64, kappa: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "rugby angle must be positive, got {beta}"
            )));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "curvature must be positive, got {kappa}"
            )));
        }
        Ok(SphericalMetric {
            repr: Repr::Rugby { beta, kappa },
        })
    }

    /// The closed-form metric with angles `(1/2, 1/2, 1/2)` at
    /// `(0, 1, ∞)` and curvature 4.
    pub fn g222() -> Self {
        SphericalMetric { repr: Repr::G222 }
    }

    /// Wraps a solver output (builds the chart interpolants once).
    pub fn from_solution(solution: GridSolution) -> Self {
        let spline_xi = solution.xi.spline();
        let spline_eta = solution.eta.spline();
        SphericalMetric {
            repr: Repr::Grid {
                solution,
                spline_xi,
                spline_eta,
            },
        }
    }

    /// Solves the curvature equation for `config` and wraps the result.
    pub fn solve(config: &ConeConfig, kappa: f64, opts: &SolverOptions) -> Result<Self> {
        Ok(Self::from_solution(liouville::solve(config, kappa, opts)?))
    }

    /// The underlying grid solution, if this metric came from the solver.
    pub fn solution(&self) -> Option<&GridSolution> {
        match &self.repr {
            Repr::Grid { solution, .. } => Some(solution),
            _ => None,
        }
    }

    pub fn kappa(&self) -> f64 {
        match &self.repr {
            Repr::Rugby { kappa, .. } => *kappa,
            Repr::G222 => 4.0,
            Repr::Grid { solution, .. } => solution.kappa,
        }
    }

    /// Cone number `c = 1 − d/2 + Σβ_j/2`.
    pub fn cone_number(&self) -> f64 {
        match &self.repr {
            Repr::Rugby { beta, .. } => *beta,
            Repr::G222 => 0.25,
            Repr::Grid { solution, .. } => solution.cone_number,
        }
    }

    /// Constant `S` of the chart transition
    /// `u_η(η) = u_ξ(1/η) − 2c·log|η| + S`.
    pub fn transition_constant(&self) -> f64 {
        match &self.repr {
            Repr::Rugby { .. } => 0.0,
            Repr::G222 => 0.0,
            Repr::Grid { solution, .. } => solution.transition_constant,
        }
    }

    /// `(position, angle)` pairs of the punctures visible in a chart.
    pub fn punctures(&self, chart: Chart) -> Vec<(Complex64, f64)> {
        let origin = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match (&self.repr, chart) {
            (Repr::Rugby { beta, .. }, _) => vec![(origin, *beta)],
            (Repr::G222, _) => vec![(origin, 0.5), (one, 0.5)],
            (Repr::Grid { solution, .. }, Chart::Xi) => solution.xi.punctures.clone(),
            (Repr::Grid { solution, .. }, Chart::Eta) => solution.eta.punctures.clone(),
        }
    }

    /// Regular part `u` of the conformal factor in a chart.
    pub fn regular_part(&self, chart: Chart, p: Complex64) -> f64 {
        match (&self.repr, chart) {
            (Repr::Rugby { beta, kappa }, _) => {
                (2.0 * beta / kappa.sqrt()).ln() - p.norm().powf(2.0 * beta).ln_1p()
            }
            (Repr::G222, _) => {
                let one = Complex64::new(1.0, 0.0);
                -0.5 * (8.0 * (1.0 + p.norm() + (p - one).norm())).ln()
            }
            (Repr::Grid { spline_xi, .. }, Chart::Xi) => spline_xi.eval(p.re, p.im),
            (Repr::Grid { spline_eta, .. }, Chart::Eta) => spline_eta.eval(p.re, p.im),
        }
    }

    /// Gradient `(∂u/∂x, ∂u/∂y)` of the regular part (closed forms
    /// differentiated analytically, grids through the spline).
    pub fn regular_part_grad(&self, chart: Chart, p: Complex64) -> (f64, f64) {
        match (&self.repr, chart) {
            (Repr::Rugby { beta, .. }, _) => {
                let r = p.norm();
                let factor = -2.0 * beta * r.powf(2.0 * beta - 2.0)
                    / (1.0 + r.powf(2.0 * beta));
                (factor * p.re, factor * p.im)
            }
            (Repr::G222, _) => {
                let one = Complex64::new(1.0, 0.0);
                let r = p.norm();
                let r1 = (p - one).norm();
                let denom = -0.5 / (1.0 + r + r1);
                (
                    denom * (p.re / r + (p.re - 1.0) / r1),
                    denom * (p.im / r + p.im / r1),
                )
            }
            (Repr::Grid { spline_xi, .. }, Chart::Xi) => {
                (spline_xi.eval_dx(p.re, p.im), spline_xi.eval_dy(p.re, p.im))
            }
            (Repr::Grid { spline_eta, .. }, Chart::Eta) => (
                spline_eta.eval_dx(p.re, p.im),
                spline_eta.eval_dy(p.re, p.im),
            ),
        }
    }

    /// Full log-conformal factor `φ = u + Σ (β_j − 1) log|p − a_j|`.
    pub fn log_conformal(&self, chart: Chart, p: Complex64) -> f64 {
        let mut phi = self.regular_part(chart, p);
        for (a, beta) in self.punctures(chart) {
            phi += (beta - 1.0) * (p - a).norm().ln();
        }
        phi
    }

    /// Gaussian curvature `K = −e^{−2φ} Δu` at a point away from the
    /// punctures.  Closed forms use a fourth-order stencil of the given
    /// step on `u`; grid metrics differentiate the spline directly.
    pub fn curvature(&self, chart: Chart, p: Complex64, step: f64) -> f64 {
        let lap = match (&self.repr, chart) {
            (Repr::Grid { spline_xi, .. }, Chart::Xi) => spline_xi.eval_laplacian(p.re, p.im),
            (Repr::Grid { spline_eta, .. }, Chart::Eta) => {
                spline_eta.eval_laplacian(p.re, p.im)
            }
            _ => crate::fd::laplacian(
                |x, y| self.regular_part(chart, Complex64::new(x, y)),
                p.re,
                p.im,
                step,
            ),
        };
        -(-2.0 * self.log_conformal(chart, p)).exp() * lap
    }

    /// Exact area `4πc/κ` demanded by the curvature equation.
    pub fn expected_area(&self) -> f64 {
        4.0 * PI * self.cone_number() / self.kappa()
    }

    /// Total area by two-chart midpoint quadrature with a smooth
    /// partition of unity across the unit circle; cells near a puncture
    /// integrate the singular factor exactly in polar form.
    pub fn total_area(&self, cells: usize) -> f64 {
        let lim = 1.6;
        let h = 2.0 * lim / cells as f64;
        let mut acc = 0.0;
        for &chart in &[Chart::Xi, Chart::Eta] {
            let punctures = self.punctures(chart);
            for j in 0..cells {
                for i in 0..cells {
                    let p = Complex64::new(
                        -lim + (i as f64 + 0.5) * h,
                        -lim + (j as f64 + 0.5) * h,
                    );
                    let w = chart_weight(chart, p.norm());
                    if w == 0.0 {
                        continue;
                    }
                    let rho = cell_averaged_weight(p, h, &punctures);
                    if rho == 0.0 {
                        continue;
                    }
                    let u = self.regular_part(chart, p);
                    acc += w * rho * (2.0 * u).exp() * h * h;
                }
            }
        }
        acc
    }

    /// Relative Gauss–Bonnet defect `κ·Area/(4πc) − 1` of the quadrature
    /// area.
    pub fn gauss_bonnet_defect(&self, cells: usize) -> f64 {
        self.total_area(cells) / self.expected_area() - 1.0
    }

    /// Sup over the given `η`-annulus samples of the transition-formula
    /// mismatch `u_η(η) − u_ξ(1/η) + 2c·log|η| − S`.
    pub fn transition_gap(&self, samples: &[Complex64]) -> f64 {
        let c = self.cone_number();
        let s = self.transition_constant();
        let mut worst: f64 = 0.0;
        for &eta in samples {
            let lhs = self.regular_part(Chart::Eta, eta);
            let rhs = self.regular_part(Chart::Xi, 1.0 / eta) - 2.0 * c * eta.norm().ln() + s;
            worst = worst.max((lhs - rhs).abs());
        }
        worst
    }
}

/// Smooth radial cutoff: 1 on `[0, 1.05]`, 0 on `[1.45, ∞)`, quintic
/// (C²) blend between.  The blend zone stays clear of the closed unit
/// disk so punctures with `|a| ≤ 1` always carry full weight in their
/// own chart, which keeps puncture-cell corrections unweighted.
pub(crate) fn cutoff(r: f64) -> f64 {
    if r <= 1.05 {
        1.0
    } else if r >= 1.45 {
        0.0
    } else {
        let s = (r - 1.05) / 0.4;
        1.0 - s * s * s * (6.0 * s * s - 15.0 * s + 10.0)
    }
}

/// Partition-of-unity weight of a chart at radius `r` from its origin.
pub(crate) fn chart_weight(chart: Chart, r: f64) -> f64 {
    match chart {
        Chart::Xi => cutoff(r),
        Chart::Eta => {
            if r < 1e-12 {
                1.0
            } else {
                1.0 - cutoff(1.0 / r)
            }
        }
    }
}

/// Average of `Π_j |x − a_j|^{2(β_j−1)}` over the cell of side `h`
/// centered at `p`: singular factors of punctures within `3h` are
/// integrated exactly, the rest is evaluated at the center.
fn cell_averaged_weight(p: Complex64, h: f64, punctures: &[(Complex64, f64)]) -> f64 {
    let mut val = 1.0;
    for &(a, beta) in punctures {
        let q = 2.0 * (beta - 1.0);
        if q == 0.0 {
            continue;
        }
        let dist = (p - a).norm();
        if dist > 3.0 * h {
            val *= dist.powf(q);
        } else {
            val *= liouville::integral_abs_pow_over_rect(
                a,
                p.re - h / 2.0,
                p.re + h / 2.0,
                p.im - h / 2.0,
                p.im + h / 2.0,
                q,
            ) / (h * h);
        }
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;

    fn sample_points(seed: u64, n: usize, avoid: &[Complex64]) -> Vec<Complex64> {
        let mut rng = sample::rng(seed);
        sample::points_avoiding(&mut rng, n, 1.4, avoid, 0.15)
    }

    #[test]
    fn rugby_curvature_is_constant() {
        let m = SphericalMetric::rugby(0.7, 4.0).unwrap();
        let avoid = [Complex64::new(0.0, 0.0)];
        for p in sample_points(1, 40, &avoid) {
            for chart in [Chart::Xi, Chart::Eta] {
                let k = m.curvature(chart, p, 1e-3);
                assert!((k - 4.0).abs() < 1e-7, "K = {k} at {p}");
            }
        }
    }

    #[test]
    fn rugby_curvature_for_general_kappa() {
        let m = SphericalMetric::rugby(0.45, 1.0).unwrap();
        let p = Complex64::new(0.8, -0.3);
        let k = m.curvature(Chart::Xi, p, 1e-3);
        assert!((k - 1.0).abs() < 1e-7);
    }

    #[test]
    fn three_right_angle_curvature_is_four() {
        let m = SphericalMetric::g222();
        let avoid = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        for p in sample_points(2, 40, &avoid) {
            for chart in [Chart::Xi, Chart::Eta] {
                let k = m.curvature(chart, p, 1e-3);
                assert!((k - 4.0).abs() < 1e-6, "K = {k} at {p}");
            }
        }
    }

    #[test]
    fn rugby_area_matches_cone_number() {
        let m = SphericalMetric::rugby(0.6, 4.0).unwrap();
        let area = m.total_area(256);
        let expected = m.expected_area(); // 4π·0.6/4
        assert!(
            (area / expected - 1.0).abs() < 5e-4,
            "area {area} vs {expected}"
        );
    }

    #[test]
    fn three_right_angle_area() {
        let m = SphericalMetric::g222();
        let area = m.total_area(256);
        let expected = PI / 4.0;
        assert!(
            (area / expected - 1.0).abs() < 1e-3,
            "area {area} vs {expected}"
        );
    }

    #[test]
    fn closed_forms_satisfy_the_transition_identity() {
        let mut rng = sample::rng(3);
        let samples: Vec<Complex64> = (0..30)
            .map(|_| sample::complex_in_annulus(&mut rng, 0.8, 1.25))
            .collect();
        for m in [
            SphericalMetric::rugby(0.55, 4.0).unwrap(),
            SphericalMetric::g222(),
        ] {
            assert!(m.transition_gap(&samples) < 1e-12);
        }
    }

    #[test]
    fn grid_metric_from_radial_solution_is_consistent() {
        let sol = liouville::solve_radial(0.66, 4.0, &SolverOptions::coarse(129));
        let m = SphericalMetric::from_solution(sol);
        // Curvature through the spline on a mid-radius ring.
        for k in 0..12 {
            let p = Complex64::from_polar(0.9, 0.5 + k as f64 * 0.5);
            let kk = m.curvature(Chart::Xi, p, 1e-3);
            assert!((kk - 4.0).abs() < 5e-3, "K = {kk}");
        }
        // Area against 4πc/κ.
        let defect = m.gauss_bonnet_defect(256);
        assert!(defect.abs() < 1e-3, "defect {defect}");
        // Transition between the (identical, by symmetry) charts.
        let mut rng = sample::rng(4);
        let samples: Vec<Complex64> = (0..20)
            .map(|_| sample::complex_in_annulus(&mut rng, 0.8, 1.25))
            .collect();
        assert!(m.transition_gap(&samples) < 1e-9);
    }

    #[test]
    fn cutoff_is_a_partition_with_its_complement() {
        for k in 0..50 {
            let r: f64 = 0.3 + 0.05 * k as f64;
            let chi = cutoff(r);
            assert!((0.0..=1.0).contains(&chi));
            if r > 0.0 {
                // The η-chart weight at η = 1/r complements χ(r).
                let w = 1.0 - cutoff(1.0 / (1.0 / r));
                assert!((chi + w - 1.0).abs() < 1e-15);
            }
        }
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
    }
}
