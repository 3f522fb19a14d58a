//! Solver for the curvature equation of a constant-curvature metric with
//! prescribed cone angles on the sphere.
//!
//! Writing the metric as `e^{2φ}|dξ|²` and splitting off the singular
//! part, `φ = u + Σ_j (β_j − 1) log|ξ − a_j|`, the regular part `u`
//! satisfies
//!
//! ```text
//! Δu = −κ ρ e^{2u},    ρ(ξ) = Π_j |ξ − a_j|^{2(β_j − 1)},
//! ```
//!
//! on each of the two standard coordinate charts (`ξ` and `η = 1/ξ`),
//! with the chart transition
//!
//! ```text
//! u_η(η) = u_ξ(1/η) − 2c·log|η| + S,
//! S = Σ_{a_j finite, ≠0} (β_j − 1) log|a_j|,
//! ```
//!
//! where `c` is the cone number of the configuration.  The general
//! solver discretizes both charts on `[−R, R]²` with the five-point
//! Laplacian, couples them by alternating (Schwarz) Dirichlet exchanges
//! through the transition formula, solves each chart by a damped Newton
//! iteration whose linear systems go to BiCGStab preconditioned with the
//! fast Poisson solver, and reaches the target angles by continuation
//! from the round sphere along the straight segment in angle space
//! (admissibility is preserved along that segment).  Cell averages of
//! the singular weight `ρ` near punctures are computed by exact polar
//! integration.
//!
//! Two-point configurations `{0, ∞}` take a separate radial fast path:
//! with `s = log|ξ|` and `V(s) = u + βs`, the equation reduces to the
//! autonomous ODE `V″ = −κ e^{2V}` whose first integral
//! `V′² + κe^{2V} = β²` pins the symmetric initial data
//! `V(0) = log(β/√κ)`, `V′(0) = 0`; a Runge–Kutta integration plus
//! Hermite interpolation then reconstructs `u` to far better accuracy
//! than the grid scheme supports at a cone point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{ConeConfig, MarkedPoint, ValidationContext, DEFAULT_ANGLE_TOL};
use crate::spherical::grid::{Grid2d, Spline2d};
use crate::spherical::poisson::{gmres, DstPoisson};
use crate::{Error, Result};

/// Tuning knobs for the two-chart solver.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Nodes per chart side.
    pub n: usize,
    /// Chart half-width `R`; each chart covers `[−R, R]²`.
    pub extent: f64,
    /// Target sup-norm of the interior residual per chart.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Boundary stagnation level treated as full Schwarz convergence.
    pub schwarz_tol: f64,
    /// Boundary stagnation level still accepted after many sweeps.
    pub schwarz_tol_loose: f64,
    pub max_schwarz: usize,
    /// Relative tolerance and iteration cap of the linear solver.
    pub krylov_tol: f64,
    pub max_krylov: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            n: 257,
            extent: 2.0,
            newton_tol: 1e-11,
            max_newton: 40,
            schwarz_tol: 2e-12,
            schwarz_tol_loose: 1e-9,
            max_schwarz: 80,
            krylov_tol: 1e-12,
            max_krylov: 300,
        }
    }
}

impl SolverOptions {
    /// A coarse configuration for quick runs and tests.
    pub fn coarse(n: usize) -> Self {
        SolverOptions {
            n,
            ..SolverOptions::default()
        }
    }
}

/// How a [`GridSolution`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMethod {
    /// Coupled two-chart Newton–Schwarz iteration.
    TwoChart,
    /// Radial ODE integration (two punctures at `0` and `∞`).
    Radial,
}

/// One chart of a solution: the regular part `u` on the grid together
/// with the punctures visible in this chart's coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartSolution {
    /// `(position, angle)` pairs in this chart's coordinate.
    pub punctures: Vec<(Complex64, f64)>,
    pub grid: Grid2d,
    /// Sup-norm of the discrete interior residual `Δ_h u + κρ̄e^{2u}`.
    pub residual: f64,
}

impl ChartSolution {
    /// C² interpolant of the regular part.
    pub fn spline(&self) -> Spline2d {
        Spline2d::new(&self.grid)
    }
}

/// A solved configuration: regular parts on both charts plus the data
/// entering the transition formula.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSolution {
    pub kappa: f64,
    /// Cone number `c`.
    pub cone_number: f64,
    /// Transition constant `S`.
    pub transition_constant: f64,
    pub xi: ChartSolution,
    pub eta: ChartSolution,
    /// Final sup-change of the exchanged boundary values.
    pub boundary_gap: f64,
    /// Total Newton steps across all charts, sweeps and stages.
    pub newton_steps: usize,
    pub method: SolveMethod,
}

/// Puncture lists of the two charts together with `(c, S)`.
///
/// In the `η`-chart a finite puncture `a ≠ 0` appears at `1/a`, the
/// puncture at `∞` appears at `0`, and a puncture at `0` disappears (it
/// sits at the chart's infinity).
pub fn chart_setup(config: &ConeConfig) -> (Vec<(Complex64, f64)>, Vec<(Complex64, f64)>, f64, f64) {
    let mut xi = Vec::new();
    let mut eta = Vec::new();
    let mut s_const = 0.0;
    for (p, angle) in config.points.iter().zip(config.angle_f64s()) {
        match p {
            MarkedPoint::Finite(a) => {
                xi.push((*a, angle));
                if a.norm() > 0.0 {
                    eta.push((1.0 / a, angle));
                    s_const += (angle - 1.0) * a.norm().ln();
                }
            }
            MarkedPoint::Infinity => {
                eta.push((Complex64::new(0.0, 0.0), angle));
            }
        }
    }
    (xi, eta, config.cone_number_f64(), s_const)
}

// ---------------------------------------------------------------------------
// Exact polar integration of |ξ − a|^p over rectangles.

/// Adaptive Simpson quadrature on `[a, b]`.
pub(crate) fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Signed polar integral of `|x − a|^p` over the triangle `(a, p1, p2)`:
/// positive when `(p1, p2)` winds counterclockwise around `a`.
fn triangle_polar_integral(a: Complex64, p1: Complex64, p2: Complex64, p: f64) -> f64 {
    let u = p1 - a;
    let v = p2 - a;
    let cross = u.re * v.im - u.im * v.re;
    let scale = u.norm().max(v.norm());
    if cross.abs() < 1e-15 * scale * scale {
        return 0.0;
    }
    // Angular sweep from the direction of u to the direction of v.
    let dphi = cross.atan2(u.re * v.re + u.im * v.im);
    // Distance from a to the line through p1, p2; `foot` is the
    // perpendicular direction from a onto that line.
    let e = p2 - p1;
    let t = (-(u.re * e.re + u.im * e.im)) / e.norm_sqr();
    let foot = u + t * e;
    let d = foot.norm();
    if d < 1e-15 * scale {
        return 0.0;
    }
    let delta0 = {
        // Angle from the perpendicular to the start direction, in (−π, π).
        let raw = u.arg() - foot.arg();
        let mut r = raw.rem_euclid(std::f64::consts::TAU);
        if r > std::f64::consts::PI {
            r -= std::f64::consts::TAU;
        }
        r
    };
    let q = p + 2.0;
    let integrand = |t: f64| (d / (delta0 + t).cos()).powf(q);
    adaptive_simpson(&integrand, 0.0, dphi, 1e-13 * d.powf(q).max(1e-30)) / q
}

/// `∫∫_rect |x − a|^p dx dy` for any `p > −2` and any `a` (inside, on the
/// boundary, or outside the rectangle), by signed decomposition into the
/// four triangles over the rectangle's edges.
pub fn integral_abs_pow_over_rect(
    a: Complex64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    p: f64,
) -> f64 {
    let corners = [
        Complex64::new(x0, y0),
        Complex64::new(x1, y0),
        Complex64::new(x1, y1),
        Complex64::new(x0, y1),
    ];
    let mut acc = 0.0;
    for k in 0..4 {
        acc += triangle_polar_integral(a, corners[k], corners[(k + 1) % 4], p);
    }
    acc
}

// ---------------------------------------------------------------------------
// Singular weight with cell averaging.

/// Cell-averaged singular weight at every node: the possibly singular
/// factor of a puncture within `3h` of the node is replaced by its exact
/// average over the node-centered `h × h` cell; all other factors are
/// evaluated at the node.
fn rho_bar(n: usize, min: f64, h: f64, punctures: &[(Complex64, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let xi = Complex64::new(min + h * i as f64, min + h * j as f64);
            let mut val = 1.0;
            for &(a, beta) in punctures {
                let p = 2.0 * (beta - 1.0);
                if p == 0.0 {
                    continue;
                }
                let dist = (xi - a).norm();
                if dist > 3.0 * h {
                    val *= dist.powf(p);
                } else {
                    let avg = integral_abs_pow_over_rect(
                        a,
                        xi.re - h / 2.0,
                        xi.re + h / 2.0,
                        xi.im - h / 2.0,
                        xi.im + h / 2.0,
                        p,
                    ) / (h * h);
                    val *= avg;
                }
            }
            out[j * n + i] = val;
        }
    }
    out
}

/// Pointwise singular weight `Π_j |ξ − a_j|^{2(β_j−1)}`.
pub fn rho_at(xi: Complex64, punctures: &[(Complex64, f64)]) -> f64 {
    punctures
        .iter()
        .map(|&(a, beta)| (xi - a).norm().powf(2.0 * (beta - 1.0)))
        .product()
}

// ---------------------------------------------------------------------------
// Discrete operators.

/// Interior residual `Δ_h u + κρ̄e^{2u}` (row-major over the
/// `(n−2)×(n−2)` interior) and its sup-norm.
fn residual_vec(grid: &Grid2d, rho: &[f64], kappa: f64) -> (Vec<f64>, f64) {
    let n = grid.n;
    let h2 = grid.h * grid.h;
    let m = n - 2;
    let mut out = vec![0.0; m * m];
    let mut sup: f64 = 0.0;
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let lap = (grid.values[j * n + i - 1]
                + grid.values[j * n + i + 1]
                + grid.values[(j - 1) * n + i]
                + grid.values[(j + 1) * n + i]
                - 4.0 * grid.values[j * n + i])
                / h2;
            let r = lap + kappa * rho[j * n + i] * (2.0 * grid.values[j * n + i]).exp();
            out[(j - 1) * m + (i - 1)] = r;
            sup = sup.max(r.abs());
        }
    }
    (out, sup)
}

/// Sup-norm of the discrete interior residual of a chart.
pub fn discrete_residual_sup(grid: &Grid2d, punctures: &[(Complex64, f64)], kappa: f64) -> f64 {
    let rho = rho_bar(grid.n, grid.min, grid.h, punctures);
    residual_vec(grid, &rho, kappa).1
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

// ---------------------------------------------------------------------------
// Newton per chart.

/// Overwrites a chart's boundary values through the transition formula
/// `u(t) = u_src(1/t) − 2c·log|t| + s_term`, returning the largest
/// change.
fn set_boundary(grid: &mut Grid2d, src: &Spline2d, c: f64, s_term: f64) -> f64 {
    let n = grid.n;
    let mut max_change: f64 = 0.0;
    let mut update = |grid: &mut Grid2d, i: usize, j: usize| {
        let t = Complex64::new(grid.x(i), grid.x(j));
        let w = 1.0 / t;
        let val = src.eval(w.re, w.im) - 2.0 * c * t.norm().ln() + s_term;
        let old = grid.get(i, j);
        max_change = max_change.max((val - old).abs());
        grid.set(i, j, val);
    };
    for i in 0..n {
        update(grid, i, 0);
        update(grid, i, n - 1);
    }
    for j in 1..n - 1 {
        update(grid, 0, j);
        update(grid, n - 1, j);
    }
    max_change
}

// ---------------------------------------------------------------------------
// Coupled two-chart Newton solve.

struct StageStats {
    residual_xi: f64,
    residual_eta: f64,
    boundary_gap: f64,
    newton_steps: usize,
}

/// Rebuilds both chart boundaries from the opposite chart through the
/// transition formula.  The second pass measures self-consistency: the
/// transition reads the splines far from the boundary rows, so it is
/// zero up to rounding once both boundaries are in place.
fn assemble_boundaries(xi: &mut Grid2d, eta: &mut Grid2d, c: f64, s_const: f64) -> f64 {
    let mut gap = 0.0;
    for _ in 0..2 {
        let sp_eta = Spline2d::new(eta);
        let ch_xi = set_boundary(xi, &sp_eta, c, -s_const);
        let sp_xi = Spline2d::new(xi);
        let ch_eta = set_boundary(eta, &sp_xi, c, s_const);
        gap = ch_xi.max(ch_eta);
    }
    gap
}

/// The two charts are solved as one Newton system in the interior
/// values of both grids; the boundary rows are not unknowns but are
/// eliminated through the transition formula before every residual
/// evaluation.  Alternating single-chart solves are not an option here:
/// the linearized chart problems pass through Dirichlet eigenvalue
/// crossings that the coupled Jacobian, nonsingular at every rigid cone
/// metric along the continuation path, does not see.  The Jacobian is
/// applied matrix-free by finite differencing the full residual map and
/// preconditioned by the per-chart Poisson solve.
#[allow(clippy::too_many_arguments)]
fn solve_stage(
    xi_grid: &mut Grid2d,
    eta_grid: &mut Grid2d,
    xi_p: &[(Complex64, f64)],
    eta_p: &[(Complex64, f64)],
    c: f64,
    s_const: f64,
    kappa: f64,
    poisson: &DstPoisson,
    opts: &SolverOptions,
) -> Result<StageStats> {
    let n = xi_grid.n;
    let m = n - 2;
    let mm = m * m;
    let rho_xi = rho_bar(n, xi_grid.min, xi_grid.h, xi_p);
    let rho_eta = rho_bar(n, eta_grid.min, eta_grid.h, eta_p);

    let pack = |xi: &Grid2d, eta: &Grid2d| -> Vec<f64> {
        let mut x = Vec::with_capacity(2 * mm);
        for grid in [xi, eta] {
            for j in 1..n - 1 {
                x.extend_from_slice(&grid.values[j * n + 1..j * n + n - 1]);
            }
        }
        x
    };
    let unpack = |x: &[f64], xi: &mut Grid2d, eta: &mut Grid2d| {
        let mut k = 0;
        for grid in [&mut *xi, &mut *eta] {
            for j in 1..n - 1 {
                grid.values[j * n + 1..j * n + n - 1].copy_from_slice(&x[k..k + m]);
                k += m;
            }
        }
    };
    // Interior state -> (residual, per-chart sups, boundary gap).
    let eval = |x: &[f64], xi: &mut Grid2d, eta: &mut Grid2d| -> (Vec<f64>, f64, f64, f64) {
        unpack(x, xi, eta);
        let gap = assemble_boundaries(xi, eta, c, s_const);
        let (mut f, sup_xi) = residual_vec(xi, &rho_xi, kappa);
        let (f_eta, sup_eta) = residual_vec(eta, &rho_eta, kappa);
        f.extend_from_slice(&f_eta);
        (f, sup_xi, sup_eta, gap)
    };

    let mut x = pack(xi_grid, eta_grid);
    let mut jvp_xi = xi_grid.clone();
    let mut jvp_eta = eta_grid.clone();
    let mut best_sup = f64::INFINITY;
    let mut stalled = 0usize;
    let mut last_kry = 0usize;
    let mut last_lambda = 0.0f64;
    let mut last_clamped = false;
    for step in 0..=opts.max_newton {
        let (f, sup_xi, sup_eta, gap) = eval(&x, xi_grid, eta_grid);
        let sup = sup_xi.max(sup_eta);
        if !sup.is_finite() {
            return Err(Error::Numeric("coupled residual is not finite".into()));
        }
        if std::env::var_os("CONEKIT_TRACE").is_some() {
            eprintln!(
                "  stage newton {step}: sup {sup:.2e} (kry {last_kry}, lambda {last_lambda:.1e})"
            );
        }
        if sup <= opts.newton_tol {
            return Ok(StageStats {
                residual_xi: sup_xi,
                residual_eta: sup_eta,
                boundary_gap: gap,
                newton_steps: step,
            });
        }
        // A vanishing improvement over several steps means the stage was
        // asked to jump too far; give up so the continuation can shorten
        // the leg.  Steps taken with a capped direction may legitimately
        // hold the residual flat while they cover ground, so they do
        // not count.
        if sup > 0.95 * best_sup && !last_clamped {
            stalled += 1;
            if stalled >= 5 {
                return Err(Error::NonConvergence(format!(
                    "coupled Newton stalled at residual {sup:.2e}"
                )));
            }
        } else if sup <= 0.95 * best_sup {
            stalled = 0;
        }
        best_sup = best_sup.min(sup);
        if step == opts.max_newton {
            break;
        }

        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let mut apply = |v: &[f64]| -> Vec<f64> {
            // One-sided difference quotient of the full residual map,
            // boundary re-assembly included, so the transmission
            // coupling enters the Jacobian exactly like the stencil.
            let v_sup = v.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
            let eps = 3e-6 / v_sup;
            let xp: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + eps * b).collect();
            let (fp, _, _, _) = eval(&xp, &mut jvp_xi, &mut jvp_eta);
            fp.iter().zip(&f).map(|(p, q)| (p - q) / eps).collect()
        };
        let precond = |r: &[f64]| -> Vec<f64> {
            let mut z = r.to_vec();
            let (a, b) = z.split_at_mut(mm);
            poisson.solve(a);
            poisson.solve(b);
            z
        };
        // Inexact Newton: the difference-quotient Jacobian is only good
        // to a few parts in 1e7, so a tighter linear tolerance buys
        // nothing; 1e-6 per step still overshoots the outer target.
        let (mut delta, kry) = gmres(
            &mut apply,
            precond,
            &rhs,
            vec![0.0; 2 * mm],
            opts.krylov_tol.max(1e-6),
            opts.max_krylov,
        )?;
        last_kry = kry;
        if std::env::var_os("CONEKIT_PROBE_EIG").is_some() && step == 6 {
            // Inverse iteration for the smallest-magnitude eigenpair.
            let mut v: Vec<f64> = (0..2 * mm)
                .map(|k| ((k * 2654435761) % 1000) as f64 / 1000.0 - 0.5)
                .collect();
            let nv = norm2(&v);
            v.iter_mut().for_each(|e| *e /= nv);
            for it in 0..8 {
                let (w, _) = gmres(
                    &mut apply,
                    |r: &[f64]| {
                        let mut z = r.to_vec();
                        let (a, b) = z.split_at_mut(mm);
                        poisson.solve(a);
                        poisson.solve(b);
                        z
                    },
                    &v,
                    vec![0.0; 2 * mm],
                    1e-8,
                    400,
                )
                .unwrap_or((v.clone(), 0));
                let nw = norm2(&w);
                v = w.iter().map(|e| e / nw).collect();
                let jv = apply(&v);
                let ray: f64 = v.iter().zip(&jv).map(|(a, b)| a * b).sum();
                let (pos, vmax) = v
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |(pi, pv), (i, e)| {
                        if e.abs() > pv { (i, e.abs()) } else { (pi, pv) }
                    });
                let (chart, rest) = if pos < mm { ("xi", pos) } else { ("eta", pos - mm) };
                let (jj, ii) = (rest / m + 1, rest % m + 1);
                eprintln!(
                    "    eig probe {it}: rayleigh {ray:.4e}, peak {vmax:.3e} at {chart} i={ii} j={jj}"
                );
            }
        }
        // The operator `Δ + 2κρe^{2u}` keeps a few low modes close to
        // zero (remnants of the sphere's conformal symmetry, only
        // weakly pinned by the punctures), and the Newton direction can
        // be huge along them even though the motion is genuine.  The
        // exponential term tolerates only bounded pointwise moves, so
        // cap each entry and let the capped march cover the distance
        // over a few outer steps; once the direction fits the cap this
        // is plain Newton with its quadratic tail.
        const CAP: f64 = 0.5;
        let clamped = delta.iter().any(|d| d.abs() > CAP);
        if clamped {
            for d in &mut delta {
                *d = d.clamp(-CAP, CAP);
            }
        }
        last_clamped = clamped;

        // Damped update: accept the first step length that reduces the
        // residual 2-norm sufficiently.
        let f0 = norm2(&f);
        let mut lambda = 1.0;
        loop {
            let xt: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + lambda * d).collect();
            let (ft, _, _, _) = eval(&xt, &mut jvp_xi, &mut jvp_eta);
            let ft_norm = norm2(&ft);
            if std::env::var_os("CONEKIT_TRACE_GMRES").is_some() {
                let (pos, d_sup) = delta
                    .iter()
                    .enumerate()
                    .fold((0, 0.0f64), |(pi, pv), (i, v)| {
                        if v.abs() > pv { (i, v.abs()) } else { (pi, pv) }
                    });
                let (chart, rest) = if pos < mm { ("xi", pos) } else { ("eta", pos - mm) };
                let (jj, ii) = (rest / m + 1, rest % m + 1);
                eprintln!(
                    "    line search lambda {lambda:.2e}: |F| {ft_norm:.3e} (was {f0:.3e}, |delta| {d_sup:.2e} at {chart} i={ii} j={jj} u={:.2} F={:.2e})",
                    x[pos], f[pos]
                );
            }
            // A capped direction is deliberately truncated, so only ask
            // for plain decrease from it.
            let slope = if clamped { 0.05 } else { 0.25 };
            if ft_norm.is_finite()
                && (ft_norm <= (1.0 - slope * lambda) * f0
                    || (lambda < 1.0 / 1024.0 && ft_norm <= f0))
            {
                x = xt;
                last_lambda = lambda;
                break;
            }
            if lambda < 1.0 / 65536.0 {
                return Err(Error::NonConvergence(
                    "coupled Newton line search found no acceptable step".into(),
                ));
            }
            lambda /= 2.0;
        }
    }
    Err(Error::NonConvergence(format!(
        "coupled Newton did not reach {:.1e} in {} steps",
        opts.newton_tol, opts.max_newton
    )))
}

/// Regular part of the round metric of curvature `κ`:
/// `u = log(2/√κ) − log(1 + |ξ|²)`.
fn round_regular_part(kappa: f64, xi: Complex64) -> f64 {
    (2.0 / kappa.sqrt()).ln() - xi.norm_sqr().ln_1p()
}

fn validate_spacing(punctures: &[(Complex64, f64)], extent: f64, h: f64) -> Result<()> {
    let inside = |a: Complex64| a.re.abs() <= extent && a.im.abs() <= extent;
    for (k, &(a, _)) in punctures.iter().enumerate() {
        for &(b, _) in &punctures[k + 1..] {
            if inside(a) && inside(b) && (a - b).norm() < 8.0 * h {
                return Err(Error::InvalidConfig(format!(
                    "punctures {a} and {b} are closer than 8 grid cells; refine the grid"
                )));
            }
        }
    }
    Ok(())
}

/// Solves the curvature equation for an admissible configuration.
///
/// Configurations with exactly two punctures at `0` and `∞` use the
/// radial integrator; everything else runs the two-chart scheme.
pub fn solve(config: &ConeConfig, kappa: f64, opts: &SolverOptions) -> Result<GridSolution> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "curvature κ must be positive, got {kappa}"
        )));
    }
    config.validate(ValidationContext::Strict, DEFAULT_ANGLE_TOL)?;
    if let Some(beta) = two_point_standard_angle(config) {
        return Ok(solve_radial(beta, kappa, opts));
    }
    solve_two_chart(config, kappa, opts)
}

/// The common angle if the configuration is exactly `{0, ∞}`.
fn two_point_standard_angle(config: &ConeConfig) -> Option<f64> {
    if config.degree() != 2 {
        return None;
    }
    let mut has_zero = false;
    let mut has_inf = false;
    for p in &config.points {
        match p {
            MarkedPoint::Finite(a) if a.norm() == 0.0 => has_zero = true,
            MarkedPoint::Infinity => has_inf = true,
            _ => {}
        }
    }
    (has_zero && has_inf).then(|| config.angle_f64s()[0])
}

/// Runs the full two-chart continuation scheme.
pub fn solve_two_chart(
    config: &ConeConfig,
    kappa: f64,
    opts: &SolverOptions,
) -> Result<GridSolution> {
    let (xi_target, eta_target, _, _) = chart_setup(config);
    let n = opts.n;
    let r = opts.extent;
    let h = 2.0 * r / (n - 1) as f64;
    validate_spacing(&xi_target, r, h)?;
    validate_spacing(&eta_target, r, h)?;
    let poisson = DstPoisson::new(n - 2, h);

    let mut xi_grid = Grid2d::from_fn(n, -r, r, |x, y| {
        round_regular_part(kappa, Complex64::new(x, y))
    });
    let mut eta_grid = xi_grid.clone();

    // Continuation parameter t: angles β(t) = 1 + t(β_target − 1).
    let angles_at = |pts: &[(Complex64, f64)], t: f64| -> Vec<(Complex64, f64)> {
        pts.iter()
            .map(|&(a, beta)| (a, 1.0 + t * (beta - 1.0)))
            .collect()
    };
    let d = config.degree() as f64;
    let sum_target: f64 = config.angle_f64s().iter().sum();
    let cone_number_at = |t: f64| 1.0 - d / 2.0 + (d + t * (sum_target - d)) / 2.0;
    let s_const_at = |t: f64| -> f64 {
        xi_target
            .iter()
            .filter(|(a, _)| a.norm() > 0.0)
            .map(|&(a, beta)| t * (beta - 1.0) * a.norm().ln())
            .sum()
    };

    let mut t = 0.0f64;
    let mut step = 0.34f64;
    let mut total_newton = 0;
    let mut attempts = 0;
    let mut stats: Option<StageStats> = None;
    while t < 1.0 - 1e-12 {
        attempts += 1;
        if attempts > 60 {
            return Err(Error::NonConvergence(
                "continuation exceeded the stage budget".into(),
            ));
        }
        let t_next = (t + step).min(1.0);
        let xi_p = angles_at(&xi_target, t_next);
        let eta_p = angles_at(&eta_target, t_next);

        // The previous stage's state is the predictor: the grids hold
        // the smooth remainder after splitting off every cone factor,
        // and that remainder moves differentiably with the angles.
        let snap_xi = xi_grid.clone();
        let snap_eta = eta_grid.clone();
        match solve_stage(
            &mut xi_grid,
            &mut eta_grid,
            &xi_p,
            &eta_p,
            cone_number_at(t_next),
            s_const_at(t_next),
            kappa,
            &poisson,
            opts,
        ) {
            Ok(s) => {
                total_newton += s.newton_steps;
                stats = Some(s);
                t = t_next;
                step *= 1.6;
            }
            Err(_) if step > 0.005 => {
                xi_grid = snap_xi;
                eta_grid = snap_eta;
                step /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    let stats = stats.expect("at least one continuation stage ran");
    Ok(GridSolution {
        kappa,
        cone_number: cone_number_at(1.0),
        transition_constant: s_const_at(1.0),
        xi: ChartSolution {
            punctures: xi_target,
            grid: xi_grid,
            residual: stats.residual_xi,
        },
        eta: ChartSolution {
            punctures: eta_target,
            grid: eta_grid,
            residual: stats.residual_eta,
        },
        boundary_gap: stats.boundary_gap,
        newton_steps: total_newton,
        method: SolveMethod::TwoChart,
    })
}

// ---------------------------------------------------------------------------
// Radial fast path.

/// Solution of `V″ = −κe^{2V}`, `V(0) = log(β/√κ)`, `V′(0) = 0`, sampled
/// on `[0, s_max]`; `V` is even and approaches slope `−β` at infinity.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub beta: f64,
    pub kappa: f64,
    s_max: f64,
    ds: f64,
    v: Vec<f64>,
    w: Vec<f64>,
}

impl RadialSolution {
    pub fn solve(beta: f64, kappa: f64, s_max: f64, ds: f64) -> Self {
        let steps = (s_max / ds).ceil() as usize;
        let ds = s_max / steps as f64;
        let mut v = Vec::with_capacity(steps + 1);
        let mut w = Vec::with_capacity(steps + 1);
        let mut state = ((beta / kappa.sqrt()).ln(), 0.0f64);
        v.push(state.0);
        w.push(state.1);
        let deriv = |(vv, ww): (f64, f64)| (ww, -kappa * (2.0 * vv).exp());
        for _ in 0..steps {
            let k1 = deriv(state);
            let k2 = deriv((state.0 + 0.5 * ds * k1.0, state.1 + 0.5 * ds * k1.1));
            let k3 = deriv((state.0 + 0.5 * ds * k2.0, state.1 + 0.5 * ds * k2.1));
            let k4 = deriv((state.0 + ds * k3.0, state.1 + ds * k3.1));
            state.0 += ds / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            state.1 += ds / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            v.push(state.0);
            w.push(state.1);
        }
        RadialSolution {
            beta,
            kappa,
            s_max,
            ds,
            v,
            w,
        }
    }

    /// `V(s)` by even reflection, cubic Hermite interpolation between
    /// stored nodes, and linear extension beyond `s_max`.
    pub fn v(&self, s: f64) -> f64 {
        let s = s.abs();
        let last = self.v.len() - 1;
        if s >= self.s_max {
            return self.v[last] + self.w[last] * (s - self.s_max);
        }
        let cell = ((s / self.ds).floor() as usize).min(last - 1);
        let t = s / self.ds - cell as f64;
        let (v0, v1) = (self.v[cell], self.v[cell + 1]);
        let (w0, w1) = (self.w[cell] * self.ds, self.w[cell + 1] * self.ds);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * v0
            + (t3 - 2.0 * t2 + t) * w0
            + (-2.0 * t3 + 3.0 * t2) * v1
            + (t3 - t2) * w1
    }

    /// Regular part `u(ξ) = V(log|ξ|) − β·log|ξ|` (valid in both charts
    /// of the `{0, ∞}` configuration by symmetry).
    pub fn regular_part(&self, xi: Complex64) -> f64 {
        let s = xi.norm().ln().max(-(self.s_max + 40.0));
        self.v(s) - self.beta * s
    }

    /// Defect of the first integral `V′² + κe^{2V} − β²` at `s`; a
    /// conserved quantity of the exact flow, so its size measures the
    /// integration error.
    pub fn energy_defect(&self, s: f64) -> f64 {
        let s = s.abs().min(self.s_max);
        let cell = ((s / self.ds).round() as usize).min(self.v.len() - 1);
        self.w[cell] * self.w[cell] + self.kappa * (2.0 * self.v[cell]).exp()
            - self.beta * self.beta
    }
}

/// Builds a [`GridSolution`] for the `{0, ∞}` two-point configuration by
/// radial integration.
pub fn solve_radial(beta: f64, kappa: f64, opts: &SolverOptions) -> GridSolution {
    let radial = RadialSolution::solve(beta, kappa, 20.0, 1e-3);
    let n = opts.n;
    let r = opts.extent;
    let grid = Grid2d::from_fn(n, -r, r, |x, y| {
        radial.regular_part(Complex64::new(x, y))
    });
    let origin = Complex64::new(0.0, 0.0);
    let xi = ChartSolution {
        punctures: vec![(origin, beta)],
        grid: grid.clone(),
        residual: discrete_residual_sup(&grid, &[(origin, beta)], kappa),
    };
    let eta = ChartSolution {
        punctures: vec![(origin, beta)],
        grid,
        residual: xi.residual,
    };
    GridSolution {
        kappa,
        cone_number: beta,
        transition_constant: 0.0,
        xi,
        eta,
        boundary_gap: 0.0,
        newton_steps: 0,
        method: SolveMethod::Radial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::two_point_config;

    #[test]
    fn rect_integral_reproduces_area() {
        for a in [
            Complex64::new(0.3, 0.4),
            Complex64::new(5.0, -3.0),
            Complex64::new(0.0, 0.0),
        ] {
            let v = integral_abs_pow_over_rect(a, 0.0, 2.0, -1.0, 1.0, 0.0);
            assert!((v - 4.0).abs() < 1e-10, "a = {a}: {v}");
        }
    }

    #[test]
    fn rect_integral_of_square_distance() {
        // ∫∫_{[0,1]²} |x − c|² over the center c: 2·(1/12) = 1/6.
        let v = integral_abs_pow_over_rect(Complex64::new(0.5, 0.5), 0.0, 1.0, 0.0, 1.0, 2.0);
        assert!((v - 1.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn rect_integral_of_inverse_distance() {
        // Corner singularity: ∫∫_{[0,1]²} 1/r = 2·log(1 + √2).
        let v = integral_abs_pow_over_rect(Complex64::new(0.0, 0.0), 0.0, 1.0, 0.0, 1.0, -1.0);
        let exact = 2.0 * (1.0 + 2.0f64.sqrt()).ln();
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
        // Center singularity on a symmetric cell of side h.
        let h = 0.25;
        let v = integral_abs_pow_over_rect(
            Complex64::new(0.0, 0.0),
            -h / 2.0,
            h / 2.0,
            -h / 2.0,
            h / 2.0,
            -1.0,
        );
        let exact = 4.0 * (h / 2.0) * 2.0 * (1.0 + 2.0f64.sqrt()).ln();
        assert!((v - exact).abs() < 1e-9, "{v} vs {exact}");
    }

    #[test]
    fn rect_integral_matches_quadrature_for_outside_point() {
        let a = Complex64::new(1.7, 0.4);
        let p = -1.2;
        let v = integral_abs_pow_over_rect(a, 0.0, 1.0, 0.0, 1.0, p);
        // Plain midpoint reference; the integrand is smooth here.
        let k = 400;
        let mut acc = 0.0;
        for j in 0..k {
            for i in 0..k {
                let x = (i as f64 + 0.5) / k as f64;
                let y = (j as f64 + 0.5) / k as f64;
                acc += (Complex64::new(x, y) - a).norm().powf(p);
            }
        }
        acc /= (k * k) as f64;
        assert!((v - acc).abs() < 1e-6, "{v} vs {acc}");
    }

    #[test]
    fn rho_bar_matches_point_values_away_from_punctures() {
        let punctures = [(Complex64::new(0.0, 0.0), 0.5)];
        let n = 17;
        let rho = rho_bar(n, -2.0, 0.25, &punctures);
        // Node (12, 8) sits at (1.0, 0.0), far from the puncture.
        let idx = 8 * n + 12;
        assert!((rho[idx] - 1.0).abs() < 1e-12);
        // The puncture node holds the exact cell average, which exceeds
        // any nearby point value for a negative exponent.
        let center = 8 * n + 8;
        assert!(rho[center].is_finite() && rho[center] > rho[idx]);
    }

    #[test]
    fn radial_solution_matches_closed_form() {
        // Exact solution: V(s) = log(β/√κ) − log cosh(βs).
        for (beta, kappa) in [(0.75, 4.0), (0.5, 4.0), (0.9, 1.0)] {
            let r = RadialSolution::solve(beta, kappa, 20.0, 1e-3);
            let mut worst: f64 = 0.0;
            for k in 0..200 {
                let s = -5.0 + 10.0 * k as f64 / 199.0;
                let exact = (beta / kappa.sqrt()).ln() - (beta * s).cosh().ln();
                worst = worst.max((r.v(s) - exact).abs());
            }
            assert!(worst < 1e-9, "β={beta}: {worst}");
            assert!(r.energy_defect(3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn radial_regular_part_matches_rugby_form() {
        let (beta, kappa) = (0.7, 4.0);
        let r = RadialSolution::solve(beta, kappa, 20.0, 1e-3);
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let rad = 1e-3 + 2.8 * k as f64 / 99.0;
            let xi = Complex64::from_polar(rad, 0.6);
            let exact = (2.0 * beta / kappa.sqrt()).ln() - rad.powf(2.0 * beta).ln_1p();
            worst = worst.max((r.regular_part(xi) - exact).abs());
        }
        // Including the puncture itself.
        let at0 = r.regular_part(Complex64::new(0.0, 0.0));
        worst = worst.max((at0 - (2.0 * beta / kappa.sqrt()).ln()).abs());
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn newton_solves_the_smooth_round_problem() {
        // No punctures: the coupled stage should recover the round
        // metric (cone number 1, trivial transition constant) from a
        // perturbed start, and the discrete solution should agree with
        // the closed form to O(h²).
        let kappa = 4.0;
        let n = 65;
        let mut xi_grid = Grid2d::from_fn(n, -2.0, 2.0, |x, y| {
            round_regular_part(kappa, Complex64::new(x, y))
        });
        let mut eta_grid = xi_grid.clone();
        // Perturb the interiors so Newton has work to do.
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                xi_grid.values[j * n + i] += 0.3 * ((i * 7 + j * 13) % 5) as f64 / 5.0;
                eta_grid.values[j * n + i] += 0.3 * ((i * 11 + j * 3) % 5) as f64 / 5.0;
            }
        }
        let poisson = DstPoisson::new(n - 2, xi_grid.h);
        let opts = SolverOptions::coarse(n);
        let stats =
            solve_stage(&mut xi_grid, &mut eta_grid, &[], &[], 1.0, 0.0, kappa, &poisson, &opts)
                .unwrap();
        assert!(stats.residual_xi <= 1e-11);
        assert!(stats.residual_eta <= 1e-11);
        assert!(stats.newton_steps < 25);
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                let exact =
                    round_regular_part(kappa, Complex64::new(xi_grid.x(i), xi_grid.x(j)));
                worst = worst.max((xi_grid.get(i, j) - exact).abs());
            }
        }
        assert!(worst < 2e-3, "sup error {worst}");
    }

    #[test]
    fn two_chart_solver_approximates_the_two_point_closed_form() {
        // Route the {0, ∞} configuration through the general scheme (not
        // the radial shortcut) on a coarse grid and compare against the
        // closed form away from the punctures.
        let beta = 0.8;
        let kappa = 4.0;
        let config = two_point_config(crate::config::Angle::exact(4, 5));
        let opts = SolverOptions::coarse(65);
        let sol = solve_two_chart(&config, kappa, &opts).unwrap();
        assert_eq!(sol.method, SolveMethod::TwoChart);
        assert!(sol.xi.residual <= 1e-10, "residual {}", sol.xi.residual);
        assert!(sol.eta.residual <= 1e-10);
        let mut worst: f64 = 0.0;
        let n = sol.xi.grid.n;
        for j in 0..n {
            for i in 0..n {
                let xi = Complex64::new(sol.xi.grid.x(i), sol.xi.grid.x(j));
                if xi.norm() < 0.3 || xi.norm() > 1.5 {
                    continue;
                }
                let exact =
                    (2.0 * beta / kappa.sqrt()).ln() - xi.norm().powf(2.0 * beta).ln_1p();
                worst = worst.max((sol.xi.grid.get(i, j) - exact).abs());
            }
        }
        assert!(worst < 0.02, "sup error {worst} vs closed form");
        // Transition consistency between the chart interiors.
        let sp_xi = sol.xi.spline();
        let sp_eta = sol.eta.spline();
        let mut gap: f64 = 0.0;
        for k in 0..16 {
            let xi = Complex64::from_polar(1.3, k as f64 * 0.39);
            let eta = 1.0 / xi;
            let lhs = sp_eta.eval(eta.re, eta.im);
            let rhs = sp_xi.eval(xi.re, xi.im) - 2.0 * sol.cone_number * eta.norm().ln()
                + sol.transition_constant;
            gap = gap.max((lhs - rhs).abs());
        }
        assert!(gap < 0.02, "transition gap {gap}");
    }

    #[test]
    fn dispatch_uses_radial_path_for_standard_two_point_configs() {
        let config = two_point_config(crate::config::Angle::exact(3, 4));
        let sol = solve(&config, 4.0, &SolverOptions::coarse(33)).unwrap();
        assert_eq!(sol.method, SolveMethod::Radial);
        // Sup-comparison against the closed form on all grid nodes.
        let beta = 0.75f64;
        let mut worst: f64 = 0.0;
        let n = sol.xi.grid.n;
        for j in 0..n {
            for i in 0..n {
                let xi = Complex64::new(sol.xi.grid.x(i), sol.xi.grid.x(j));
                let exact = (2.0 * beta / 2.0).ln() - xi.norm().powf(2.0 * beta).ln_1p();
                worst = worst.max((sol.xi.grid.get(i, j) - exact).abs());
            }
        }
        assert!(worst < 1e-7, "sup error {worst}");
    }

    #[test]
    fn solver_rejects_bad_inputs() {
        let config = two_point_config(crate::config::Angle::exact(3, 4));
        assert!(solve(&config, -1.0, &SolverOptions::default()).is_err());
        // Inadmissible: the positivity slack 2 − 3 + Σβ = 9/10 is not
        // below twice the smallest angle 2/10.
        let bad = crate::config::three_point_config(
            crate::config::Angle::exact(9, 10),
            crate::config::Angle::exact(9, 10),
            crate::config::Angle::exact(1, 10),
        );
        assert!(solve(&bad, 4.0, &SolverOptions::default()).is_err());
    }
}
