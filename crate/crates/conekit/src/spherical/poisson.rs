//! Fast direct solver for the discrete Dirichlet Laplacian on a square,
//! and a preconditioned BiCGStab iteration for its perturbations.
//!
//! The five-point Laplacian with zero Dirichlet data on an `m × m`
//! interior grid is diagonalized by the type-I discrete sine transform
//! (DST-I) in each direction, with one-dimensional eigenvalues
//! `λ_k = −4 sin²(kπ / 2(m+1))`.  Each DST-I of length `m` is evaluated
//! through a complex FFT of length `2(m+1)` on an odd extension of the
//! input.  The direct solver doubles as an effective preconditioner for
//! diagonal perturbations `Δ_h + diag(v)` (which need not be definite),
//! handled by BiCGStab.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Direct solver for `Δ_h U = F` with zero Dirichlet boundary data on
/// the interior of a uniform square grid.
pub struct DstPoisson {
    /// Interior nodes per side.
    m: usize,
    h: f64,
    fft: Arc<dyn Fft<f64>>,
    /// One-dimensional eigenvalues, `lambda[k] = −4 sin²((k+1)π/2(m+1))`.
    lambda: Vec<f64>,
}

impl DstPoisson {
    pub fn new(m: usize, h: f64) -> Self {
        assert!(m >= 1);
        let fft = FftPlanner::new().plan_fft_forward(2 * (m + 1));
        let lambda = (1..=m)
            .map(|k| {
                let s = (k as f64 * PI / (2.0 * (m + 1) as f64)).sin();
                -4.0 * s * s
            })
            .collect();
        DstPoisson { m, h, fft, lambda }
    }

    pub fn interior(&self) -> usize {
        self.m
    }

    /// Unnormalized DST-I applied to each row of the row-major `m × m`
    /// array: `out_k = Σ_j in_j · sin(π j k/(m+1))`.
    fn dst_rows(&self, a: &mut [f64]) {
        let m = self.m;
        let size = 2 * (m + 1);
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for row in a.chunks_mut(m) {
            buf[0] = Complex64::new(0.0, 0.0);
            buf[m + 1] = Complex64::new(0.0, 0.0);
            for j in 0..m {
                buf[j + 1] = Complex64::new(row[j], 0.0);
                buf[size - 1 - j] = Complex64::new(-row[j], 0.0);
            }
            self.fft.process(&mut buf);
            for k in 0..m {
                row[k] = -buf[k + 1].im / 2.0;
            }
        }
    }

    fn transpose(a: &mut [f64], m: usize) {
        for j in 0..m {
            for i in 0..j {
                a.swap(j * m + i, i * m + j);
            }
        }
    }

    /// Applies the two-dimensional sine transform (rows then columns).
    fn dst2(&self, a: &mut [f64]) {
        self.dst_rows(a);
        Self::transpose(a, self.m);
        self.dst_rows(a);
        Self::transpose(a, self.m);
    }

    /// Solves `Δ_h U = F` in place: `f` holds the interior values of `F`
    /// row-major on entry and the solution on exit.
    pub fn solve(&self, f: &mut [f64]) {
        let m = self.m;
        assert_eq!(f.len(), m * m);
        self.dst2(f);
        let norm = 2.0 / (m + 1) as f64;
        let scale = self.h * self.h * norm * norm;
        for l in 0..m {
            for k in 0..m {
                f[l * m + k] *= scale / (self.lambda[k] + self.lambda[l]);
            }
        }
        self.dst2(f);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Preconditioned BiCGStab for a general square system `A x = b`.
///
/// `apply` evaluates `A·v`; `precond` applies an approximate inverse.
/// Returns the solution and the iteration count once the true residual
/// norm drops below `rel_tol · ‖b‖₂` (with a small absolute floor).  A
/// near-breakdown of the recurrence restarts from the current iterate.
pub fn bicgstab(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    precond: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    assert_eq!(x0.len(), n);
    let tol = (rel_tol * norm2(b)).max(1e-300);

    let mut x = x0;
    let mut r: Vec<f64> = {
        let ax = apply(&x);
        b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
    };
    if norm2(&r) <= tol {
        return Ok((x, 0));
    }
    let mut r_hat = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for iter in 1..=max_iter {
        let rho_new = dot(&r_hat, &r);
        if rho_new.abs() < 1e-280 {
            // Shadow residual became orthogonal; restart the recurrence.
            r_hat.copy_from_slice(&r);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.iter_mut().for_each(|t| *t = 0.0);
            p.iter_mut().for_each(|t| *t = 0.0);
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat = precond(&p);
        v = apply(&p_hat);
        let denom = dot(&r_hat, &v);
        if denom.abs() < 1e-280 {
            r_hat.copy_from_slice(&r);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.iter_mut().for_each(|t| *t = 0.0);
            p.iter_mut().for_each(|t| *t = 0.0);
            continue;
        }
        alpha = rho_new / denom;
        let mut s = r.clone();
        axpy(&mut s, -alpha, &v);
        if norm2(&s) <= tol {
            axpy(&mut x, alpha, &p_hat);
            return Ok((x, iter));
        }
        let s_hat = precond(&s);
        let t = apply(&s_hat);
        let tt = dot(&t, &t);
        if tt < 1e-280 {
            return Err(Error::NonConvergence(
                "BiCGStab stagnated (t vanished)".into(),
            ));
        }
        omega = dot(&t, &s) / tt;
        axpy(&mut x, alpha, &p_hat);
        axpy(&mut x, omega, &s_hat);
        r = s;
        axpy(&mut r, -omega, &t);
        if norm2(&r) <= tol {
            return Ok((x, iter));
        }
        rho = rho_new;
    }
    Err(Error::NonConvergence(format!(
        "BiCGStab did not reach tolerance in {max_iter} iterations"
    )))
}

/// Restarted GMRES with right preconditioning for `A x = b`.
///
/// `apply` evaluates `A·v`; `precond` applies a LINEAR approximate
/// inverse `M⁻¹` (linearity lets the solution update apply it once per
/// cycle, to the Krylov combination).  Robust on indefinite systems
/// where the BiCGStab recurrence breaks down.  Returns once the true
/// residual drops below `rel_tol · ‖b‖₂`; an exhausted budget is still
/// accepted if the residual fell by a factor `1e3`.
pub fn gmres(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    mut precond: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize)> {
    let n = b.len();
    assert_eq!(x0.len(), n);
    let b_norm = norm2(b).max(1e-300);
    let tol = (rel_tol * b_norm).max(1e-300);
    let restart = 50.min(n);
    let mut x = x0;
    let mut total = 0usize;

    loop {
        let ax = apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        if std::env::var_os("CONEKIT_TRACE_GMRES").is_some() {
            eprintln!("    gmres iter {total}: true residual {:.3e}", beta / b_norm);
        }
        if beta <= tol {
            return Ok((x, total));
        }
        if total >= max_iter {
            if beta <= 0.1 * b_norm {
                // Enough reduction to serve as an inexact direction;
                // the caller's line search judges the step on the
                // nonlinear residual anyway.
                return Ok((x, total));
            }
            return Err(Error::NonConvergence(format!(
                "GMRES did not reach tolerance in {max_iter} iterations"
            )));
        }
        let mut basis = vec![r.iter().map(|v| v / beta).collect::<Vec<f64>>()];
        // `h[j]` holds the rotated column j (j+1 triangular entries used).
        let mut h: Vec<Vec<f64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<f64> = Vec::new();
        let mut g = vec![beta];
        let mut k = 0usize;
        while k < restart && total < max_iter {
            total += 1;
            let z = precond(&basis[k]);
            let mut w = apply(&z);
            let mut col = vec![0.0; k + 2];
            for (i, vi) in basis.iter().enumerate() {
                let hik = dot(&w, vi);
                col[i] = hik;
                axpy(&mut w, -hik, vi);
            }
            let w_norm = norm2(&w);
            col[k + 1] = w_norm;
            // Apply the accumulated Givens rotations, then a new one.
            for i in 0..k {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let denom = (col[k] * col[k] + col[k + 1] * col[k + 1]).sqrt();
            let (c, s) = if denom < 1e-300 {
                (1.0, 0.0)
            } else {
                (col[k] / denom, col[k + 1] / denom)
            };
            cs.push(c);
            sn.push(s);
            col[k] = denom;
            col[k + 1] = 0.0;
            h.push(col);
            g.push(-s * g[k]);
            g[k] *= c;
            k += 1;
            let res = g[k].abs();
            if std::env::var_os("CONEKIT_TRACE_GMRES").is_some() && total % 10 == 0 {
                eprintln!("    gmres iter {total}: estimate {:.3e}", res / b_norm);
            }
            if res <= tol || w_norm < 1e-300 {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }
        if k == 0 {
            return Err(Error::NonConvergence("GMRES stalled immediately".into()));
        }
        // Back-substitute the k×k triangular system, combine the basis,
        // then one preconditioner application on the whole direction.
        let mut y = vec![0.0; k];
        for row in (0..k).rev() {
            let mut acc = g[row];
            for col in row + 1..k {
                acc -= h[col][row] * y[col];
            }
            y[row] = acc / h[row][row];
        }
        let mut dir = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            axpy(&mut dir, *yj, &basis[j]);
        }
        let z = precond(&dir);
        axpy(&mut x, 1.0, &z);
    }
}

/// Right-preconditioned Arnoldi least squares with an adaptive Tikhonov
/// damping chosen inside the Krylov subspace.
///
/// Builds one Arnoldi cycle for `A M⁻¹` from `b` (initial guess zero)
/// and first forms the plain minimum-residual direction.  If its
/// entries fit within `sup_cap` it is returned as is — an ordinary
/// GMRES solve.  Otherwise the damping weight `μ` in
/// `min ‖βe₁ − H̃y‖² + μ‖y‖²` is raised by bisection until the
/// combined direction obeys the cap.  Damping inside the subspace keeps
/// the direction a descent direction for `½‖b − Ax‖²` regardless of how
/// ill-conditioned `A` is, because components outside the subspace are
/// simply not moved.
///
/// Returns `(direction, iterations, predicted residual norm)`.
pub fn gmres_damped(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    mut precond: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
    sup_cap: f64,
) -> Result<(Vec<f64>, usize, f64)> {
    let n = b.len();
    let b_norm = norm2(b).max(1e-300);
    let tol = (rel_tol * b_norm).max(1e-300);
    let k_max = max_iter.min(n);

    let beta = b_norm;
    let mut basis = vec![b.iter().map(|v| v / beta).collect::<Vec<f64>>()];
    // Raw Hessenberg columns (column j has j+2 entries).
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    // Rotated copy for the running residual estimate.
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];
    let mut rot_cols: Vec<Vec<f64>> = Vec::new();
    let mut k = 0usize;
    while k < k_max {
        let z = precond(&basis[k]);
        let mut w = apply(&z);
        let mut col = vec![0.0; k + 2];
        for (i, vi) in basis.iter().enumerate() {
            let hik = dot(&w, vi);
            col[i] = hik;
            axpy(&mut w, -hik, vi);
        }
        let w_norm = norm2(&w);
        col[k + 1] = w_norm;
        h_cols.push(col.clone());
        for i in 0..k {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = (col[k] * col[k] + col[k + 1] * col[k + 1]).sqrt();
        let (c, s) = if denom < 1e-300 {
            (1.0, 0.0)
        } else {
            (col[k] / denom, col[k + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        col[k] = denom;
        col[k + 1] = 0.0;
        rot_cols.push(col);
        g.push(-s * g[k]);
        g[k] *= c;
        k += 1;
        if g[k].abs() <= tol || w_norm < 1e-300 {
            break;
        }
        basis.push(w.iter().map(|v| v / w_norm).collect());
    }
    if k == 0 {
        return Err(Error::NonConvergence("Arnoldi stalled immediately".into()));
    }

    // Solve the damped subspace problem for a given μ via the normal
    // equations of the (k+1)×k Hessenberg least squares.
    let small_solve = |mu: f64| -> Vec<f64> {
        // A_sub[i][j] = Σ_l H̃[l][i]·H̃[l][j] + μ δ_ij, rhs = H̃ᵀ(βe₁).
        let mut a = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            rhs[i] = h_cols[i][0] * beta;
            for j in 0..k {
                let mut acc = 0.0;
                let lim = (i + 2).min(j + 2);
                for l in 0..lim {
                    let hi = if l < i + 2 { h_cols[i][l] } else { 0.0 };
                    let hj = if l < j + 2 { h_cols[j][l] } else { 0.0 };
                    acc += hi * hj;
                }
                a[i][j] = acc;
            }
            a[i][i] += mu;
        }
        // Gaussian elimination with partial pivoting on the k×k system.
        let mut y = rhs;
        for col in 0..k {
            let (mut p, mut pv) = (col, a[col][col].abs());
            for r in col + 1..k {
                if a[r][col].abs() > pv {
                    p = r;
                    pv = a[r][col].abs();
                }
            }
            a.swap(col, p);
            y.swap(col, p);
            let d = a[col][col];
            for r in col + 1..k {
                let f = a[r][col] / d;
                if f == 0.0 {
                    continue;
                }
                for cc in col..k {
                    a[r][cc] -= f * a[col][cc];
                }
                y[r] -= f * y[col];
            }
        }
        for row in (0..k).rev() {
            let mut acc = y[row];
            for cc in row + 1..k {
                acc -= a[row][cc] * y[cc];
            }
            y[row] = acc / a[row][row];
        }
        y
    };
    let combine = |y: &[f64], precond: &mut dyn FnMut(&[f64]) -> Vec<f64>| -> Vec<f64> {
        let mut dir = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            axpy(&mut dir, *yj, &basis[j]);
        }
        precond(&dir)
    };
    let resid_norm = |y: &[f64]| -> f64 {
        let mut acc = 0.0;
        for l in 0..k + 1 {
            let mut r = if l == 0 { beta } else { 0.0 };
            for (j, yj) in y.iter().enumerate() {
                if l < j + 2 {
                    r -= h_cols[j][l] * yj;
                }
            }
            acc += r * r;
        }
        acc.sqrt()
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, e| a.max(e.abs()));

    let y0 = small_solve(0.0);
    let d0 = combine(&y0, &mut precond);
    if sup(&d0) <= sup_cap {
        return Ok((d0, k, resid_norm(&y0)));
    }
    // Find the smallest damping (within a factor of two) that brings
    // the direction inside the cap.
    let mut lo = 0.0f64;
    let mut hi = 1e-6f64;
    let mut dir_hi = loop {
        let y = small_solve(hi);
        let d = combine(&y, &mut precond);
        if sup(&d) <= sup_cap {
            break d;
        }
        lo = hi;
        hi *= 8.0;
        if hi > 1e12 {
            return Err(Error::NonConvergence(
                "damped direction would not fit the step cap".into(),
            ));
        }
    };
    let mut y_best = None;
    for _ in 0..10 {
        if hi <= lo.max(1e-12) * 2.0 {
            break;
        }
        let mid = if lo == 0.0 { hi / 8.0 } else { (lo * hi).sqrt() };
        let y = small_solve(mid);
        let d = combine(&y, &mut precond);
        if sup(&d) <= sup_cap {
            hi = mid;
            dir_hi = d;
            y_best = Some(y);
        } else {
            lo = mid;
        }
    }
    let pred = match &y_best {
        Some(y) => resid_norm(y),
        None => resid_norm(&small_solve(hi)),
    };
    Ok((dir_hi, k, pred))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Five-point Laplacian with zero Dirichlet data on the `m × m`
    /// interior, for cross-checking the fast solver.
    fn apply_laplacian(u: &[f64], m: usize, h: f64) -> Vec<f64> {
        let mut out = vec![0.0; m * m];
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i >= m as isize || j >= m as isize {
                0.0
            } else {
                u[j as usize * m + i as usize]
            }
        };
        for j in 0..m as isize {
            for i in 0..m as isize {
                out[j as usize * m + i as usize] = (at(i - 1, j)
                    + at(i + 1, j)
                    + at(i, j - 1)
                    + at(i, j + 1)
                    - 4.0 * at(i, j))
                    / (h * h);
            }
        }
        out
    }

    #[test]
    fn dst_is_self_inverse_up_to_scale() {
        let m = 13;
        let solver = DstPoisson::new(m, 0.5);
        let mut rng = crate::sample::rng(11);
        let orig: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut a = orig.clone();
        solver.dst2(&mut a);
        solver.dst2(&mut a);
        let scale = ((m + 1) as f64 / 2.0).powi(2);
        for (x, y) in a.iter().zip(&orig) {
            assert!((x / scale - y).abs() < 1e-11);
        }
    }

    #[test]
    fn fast_poisson_inverts_the_discrete_laplacian() {
        let m = 31;
        let h = 1.0 / (m as f64 + 1.0);
        let solver = DstPoisson::new(m, h);
        let mut rng = crate::sample::rng(12);
        let u_exact: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut f = apply_laplacian(&u_exact, m, h);
        solver.solve(&mut f);
        for (a, b) in f.iter().zip(&u_exact) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn bicgstab_solves_perturbed_laplacian() {
        let m = 31;
        let h = 1.0 / (m as f64 + 1.0);
        let solver = DstPoisson::new(m, h);
        let mut rng = crate::sample::rng(13);
        // Positive diagonal perturbation makes the operator indefinite
        // relative to the (negative-definite) Laplacian.
        let diag: Vec<f64> = (0..m * m).map(|_| rng.gen_range(0.0..30.0)).collect();
        let apply = |v: &[f64]| {
            let mut out = apply_laplacian(v, m, h);
            for i in 0..v.len() {
                out[i] += diag[i] * v[i];
            }
            out
        };
        let x_exact: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = apply(&x_exact);
        let precond = |r: &[f64]| {
            let mut z = r.to_vec();
            solver.solve(&mut z);
            z
        };
        let (x, iters) = bicgstab(apply, precond, &b, vec![0.0; m * m], 1e-12, 200).unwrap();
        assert!(iters < 100, "took {iters} iterations");
        let mut worst: f64 = 0.0;
        for (a, b) in x.iter().zip(&x_exact) {
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-8, "error {worst}");
    }

    #[test]
    fn gmres_solves_perturbed_laplacian() {
        // Same indefinite operator battery as the BiCGStab test; GMRES
        // is the solver the chart Newton iteration actually relies on.
        let m = 31;
        let h = 1.0 / (m as f64 + 1.0);
        let solver = DstPoisson::new(m, h);
        let mut rng = crate::sample::rng(29);
        let diag: Vec<f64> = (0..m * m).map(|_| rng.gen_range(0.0..30.0)).collect();
        let apply = |v: &[f64]| {
            let mut out = apply_laplacian(v, m, h);
            for i in 0..v.len() {
                out[i] += diag[i] * v[i];
            }
            out
        };
        let x_exact: Vec<f64> = (0..m * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = apply(&x_exact);
        let precond = |r: &[f64]| {
            let mut z = r.to_vec();
            solver.solve(&mut z);
            z
        };
        let (x, iters) = gmres(apply, precond, &b, vec![0.0; m * m], 1e-12, 400).unwrap();
        assert!(iters < 200, "took {iters} iterations");
        let mut worst: f64 = 0.0;
        for (a, b) in x.iter().zip(&x_exact) {
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 1e-8, "error {worst}");
    }

    #[test]
    fn gmres_reports_nonconvergence() {
        // A rotation-like system that plain iteration cannot touch in
        // one step with a hard budget.
        let apply = |v: &[f64]| vec![v[1] * 1e6, -v[0] * 1e6 + v[1]];
        let b = vec![1.0, -2.0];
        assert!(gmres(apply, |r| r.to_vec(), &b, vec![0.0, 0.0], 1e-15, 1).is_err());
    }

    #[test]
    fn bicgstab_without_preconditioner_still_converges_on_small_systems() {
        // 2×2 SPD system.
        let apply = |v: &[f64]| vec![4.0 * v[0] + v[1], v[0] + 3.0 * v[1]];
        let b = vec![1.0, 2.0];
        let (x, _) = bicgstab(apply, |r| r.to_vec(), &b, vec![0.0, 0.0], 1e-14, 50).unwrap();
        assert!((4.0 * x[0] + x[1] - 1.0).abs() < 1e-12);
        assert!((x[0] + 3.0 * x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bicgstab_reports_nonconvergence() {
        // Singular system with inconsistent right-hand side.
        let apply = |v: &[f64]| vec![v[0] - v[1], v[1] - v[0]];
        let b = vec![1.0, 1.0];
        assert!(bicgstab(apply, |r| r.to_vec(), &b, vec![0.0, 0.0], 1e-12, 20).is_err());
    }
}
