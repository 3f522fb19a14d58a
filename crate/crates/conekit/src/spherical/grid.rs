//! Uniform square grids and C² tensor-product spline interpolation.
//!
//! The interpolant is the classical cubic spline with not-a-knot end
//! conditions, extended to two dimensions as a tensor product: we
//! precompute the nodal second derivatives `∂²f/∂x²`, `∂²f/∂y²` and
//! `∂⁴f/∂x²∂y²` by one-dimensional solves along rows and columns, after
//! which evaluation on a cell blends the four corner values of each of
//! the four arrays.  The result interpolates the nodes, is C² across
//! cell boundaries, and reproduces bicubic polynomials exactly.

use serde::{Deserialize, Serialize};

/// Samples of a function on the uniform `n × n` grid over
/// `[min, min + (n−1)h]²`, stored row-major: `values[j*n + i]` is the
/// sample at `(x_i, y_j) = (min + i·h, min + j·h)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid2d {
    pub n: usize,
    pub min: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl Grid2d {
    /// A zero-filled grid with `n` nodes per side spanning `[min, max]`.
    pub fn new(n: usize, min: f64, max: f64) -> Self {
        assert!(n >= 4, "grid needs at least 4 nodes per side");
        Grid2d {
            n,
            min,
            h: (max - min) / (n - 1) as f64,
            values: vec![0.0; n * n],
        }
    }

    /// Fills a grid by evaluating `f` at every node.
    pub fn from_fn(n: usize, min: f64, max: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut g = Grid2d::new(n, min, max);
        for j in 0..n {
            for i in 0..n {
                g.values[j * n + i] = f(g.x(i), g.x(j));
            }
        }
        g
    }

    pub fn max(&self) -> f64 {
        self.min + self.h * (self.n - 1) as f64
    }

    /// Coordinate of node `i` (same spacing on both axes).
    pub fn x(&self, i: usize) -> f64 {
        self.min + self.h * i as f64
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.n + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[j * self.n + i] = v;
    }

    /// True when `(i, j)` lies on the outer boundary.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }
}

/// Nodal second derivatives of the 1D not-a-knot cubic spline through
/// `f` on a uniform grid of spacing `h`.
///
/// With uniform spacing the end conditions decouple: the second
/// derivative at the first and last interior node equals `6/h²` times
/// the centered second difference there, the remaining interior values
/// solve a symmetric tridiagonal system, and the endpoint values are
/// linear extrapolations.
pub fn spline_second_derivs(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 4, "spline needs at least 4 nodes");
    let r: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h))
        .collect();
    let mut m = vec![0.0; n];
    m[1] = r[0] / 6.0;
    m[n - 2] = r[n - 3] / 6.0;
    let k = n - 4;
    if k > 0 {
        // Thomas algorithm on M_2..M_{n−3}: unit off-diagonals, 4 on the
        // diagonal, ends corrected by the known M_1 and M_{n−2}.
        let mut diag = vec![4.0; k];
        let mut rhs: Vec<f64> = (2..n - 2).map(|i| r[i - 1]).collect();
        rhs[0] -= m[1];
        rhs[k - 1] -= m[n - 2];
        for i in 1..k {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        m[2 + k - 1] = rhs[k - 1] / diag[k - 1];
        for i in (0..k - 1).rev() {
            m[2 + i] = (rhs[i] - m[2 + i + 1]) / diag[i];
        }
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
    m
}

/// C² interpolant of a [`Grid2d`].
#[derive(Debug, Clone)]
pub struct Spline2d {
    n: usize,
    min: f64,
    h: f64,
    f: Vec<f64>,
    /// Nodal `∂²f/∂x²`.
    mx: Vec<f64>,
    /// Nodal `∂²f/∂y²`.
    my: Vec<f64>,
    /// Nodal `∂⁴f/∂x²∂y²` (y-spline applied to `mx`).
    mxy: Vec<f64>,
}

/// Which derivative of the spline to evaluate along one axis.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Deriv {
    Value,
    First,
    Second,
}

impl Spline2d {
    pub fn new(grid: &Grid2d) -> Self {
        let n = grid.n;
        let h = grid.h;
        let f = grid.values.clone();

        let mut mx = vec![0.0; n * n];
        for j in 0..n {
            let row: Vec<f64> = (0..n).map(|i| f[j * n + i]).collect();
            let m = spline_second_derivs(&row, h);
            mx[j * n..(j + 1) * n].copy_from_slice(&m);
        }

        let mut my = vec![0.0; n * n];
        let mut mxy = vec![0.0; n * n];
        for i in 0..n {
            let col: Vec<f64> = (0..n).map(|j| f[j * n + i]).collect();
            let m = spline_second_derivs(&col, h);
            for j in 0..n {
                my[j * n + i] = m[j];
            }
            let colx: Vec<f64> = (0..n).map(|j| mx[j * n + i]).collect();
            let m = spline_second_derivs(&colx, h);
            for j in 0..n {
                mxy[j * n + i] = m[j];
            }
        }

        Spline2d {
            n,
            min: grid.min,
            h,
            f,
            mx,
            my,
            mxy,
        }
    }

    /// Cell index and the four blending weights `(A, B, C, D)` (or their
    /// derivatives) of the 1D spline formula at coordinate `t`:
    /// `S = A·f_i + B·f_{i+1} + C·M_i + D·M_{i+1}`.
    fn weights(&self, t: f64, deriv: Deriv) -> (usize, [f64; 4]) {
        let s = (t - self.min) / self.h;
        let i = (s.floor() as isize).clamp(0, self.n as isize - 2) as usize;
        let a = (i as f64 + 1.0) - s;
        let b = s - i as f64;
        let h = self.h;
        let w = match deriv {
            Deriv::Value => [
                a,
                b,
                (a * a * a - a) * h * h / 6.0,
                (b * b * b - b) * h * h / 6.0,
            ],
            Deriv::First => [
                -1.0 / h,
                1.0 / h,
                -(3.0 * a * a - 1.0) * h / 6.0,
                (3.0 * b * b - 1.0) * h / 6.0,
            ],
            Deriv::Second => [0.0, 0.0, a, b],
        };
        (i, w)
    }

    fn eval_with(&self, x: f64, y: f64, dx: Deriv, dy: Deriv) -> f64 {
        let (i, wx) = self.weights(x, dx);
        let (j, wy) = self.weights(y, dy);
        let n = self.n;
        let mut acc = 0.0;
        for l in 0..2 {
            for k in 0..2 {
                let idx = (j + l) * n + (i + k);
                acc += wx[k] * wy[l] * self.f[idx]
                    + wx[2 + k] * wy[l] * self.mx[idx]
                    + wx[k] * wy[2 + l] * self.my[idx]
                    + wx[2 + k] * wy[2 + l] * self.mxy[idx];
            }
        }
        acc
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, Deriv::Value, Deriv::Value)
    }

    pub fn eval_dx(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, Deriv::First, Deriv::Value)
    }

    pub fn eval_dy(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, Deriv::Value, Deriv::First)
    }

    pub fn eval_dxx(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, Deriv::Second, Deriv::Value)
    }

    pub fn eval_dyy(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, Deriv::Value, Deriv::Second)
    }

    pub fn eval_dxy(&self, x: f64, y: f64) -> f64 {
        self.eval_with(x, y, Deriv::First, Deriv::First)
    }

    /// `∂²S/∂x² + ∂²S/∂y²`.
    pub fn eval_laplacian(&self, x: f64, y: f64) -> f64 {
        self.eval_dxx(x, y) + self.eval_dyy(x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_derivatives_exact_for_cubics() {
        let h = 0.25;
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(3)).collect();
        let m = spline_second_derivs(&f, h);
        for (i, v) in m.iter().enumerate() {
            assert!((v - 6.0 * i as f64 * h).abs() < 1e-10, "node {i}");
        }
    }

    #[test]
    fn spline_reproduces_bicubics() {
        let g = Grid2d::from_fn(9, -1.0, 1.0, |x, y| {
            (x.powi(3) - 2.0 * x) * (y.powi(3) + y * y)
        });
        let s = Spline2d::new(&g);
        let check = |x: f64, y: f64| {
            let exact = (x.powi(3) - 2.0 * x) * (y.powi(3) + y * y);
            assert!((s.eval(x, y) - exact).abs() < 1e-12, "({x},{y})");
            let ex_dx = (3.0 * x * x - 2.0) * (y.powi(3) + y * y);
            assert!((s.eval_dx(x, y) - ex_dx).abs() < 1e-11);
            let ex_dyy = (x.powi(3) - 2.0 * x) * (6.0 * y + 2.0);
            assert!((s.eval_dyy(x, y) - ex_dyy).abs() < 1e-10);
            let ex_dxy = (3.0 * x * x - 2.0) * (3.0 * y * y + 2.0 * y);
            assert!((s.eval_dxy(x, y) - ex_dxy).abs() < 1e-10);
        };
        check(0.13, -0.57);
        check(-0.99, 0.98);
        check(0.5, 0.25); // on a knot line
    }

    #[test]
    fn spline_converges_at_fourth_order() {
        let f = |x: f64, y: f64| (1.5 * x).sin() * (0.7 * y).cos();
        let err = |n: usize| {
            let g = Grid2d::from_fn(n, -1.0, 1.0, f);
            let s = Spline2d::new(&g);
            let mut worst: f64 = 0.0;
            for j in 0..40 {
                for i in 0..40 {
                    let x = -0.9 + 1.8 * i as f64 / 39.0;
                    let y = -0.9 + 1.8 * j as f64 / 39.0;
                    worst = worst.max((s.eval(x, y) - f(x, y)).abs());
                }
            }
            worst
        };
        let e1 = err(17);
        let e2 = err(33);
        assert!(e1 < 1e-5);
        // Halving h should shrink the error by roughly 2⁴.
        assert!(e2 < e1 / 10.0);
    }

    #[test]
    fn interpolates_nodes_exactly() {
        let g = Grid2d::from_fn(11, 0.0, 2.0, |x, y| (x * y).exp().sin());
        let s = Spline2d::new(&g);
        for j in 0..11 {
            for i in 0..11 {
                assert!((s.eval(g.x(i), g.x(j)) - g.get(i, j)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivatives_are_continuous_across_knots() {
        let g = Grid2d::from_fn(9, -1.0, 1.0, |x, y| (2.0 * x + y).tanh());
        let s = Spline2d::new(&g);
        // Approach an interior knot line x = 0 from both sides.
        let eps = 1e-9;
        for &y in &[-0.3, 0.41] {
            for eval in [Spline2d::eval, Spline2d::eval_dx, Spline2d::eval_dxx] {
                let l = eval(&s, -eps, y);
                let r = eval(&s, eps, y);
                assert!((l - r).abs() < 1e-6, "discontinuity {l} vs {r}");
            }
        }
    }

    #[test]
    fn grid_accessors() {
        let mut g = Grid2d::new(5, -2.0, 2.0);
        assert_eq!(g.h, 1.0);
        assert_eq!(g.max(), 2.0);
        assert_eq!(g.x(3), 1.0);
        g.set(2, 3, 7.0);
        assert_eq!(g.get(2, 3), 7.0);
        assert!(g.is_boundary(0, 2));
        assert!(g.is_boundary(2, 4));
        assert!(!g.is_boundary(2, 3));
    }
}
