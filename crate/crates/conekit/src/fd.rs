//! Finite-difference stencils shared by the verification checks:
//! fourth-order first and second derivatives, tensor-product mixed
//! partials, and complex Hessians of real functions on ℂ and ℂ².
//!
//! All stencils are central.  First and pure second derivatives use the
//! five-point fourth-order formulas; mixed partials use the tensor
//! product of the fourth-order first-derivative stencil (sixteen
//! evaluations), so every entry carries an `O(h⁴)` truncation error.

use num_complex::Complex64;

/// Offsets (in units of `h`) of the fourth-order first-derivative
/// stencil, paired with [`D1_WEIGHTS`].
const D1_OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
/// Weights of the fourth-order first-derivative stencil, to be divided
/// by `12h`.
const D1_WEIGHTS: [f64; 4] = [1.0, -8.0, 8.0, -1.0];

/// Fourth-order first derivative of a scalar function.
pub fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let mut acc = 0.0;
    for (o, w) in D1_OFFSETS.iter().zip(D1_WEIGHTS) {
        acc += w * f(x + o * h);
    }
    acc / (12.0 * h)
}

/// Fourth-order second derivative of a scalar function.
pub fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
        / (12.0 * h * h)
}

/// Gradient `(∂f/∂x, ∂f/∂y)` of a function on the plane.
pub fn grad<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> (f64, f64) {
    let fx = d1(|t| f(t, y), x, h);
    let fy = d1(|t| f(x, t), y, h);
    (fx, fy)
}

/// Laplacian `f_xx + f_yy` of a function on the plane.
pub fn laplacian<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    d2(|t| f(t, y), x, h) + d2(|t| f(x, t), y, h)
}

/// Mixed partial `∂²f/∂x∂y` via the tensor product of the first-derivative
/// stencil.
pub fn dxy<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    let mut acc = 0.0;
    for (ox, wx) in D1_OFFSETS.iter().zip(D1_WEIGHTS) {
        for (oy, wy) in D1_OFFSETS.iter().zip(D1_WEIGHTS) {
            acc += wx * wy * f(x + ox * h, y + oy * h);
        }
    }
    acc / (144.0 * h * h)
}

/// Full 2×2 Hessian of a function on the plane.
pub fn hessian<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> [[f64; 2]; 2] {
    let fxx = d2(|t| f(t, y), x, h);
    let fyy = d2(|t| f(x, t), y, h);
    let fxy = dxy(&f, x, y, h);
    [[fxx, fxy], [fxy, fyy]]
}

/// Scalar curl `∂q/∂x − ∂p/∂y` of the 1-form `p·dx + q·dy`.
pub fn curl<P, Q>(p: P, q: Q, x: f64, y: f64, h: f64) -> f64
where
    P: Fn(f64, f64) -> f64,
    Q: Fn(f64, f64) -> f64,
{
    d1(|t| q(t, y), x, h) - d1(|t| p(x, t), y, h)
}

/// One Richardson step for a quantity with leading error `O(h^p)`:
/// combines `D(h)` and `D(h/2)` into an estimate of order `p + 1` (or
/// `p + 2` for symmetric stencils with even-power expansions).
pub fn richardson(d_h: f64, d_half: f64, p: u32) -> f64 {
    let f = (1u64 << p) as f64;
    d_half + (d_half - d_h) / (f - 1.0)
}

/// Second partial `∂²f/∂xᵢ∂xⱼ` of a function of four real variables.
fn second_partial4<F: Fn([f64; 4]) -> f64>(f: &F, x: [f64; 4], i: usize, j: usize, h: f64) -> f64 {
    if i == j {
        d2(
            |t| {
                let mut y = x;
                y[i] = t;
                f(y)
            },
            x[i],
            h,
        )
    } else {
        dxy(
            |s, t| {
                let mut y = x;
                y[i] = s;
                y[j] = t;
                f(y)
            },
            x[i],
            x[j],
            h,
        )
    }
}

/// Complex Hessian `[ψ_{zz̄}  ψ_{zw̄}; ψ_{wz̄}  ψ_{ww̄}]` of a real-valued
/// function `ψ(z, w)` on ℂ², computed from real second partials via
/// `∂_z = (∂₁ − i∂₂)/2`, `∂_z̄ = (∂₁ + i∂₂)/2` (and likewise in `w`):
///
/// ```text
/// ψ_{zz̄} = (ψ₁₁ + ψ₂₂)/4,
/// ψ_{zw̄} = ((ψ₁₃ + ψ₂₄) + i(ψ₁₄ − ψ₂₃))/4,
/// ```
///
/// with `ψ_{wz̄} = conj(ψ_{zw̄})`.
pub fn complex_hessian<F>(psi: F, z: Complex64, w: Complex64, h: f64) -> [[Complex64; 2]; 2]
where
    F: Fn(Complex64, Complex64) -> f64,
{
    let f = |x: [f64; 4]| psi(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]));
    let x = [z.re, z.im, w.re, w.im];
    let p = |i, j| second_partial4(&f, x, i, j, h);

    let h_zz = Complex64::new((p(0, 0) + p(1, 1)) / 4.0, 0.0);
    let h_ww = Complex64::new((p(2, 2) + p(3, 3)) / 4.0, 0.0);
    let h_zw = Complex64::new(p(0, 2) + p(1, 3), p(0, 3) - p(1, 2)) / 4.0;
    [[h_zz, h_zw], [h_zw.conj(), h_ww]]
}

/// Determinant of a 2×2 Hermitian matrix as returned by
/// [`complex_hessian`]; real by symmetry.
pub fn hermitian_det(m: &[[Complex64; 2]; 2]) -> f64 {
    m[0][0].re * m[1][1].re - m[0][1].norm_sqr()
}

/// Complex Hessian `ψ_{zz̄} = Δψ/4` of a real function of one complex
/// variable.
pub fn complex_hessian_1d<F: Fn(Complex64) -> f64>(psi: F, z: Complex64, h: f64) -> f64 {
    laplacian(|x, y| psi(Complex64::new(x, y)), z.re, z.im, h) / 4.0
}
