//! Reference computations for the acceptance suite. Nothing here calls into
//! `sshsim`; each routine takes a different route to the same quantity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt` by the trapezoid rule, which
/// converges geometrically for this smooth periodic integrand.
pub fn bessel_j0_quadrature(x: f64) -> f64 {
    let n = 400;
    let h = std::f64::consts::PI / n as f64;
    let mut s = 1.0;
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / std::f64::consts::PI
}

pub fn vec_row_major(m: &DMatrix<Complex64>) -> DVector<Complex64> {
    let n = m.nrows();
    DVector::from_fn(n * n, |idx, _| m[(idx / n, idx % n)])
}

pub fn unvec_row_major(v: &DVector<Complex64>, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |r, c| v[r * n + c])
}

pub fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Row-major Liouvillian of `-i[H, rho] + gamma sum_j (Z_j rho Z_j - rho)`
/// on the full Hilbert space, built from Kronecker products.
pub fn full_space_liouvillian(h: &DMatrix<Complex64>, z: &[DMatrix<Complex64>], gamma: f64) -> DMatrix<Complex64> {
    let d = h.nrows();
    let id = DMatrix::<Complex64>::identity(d, d);
    // row-major vec(A rho B) = (A kron B^T) vec(rho)
    let mut l = (h.kronecker(&id) - id.kronecker(&h.transpose())) * (-Complex64::i());
    for zj in z {
        l += (zj.kronecker(&zj.transpose()) - id.kronecker(&id)).scale(gamma);
    }
    l
}
