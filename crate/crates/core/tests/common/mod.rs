//! Reference computations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt`, trapezoid rule. The integrand
/// is smooth and periodic, so the rule converges geometrically.
pub fn bessel_j0_quadrature(x: f64) -> f64 {
    let n = 400;
    let h = std::f64::consts::PI / n as f64;
    let mut s = 1.0;
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / std::f64::consts::PI
}

pub fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
