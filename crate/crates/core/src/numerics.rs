//! Numerical kernels shared by the lattice and dynamics layers.
//!
//! Everything here is pure: Bessel J0, a Hermitian eigensolver with a checked
//! contract, periodic-grid quadrature and a fixed-step RK4 integrator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

/// Relative tolerance on `max|H - H^dagger|` accepted by [`eigh`].
pub const HERMITIAN_TOL: f64 = 1e-12;

// Below this the power series loses fewer than ~1e-12 to cancellation; above
// it the Hankel expansion is accurate to better than 1e-12.
const BESSEL_SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("bessel_j0 of non-finite argument {x}")));
    }
    let ax = x.abs();
    if ax <= BESSEL_SERIES_LIMIT {
        Ok(j0_series(ax))
    } else {
        Ok(j0_asymptotic(ax))
    }
}

fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1.0) {
            return sum;
        }
    }
}

/// Hankel expansion J0 ~ sqrt(2/(pi x)) (P cos chi - Q sin chi), truncated at
/// the smallest term.
fn j0_asymptotic(x: f64) -> f64 {
    let mut p = 0.0;
    let mut q = 0.0;
    // a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k)
    let mut a = 1.0;
    let mut xpow = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..64usize {
        let term = a / xpow;
        if term > prev {
            break;
        }
        prev = term;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q -= sign * term;
        }
        if term < 1e-17 {
            break;
        }
        let next = (k + 1) as f64;
        a *= (2.0 * next - 1.0).powi(2) / (8.0 * next);
        xpow *= x;
    }
    let chi = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Eigh {
    pub fn vector(&self, i: usize) -> DVector<Complex64> {
        self.vectors.column(i).into_owned()
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct EighReal {
    pub values: Vec<f64>,
    pub vectors: RealMatrix,
}

pub fn max_abs(h: &ComplexMatrix) -> f64 {
    h.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_defect(h: &ComplexMatrix) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols || rows == 0 {
        return Err(Error::Contract(format!(
            "eigensolver needs a non-empty square matrix, got {rows}x{cols}"
        )));
    }
    Ok(())
}

/// Hermitian eigensolver. Eigenvalues ascending, eigenvectors orthonormal.
pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    check_square(h.nrows(), h.ncols())?;
    let scale = max_abs(h);
    let defect = hermitian_defect(h);
    if defect > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: max|H - H^dagger| = {defect:.3e} (max|H| = {scale:.3e})"
        )));
    }
    // Symmetrize exactly so the solver sees a Hermitian input.
    let sym = (h + h.adjoint()).scale(0.5);
    let dec = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let values = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(h.nrows(), h.ncols(), |r, c| {
        dec.eigenvectors[(r, order[c])]
    });
    Ok(Eigh { values, vectors })
}

/// Real symmetric counterpart of [`eigh`].
pub fn eigh_real(h: &RealMatrix) -> Result<EighReal> {
    check_square(h.nrows(), h.ncols())?;
    let scale = h.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let defect = (h - h.transpose()).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if defect > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Contract(format!(
            "matrix is not symmetric: max|H - H^T| = {defect:.3e}"
        )));
    }
    let sym = (h + h.transpose()) * 0.5;
    let dec = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dec.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[a].total_cmp(&dec.eigenvalues[b]));
    let values = order.iter().map(|&i| dec.eigenvalues[i]).collect();
    let vectors = RealMatrix::from_fn(h.nrows(), h.ncols(), |r, c| {
        dec.eigenvectors[(r, order[c])]
    });
    Ok(EighReal { values, vectors })
}

/// Ordered sample points, optionally closing on themselves after `period`.
///
/// A periodic grid does not repeat its first point: samples cover
/// `[first, first + period)` and the wrap-around interval runs from the last
/// sample back to `first + period`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    samples: Vec<f64>,
    period: Option<f64>,
}

impl Grid1D {
    pub fn new(samples: Vec<f64>, period: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("grid has no samples".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("grid contains non-finite samples".into()));
        }
        if samples.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("grid samples must be strictly increasing".into()));
        }
        if let Some(p) = period {
            let span = samples[samples.len() - 1] - samples[0];
            if !(p.is_finite() && p > span) {
                return Err(Error::Domain(format!(
                    "period {p} must exceed the sample span {span}"
                )));
            }
        }
        Ok(Self { samples, period })
    }

    /// `n` uniform samples on `[start, start + period)`.
    pub fn periodic(start: f64, period: f64, n: usize) -> Result<Self> {
        if n == 0 || !(period > 0.0) {
            return Err(Error::Domain(format!(
                "periodic grid needs n > 0 and period > 0 (n = {n}, period = {period})"
            )));
        }
        let h = period / n as f64;
        Self::new((0..n).map(|i| start + h * i as f64).collect(), Some(period))
    }

    /// `[0, 2pi)` with `n` points.
    pub fn brillouin_zone(n: usize) -> Result<Self> {
        Self::periodic(0.0, std::f64::consts::TAU, n)
    }

    /// `intervals + 1` uniform samples from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 || !(end > start) {
            return Err(Error::Domain(format!(
                "uniform grid needs end > start and at least one interval ({start}..{end}, {intervals})"
            )));
        }
        let h = (end - start) / intervals as f64;
        let mut samples: Vec<f64> = (0..=intervals).map(|i| start + h * i as f64).collect();
        samples[intervals] = end;
        Self::new(samples, None)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    /// Step size if the grid is uniform to 1e-9 relative, else `None`.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.samples.len() < 2 {
            return self.period;
        }
        let h = self.samples[1] - self.samples[0];
        let uniform = self
            .samples
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        uniform.then_some(h)
    }
}

/// Trapezoidal integral over one period of a periodic grid.
pub fn integrate_periodic(values: &[f64], grid: &Grid1D) -> Result<f64> {
    let period = grid
        .period()
        .ok_or_else(|| Error::Domain("integrate_periodic needs a periodic grid".into()))?;
    if values.len() != grid.len() {
        return Err(Error::Domain(format!(
            "{} values for a grid of {} samples",
            values.len(),
            grid.len()
        )));
    }
    let x = grid.samples();
    let n = x.len();
    let mut sum = 0.0;
    for i in 0..n {
        let (x_next, f_next) = if i + 1 < n {
            (x[i + 1], values[i + 1])
        } else {
            (x[0] + period, values[0])
        };
        sum += 0.5 * (values[i] + f_next) * (x_next - x[i]);
    }
    Ok(sum)
}

/// State vector usable by [`rk4_step`].
pub trait OdeState: Clone {
    /// `self + h * rate`
    fn add_scaled(&self, h: f64, rate: &Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + h * rate
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Vec<f64> {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self.iter().zip(rate).map(|(y, r)| y + h * r).collect()
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|y| y.is_finite())
    }
}

impl OdeState for Vec<Complex64> {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self.iter().zip(rate).map(|(y, r)| y + r * h).collect()
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|y| y.re.is_finite() && y.im.is_finite())
    }
}

impl OdeState for ComplexMatrix {
    fn add_scaled(&self, h: f64, rate: &Self) -> Self {
        self + rate * Complex64::new(h, 0.0)
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|y| y.re.is_finite() && y.im.is_finite())
    }
}

/// One classical fourth-order Runge-Kutta step.
pub fn rk4_step<S, F>(derivative: &mut F, t: f64, y: &S, h: f64) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let k1 = derivative(t, y);
    let k2 = derivative(t + 0.5 * h, &y.add_scaled(0.5 * h, &k1));
    let k3 = derivative(t + 0.5 * h, &y.add_scaled(0.5 * h, &k2));
    let k4 = derivative(t + h, &y.add_scaled(h, &k3));
    y.add_scaled(h / 6.0, &k1)
        .add_scaled(h / 3.0, &k2)
        .add_scaled(h / 3.0, &k3)
        .add_scaled(h / 6.0, &k4)
}

/// Integrates `dy/dt = derivative(t, y)` with one RK4 step per grid interval.
/// Returns the state at every grid sample, starting with `y0`.
pub fn evolve_rk4<S, F>(mut derivative: F, y0: S, t_grid: &Grid1D) -> Result<Vec<S>>
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    if t_grid.len() > 1 && t_grid.uniform_step().is_none() {
        return Err(Error::Domain("evolve_rk4 needs a uniform time grid".into()));
    }
    if !y0.all_finite() {
        return Err(Error::Divergence { time: t_grid.samples()[0] });
    }
    let ts = t_grid.samples();
    let mut out = Vec::with_capacity(ts.len());
    out.push(y0);
    for w in ts.windows(2) {
        let next = rk4_step(&mut derivative, w[0], out.last().expect("non-empty"), w[1] - w[0]);
        if !next.all_finite() {
            return Err(Error::Divergence { time: w[1] });
        }
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn j0_basics() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!(bessel_j0(2.404826).unwrap().abs() < 1e-6);
        assert_eq!(bessel_j0(-1.3).unwrap(), bessel_j0(1.3).unwrap());
        assert!(matches!(bessel_j0(f64::NAN), Err(Error::Domain(_))));
        assert!(bessel_j0(f64::INFINITY).is_err());
    }

    #[test]
    fn j0_continuous_across_branch_switch() {
        let below = bessel_j0(BESSEL_SERIES_LIMIT).unwrap();
        let above = bessel_j0(BESSEL_SERIES_LIMIT + 1e-12).unwrap();
        assert!((below - above).abs() < 1e-11);
    }

    #[test]
    fn eigh_identity_and_pauli_x() {
        let id = ComplexMatrix::identity(2, 2);
        let e = eigh(&id).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);

        let sx = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let e = eigh(&sx).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        // (1, -1)/sqrt2 up to phase for -1
        let v0 = e.vector(0);
        let overlap = (v0[0] * s - v0[1] * s).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let v1 = e.vector(1);
        assert!(((v1[0] * s + v1[1] * s).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(matches!(eigh(&m), Err(Error::Contract(_))));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eigh(&rect), Err(Error::Contract(_))));
    }

    #[test]
    fn eigh_closed_form_ssh_point() {
        // f(k) = J1 + J2 e^{-ik} at k = pi/2 with M = 1, delta = 0.1
        let (j1, j2) = (0.9, 1.1);
        let f = c(j1, -j2);
        let h = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), f, f.conj(), c(0., 0.)]);
        let e = eigh(&h).unwrap();
        let expect = (2.0f64 * (1.0 + 0.01)).sqrt();
        assert!((e.values[1] - expect).abs() < 1e-12);
        assert!((e.values[0] + expect).abs() < 1e-12);
        assert!((expect - 1.4212670).abs() < 1e-7);
    }

    #[test]
    fn periodic_quadrature() {
        let g = Grid1D::brillouin_zone(64).unwrap();
        let ones = vec![1.0; 64];
        assert!((integrate_periodic(&ones, &g).unwrap() - TAU).abs() < 1e-12);
        let s: Vec<f64> = g.samples().iter().map(|k| k.sin()).collect();
        assert!(integrate_periodic(&s, &g).unwrap().abs() < 1e-12);

        let g = Grid1D::brillouin_zone(1024).unwrap();
        let c2: Vec<f64> = g.samples().iter().map(|k| k.cos().powi(2)).collect();
        assert!((integrate_periodic(&c2, &g).unwrap() - PI).abs() < 1e-10);

        assert!(integrate_periodic(&ones[..10], &g).is_err());
        let open = Grid1D::uniform(0.0, 1.0, 4).unwrap();
        assert!(integrate_periodic(&[1.0; 5], &open).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(vec![0.0, 0.0], None).is_err());
        assert!(Grid1D::new(vec![0.0, 1.0, 0.5], None).is_err());
        assert!(Grid1D::new(vec![0.0, 1.0], Some(0.5)).is_err());
        let g = Grid1D::periodic(0.0, 1.0, 4).unwrap();
        assert_eq!(g.uniform_step(), Some(0.25));
        assert_eq!(g.period(), Some(1.0));
    }

    #[test]
    fn rk4_constant_and_decay() {
        let g = Grid1D::uniform(0.0, 1.0, 1000).unwrap();
        let traj = evolve_rk4(|_, _: &f64| 0.0, 1.0, &g).unwrap();
        assert!(traj.iter().all(|&y| y == 1.0));

        let traj = evolve_rk4(|_, y: &f64| -y, 1.0, &g).unwrap();
        assert!((traj.last().unwrap() - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let err = |n: usize| {
            let g = Grid1D::uniform(0.0, 2.0, n).unwrap();
            let traj = evolve_rk4(|t, y: &f64| -y + t.cos(), 1.0, &g).unwrap();
            // y = (cos t + sin t)/2 + e^{-t}/2
            let exact = (2f64.cos() + 2f64.sin()) / 2.0 + (-2f64).exp() / 2.0;
            (traj.last().unwrap() - exact).abs()
        };
        let ratio = err(50) / err(100);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn rk4_rabi_norm_conservation() {
        // i d/dt psi = (Omega/2) sigma_x psi
        let omega = 1.0;
        let period = TAU / omega;
        let g = Grid1D::uniform(0.0, 10.0 * period, 20_000).unwrap();
        let rhs = |_: f64, psi: &Vec<Complex64>| {
            let mi = c(0.0, -0.5 * omega);
            vec![mi * psi[1], mi * psi[0]]
        };
        let traj = evolve_rk4(rhs, vec![c(1., 0.), c(0., 0.)], &g).unwrap();
        for psi in &traj {
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-9);
        }
        let t_end = 10.0 * period;
        let exact0 = (0.5 * omega * t_end).cos();
        assert!((traj.last().unwrap()[0].re - exact0).abs() < 1e-8);
    }

    #[test]
    fn rk4_reports_divergence_time() {
        let g = Grid1D::uniform(0.0, 10.0, 10).unwrap();
        let err = evolve_rk4(|_, y: &f64| y * y * 1e300, 1.0, &g).unwrap_err();
        match err {
            Error::Divergence { time } => assert!(time > 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}
