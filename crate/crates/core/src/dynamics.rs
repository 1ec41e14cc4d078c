//! Dephasing dynamics in the single-excitation sector.
//!
//! The hopping Hamiltonian and pure dephasing both conserve the number of
//! excited spins, so a state starting with one excitation stays in the span
//! of `|m>` (spin `m` excited, all others in `|g>`). There `sigma_j^z` acts as
//! the diagonal sign `s_j(m) = 2 delta_jm - 1`, and
//! `D[sigma_j^z] rho = sigma_j^z rho sigma_j^z - rho`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice1d::{midgap_pair, open_chain_hamiltonian, SSHChain};
use crate::numerics::{eigh, hermitian_defect, max_abs, ComplexMatrix, Grid1D};

pub const HERMITIAN_STATE_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Trace drift that aborts an integration.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;
const PEAK_ENTER: f64 = 0.5;
const PEAK_EXIT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationDensityMatrix {
    rho: ComplexMatrix,
}

impl ExcitationDensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::Domain(format!(
                "density matrix must be square and non-empty, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let defect = hermitian_defect(&rho);
        if defect > HERMITIAN_STATE_TOL {
            return Err(Error::Domain(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Domain(format!("density matrix trace {tr} != 1")));
        }
        let sym = (&rho + rho.adjoint()).scale(0.5);
        let lowest = eigh(&sym)?.values[0];
        if lowest < -POSITIVITY_TOL {
            return Err(Error::Domain(format!("density matrix has eigenvalue {lowest:.3e} < 0")));
        }
        Ok(Self { rho })
    }

    /// `|m><m|` with the excitation on spin `site` (0-based).
    pub fn site(dim: usize, site: usize) -> Result<Self> {
        if site >= dim {
            return Err(Error::Domain(format!("site {site} outside dimension {dim}")));
        }
        let mut rho = ComplexMatrix::zeros(dim, dim);
        rho[(site, site)] = Complex64::new(1.0, 0.0);
        Ok(Self { rho })
    }

    /// `|psi><psi|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::Domain(format!("state norm {norm} != 1")));
        }
        let n = amplitudes.len();
        Self::new(ComplexMatrix::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj()))
    }

    /// Skips validation; used for states produced by the integrator.
    fn from_trusted(rho: ComplexMatrix) -> Self {
        Self { rho }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).collect()
    }

    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseSpec {
    /// Per-spin dephasing rate, rad/s.
    pub gamma_s: f64,
}

impl NoiseSpec {
    pub fn new(gamma_s: f64) -> Result<Self> {
        if !(gamma_s.is_finite() && gamma_s >= 0.0) {
            return Err(Error::Domain(format!("gamma_s must be finite and >= 0, got {gamma_s}")));
        }
        Ok(Self { gamma_s })
    }

    pub fn noiseless() -> Self {
        Self { gamma_s: 0.0 }
    }
}

/// `Sum_j (s_j(m) s_j(n) - 1)`: the dephasing superoperator in the site basis
/// is elementwise multiplication by `gamma_s` times this matrix.
pub fn dephasing_factors(dim: usize) -> Vec<f64> {
    let sign = |j: usize, m: usize| if j == m { 1.0 } else { -1.0 };
    let mut out = vec![0.0; dim * dim];
    for m in 0..dim {
        for n in 0..dim {
            out[m * dim + n] = (0..dim).map(|j| sign(j, m) * sign(j, n) - 1.0).sum();
        }
    }
    out
}

struct Liouvillian {
    dim: usize,
    h: Vec<Complex64>,
    dephasing: Vec<f64>,
    gamma: f64,
}

impl Liouvillian {
    /// Writes `L(rho)` into `out`. Both are Hermitian, so only the upper
    /// triangle is computed.
    fn apply_into(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                let mut comm = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    comm += self.h[i * n + k] * rho[k * n + j] - rho[i * n + k] * self.h[k * n + j];
                }
                // -i [H, rho]
                let v = Complex64::new(comm.im, -comm.re)
                    + rho[i * n + j] * (self.gamma * self.dephasing[i * n + j]);
                out[i * n + j] = v;
                out[j * n + i] = v.conj();
            }
        }
    }
}

/// Classical RK4 with preallocated stages.
struct Rk4Workspace {
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl Rk4Workspace {
    fn new(len: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); len];
        Self { k: [z.clone(), z.clone(), z.clone(), z.clone()], tmp: z }
    }

    fn step(&mut self, op: &Liouvillian, y: &mut [Complex64], h: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        op.apply_into(y, k1);
        for ((t, &y), &k) in tmp.iter_mut().zip(y.iter()).zip(k1.iter()) {
            *t = y + k * (0.5 * h);
        }
        op.apply_into(tmp, k2);
        for ((t, &y), &k) in tmp.iter_mut().zip(y.iter()).zip(k2.iter()) {
            *t = y + k * (0.5 * h);
        }
        op.apply_into(tmp, k3);
        for ((t, &y), &k) in tmp.iter_mut().zip(y.iter()).zip(k3.iter()) {
            *t = y + k * h;
        }
        op.apply_into(tmp, k4);
        let c = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * c;
        }
    }
}

fn to_row_major(m: &ComplexMatrix) -> Vec<Complex64> {
    let n = m.nrows();
    (0..n * n).map(|idx| m[(idx / n, idx % n)]).collect()
}

fn from_row_major(v: &[Complex64], n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| v[i * n + j])
}

/// Step bound per unit of the hopping scale. RK4 is not positivity
/// preserving: at `h = 0.001 / M` the lowest eigenvalue of an evolved pure
/// state on a six-spin chain drifts by about `3e-13` per unit time.
pub const STEP_PER_HOPPING: f64 = 0.001;

/// Default step: `STEP_PER_HOPPING / max|H_ij|`, capped at `0.1 / gamma_s`.
pub fn default_step(h: &ComplexMatrix, noise: &NoiseSpec) -> f64 {
    let scale = max_abs(h);
    let mut step = if scale > 0.0 { STEP_PER_HOPPING / scale } else { f64::INFINITY };
    if noise.gamma_s > 0.0 {
        step = step.min(0.1 / noise.gamma_s);
    }
    if step.is_finite() {
        step
    } else {
        1.0
    }
}

/// Integrates the dephasing master equation, returning the state at every
/// sample of `t_grid` (the first sample is `rho0`).
pub fn lindblad_evolve(
    h: &ComplexMatrix,
    rho0: &ExcitationDensityMatrix,
    noise: &NoiseSpec,
    t_grid: &Grid1D,
) -> Result<Vec<ExcitationDensityMatrix>> {
    lindblad_evolve_with_step(h, rho0, noise, t_grid, default_step(h, noise))
}

/// As [`lindblad_evolve`] with an explicit upper bound on the RK4 step. Each
/// output interval is split into equal sub-steps no longer than `max_step`.
pub fn lindblad_evolve_with_step(
    h: &ComplexMatrix,
    rho0: &ExcitationDensityMatrix,
    noise: &NoiseSpec,
    t_grid: &Grid1D,
    max_step: f64,
) -> Result<Vec<ExcitationDensityMatrix>> {
    let n = rho0.dim();
    if h.nrows() != n || h.ncols() != n {
        return Err(Error::Domain(format!(
            "Hamiltonian is {}x{} but the state has dimension {n}",
            h.nrows(),
            h.ncols()
        )));
    }
    let defect = hermitian_defect(h);
    if defect > 1e-12 * max_abs(h).max(f64::MIN_POSITIVE) {
        return Err(Error::Contract(format!("Hamiltonian not Hermitian (defect {defect:.3e})")));
    }
    NoiseSpec::new(noise.gamma_s)?;
    if !(max_step > 0.0 && max_step.is_finite()) {
        return Err(Error::Domain(format!("step must be > 0, got {max_step}")));
    }
    let op = Liouvillian {
        dim: n,
        h: to_row_major(h),
        dephasing: dephasing_factors(n),
        gamma: noise.gamma_s,
    };
    let mut work = Rk4Workspace::new(n * n);

    let ts = t_grid.samples();
    let mut out = Vec::with_capacity(ts.len());
    let mut y = to_row_major(rho0.matrix());
    out.push(rho0.clone());
    for w in ts.windows(2) {
        let dt = w[1] - w[0];
        let sub = (dt / max_step).ceil().max(1.0) as usize;
        let hstep = dt / sub as f64;
        for _ in 0..sub {
            work.step(&op, &mut y, hstep);
        }
        if y.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Divergence { time: w[1] });
        }
        let trace: Complex64 = (0..n).map(|i| y[i * n + i]).sum();
        let drift = (trace - Complex64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::IntegratorFailure { drift, time: w[1] });
        }
        out.push(ExcitationDensityMatrix::from_trusted(from_row_major(&y, n)));
    }
    Ok(out)
}

/// Step used by [`transfer_experiment`]: `min(STEP_PER_HOPPING / M_eff, 0.1 / gamma_s)`.
pub fn transfer_step(chain: &SSHChain, noise: &NoiseSpec) -> f64 {
    let mut step = STEP_PER_HOPPING / chain.m_eff();
    if noise.gamma_s > 0.0 {
        step = step.min(0.1 / noise.gamma_s);
    }
    step
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferTable {
    pub times: Vec<f64>,
    /// `populations[i][m]`: population of spin `m` (0-based) at `times[i]`.
    pub populations: Vec<Vec<f64>>,
}

impl TransferTable {
    pub fn site_series(&self, site: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[site]).collect()
    }

    pub fn first_site(&self) -> Vec<f64> {
        self.site_series(0)
    }

    pub fn last_site(&self) -> Vec<f64> {
        let last = self.populations[0].len() - 1;
        self.site_series(last)
    }
}

fn transfer_grid(t_max: f64, n_steps: usize) -> Result<Grid1D> {
    if !(t_max > 0.0 && t_max.is_finite()) || n_steps == 0 {
        return Err(Error::Domain(format!(
            "transfer needs t_max > 0 and n_steps > 0 (t_max = {t_max}, n_steps = {n_steps})"
        )));
    }
    Grid1D::uniform(0.0, t_max, n_steps)
}

/// Density-matrix trajectory of the open chain starting from `|1_A>`.
pub fn transfer_trajectory(
    chain: &SSHChain,
    noise: &NoiseSpec,
    t_max: f64,
    n_steps: usize,
) -> Result<(Vec<f64>, Vec<ExcitationDensityMatrix>)> {
    let grid = transfer_grid(t_max, n_steps)?;
    let h = open_chain_hamiltonian(chain).map(|x| Complex64::new(x, 0.0));
    let rho0 = ExcitationDensityMatrix::site(chain.n_spins(), 0)?;
    let states = lindblad_evolve_with_step(&h, &rho0, noise, &grid, transfer_step(chain, noise))?;
    Ok((grid.samples().to_vec(), states))
}

/// Site populations over time, starting from an excitation on spin 1.
pub fn transfer_experiment(
    chain: &SSHChain,
    noise: &NoiseSpec,
    t_max: f64,
    n_steps: usize,
) -> Result<TransferTable> {
    let (times, states) = transfer_trajectory(chain, noise, t_max, n_steps)?;
    Ok(TransferTable { times, populations: states.iter().map(|s| s.populations()).collect() })
}

fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sym = (m + m.adjoint()).scale(0.5);
    let e = eigh(&sym)?;
    let n = m.nrows();
    // eigenvalues within rounding of zero are zero
    let floor = n as f64 * f64::EPSILON * e.values.last().copied().unwrap_or(0.0).abs();
    let roots: Vec<f64> = e.values.iter().map(|&v| if v > floor { v.sqrt() } else { 0.0 }).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| e.vectors[(i, k)] * e.vectors[(j, k)].conj() * roots[k])
            .sum()
    }))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, evaluated as the
/// squared trace norm of `sqrt(rho) sqrt(sigma)`.
pub fn fidelity(rho: &ExcitationDensityMatrix, sigma: &ExcitationDensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Domain(format!(
            "fidelity of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let product = psd_sqrt(rho.matrix())? * psd_sqrt(sigma.matrix())?;
    let trace_norm: f64 = product.singular_values().iter().sum();
    Ok((trace_norm * trace_norm).clamp(0.0, 1.0))
}

/// Fidelity of every state in `states` with `target`.
pub fn fidelity_series(
    states: &[ExcitationDensityMatrix],
    target: &ExcitationDensityMatrix,
) -> Result<Vec<f64>> {
    states.iter().map(|s| fidelity(s, target)).collect()
}

/// Peak of the first transfer: the maximum over the first excursion of the
/// series above one half, where an excursion ends once the series falls back
/// below one quarter. Falls back to the global maximum if the series never
/// exceeds one half. Returns `(time, value)`.
pub fn first_transfer_peak(times: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if times.len() != values.len() || times.is_empty() {
        return Err(Error::Domain("peak search needs equally long, non-empty series".into()));
    }
    let window = match values.iter().position(|&v| v > PEAK_ENTER) {
        Some(start) => {
            let end = values[start..]
                .iter()
                .position(|&v| v < PEAK_EXIT)
                .map_or(values.len(), |off| start + off);
            start..end
        }
        None => 0..values.len(),
    };
    let best = window
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty window");
    Ok((times[best], values[best]))
}

/// Period of the dominant sinusoid in a sampled series, found by a
/// least-squares fit of `a + b cos(w t) + c sin(w t)` over `w`. Periods
/// between `span/20` and `2 span` are considered.
pub fn oscillation_period(times: &[f64], values: &[f64]) -> Result<f64> {
    if times.len() != values.len() || times.len() < 8 {
        return Err(Error::Domain("period fit needs at least 8 paired samples".into()));
    }
    let span = times[times.len() - 1] - times[0];
    if !(span > 0.0) {
        return Err(Error::Domain("period fit needs a positive time span".into()));
    }
    let residual = |w: f64| -> f64 {
        let mut ata = Matrix3::<f64>::zeros();
        let mut atb = Vector3::<f64>::zeros();
        for (&t, &y) in times.iter().zip(values) {
            let row = Vector3::new(1.0, (w * t).cos(), (w * t).sin());
            ata += row * row.transpose();
            atb += row * y;
        }
        match ata.cholesky() {
            Some(ch) => {
                let coef = ch.solve(&atb);
                times
                    .iter()
                    .zip(values)
                    .map(|(&t, &y)| {
                        let fit = coef[0] + coef[1] * (w * t).cos() + coef[2] * (w * t).sin();
                        (y - fit).powi(2)
                    })
                    .sum()
            }
            None => f64::INFINITY,
        }
    };
    let (w_lo, w_hi) = (std::f64::consts::PI / span, 40.0 * std::f64::consts::PI / span);
    let n_scan = 800;
    let ratio = (w_hi / w_lo).powf(1.0 / (n_scan - 1) as f64);
    let scan: Vec<(f64, f64)> = (0..n_scan)
        .map(|i| {
            let w = w_lo * ratio.powi(i as i32);
            (w, residual(w))
        })
        .collect();
    let best = (0..n_scan).min_by(|&a, &b| scan[a].1.total_cmp(&scan[b].1)).expect("scan");
    let mut a = scan[best.saturating_sub(1)].0;
    let mut b = scan[(best + 1).min(n_scan - 1)].0;
    // golden-section refinement
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (residual(c), residual(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = residual(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = residual(d);
        }
        if (b - a).abs() < 1e-14 * b {
            break;
        }
    }
    Ok(std::f64::consts::TAU / (0.5 * (a + b)))
}

/// Two-edge-state description of the transfer: `|1_A>` and `|N_B>` are the
/// even and odd combinations of the midgap pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoLevelApproximation {
    pub e_plus: f64,
    pub e_minus: f64,
    /// `E_+ - E_-`.
    pub omega0: f64,
}

impl TwoLevelApproximation {
    /// `(1 + cos w0 t) / 2`
    pub fn first_site(&self, t: f64) -> f64 {
        0.5 * (1.0 + (self.omega0 * t).cos())
    }

    /// `(1 - cos w0 t) / 2`
    pub fn last_site(&self, t: f64) -> f64 {
        0.5 * (1.0 - (self.omega0 * t).cos())
    }

    /// Full revival period `2 pi / w0`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega0
    }
}

pub fn two_level_approximation(chain: &SSHChain) -> Result<TwoLevelApproximation> {
    let delta = chain.delta();
    if delta <= 0.0 {
        return Err(Error::NotTopological { delta });
    }
    let (lo, hi) = midgap_pair(chain)?;
    Ok(TwoLevelApproximation { e_plus: hi.energy, e_minus: lo.energy, omega0: hi.energy - lo.energy })
}
