//! One-dimensional SSH chain.
//!
//! Spins `(2n-1, 2n)` form cell `n` (sites A_n, B_n) joined by the intracell
//! hopping `J1`; cells are joined by `J2`. `delta = (J2 - J1)/(J2 + J1) > 0`
//! is the topological phase.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::driving::StaggeredCouplings;
use crate::error::{Error, Result};
use crate::numerics::{eigh_real, ComplexMatrix, Grid1D, RealMatrix};

/// Default midgap tolerance relative to `M_eff`.
pub const DEFAULT_EDGE_TOL: f64 = 1e-6;
/// Largest accepted `|raw - round(raw)|` for the winding number.
pub const WINDING_RESIDUAL_TOL: f64 = 1e-6;
/// Smallest k-grid accepted by [`winding_number`].
pub const MIN_WINDING_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SSHChain {
    /// Unit cells; the chain has `2 * n_cells` spins.
    pub n_cells: usize,
    pub j1: f64,
    pub j2: f64,
}

impl SSHChain {
    pub fn new(n_cells: usize, j1: f64, j2: f64) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::Domain("chain needs at least one unit cell".into()));
        }
        if !(j1.is_finite() && j2.is_finite() && j1 > 0.0 && j2 > 0.0) {
            return Err(Error::Domain(format!(
                "hoppings must be finite and > 0 (J1 = {j1}, J2 = {j2}); |delta| < 1 required"
            )));
        }
        Ok(Self { n_cells, j1, j2 })
    }

    /// `J1 = M(1 - delta)`, `J2 = M(1 + delta)`.
    pub fn from_delta(n_cells: usize, m_eff: f64, delta: f64) -> Result<Self> {
        let s = StaggeredCouplings::from_delta(m_eff, delta);
        Self::new(n_cells, s.j1, s.j2)
    }

    pub fn from_couplings(n_cells: usize, couplings: &StaggeredCouplings) -> Result<Self> {
        Self::new(n_cells, couplings.j1, couplings.j2)
    }

    pub fn delta(&self) -> f64 {
        (self.j2 - self.j1) / (self.j2 + self.j1)
    }

    pub fn m_eff(&self) -> f64 {
        0.5 * (self.j1 + self.j2)
    }

    pub fn n_spins(&self) -> usize {
        2 * self.n_cells
    }

    /// Same chain with `J1` and `J2` exchanged.
    pub fn swapped(&self) -> Self {
        Self { j1: self.j2, j2: self.j1, ..*self }
    }

    fn gap_is_closed(&self) -> bool {
        (self.j1 - self.j2).abs() <= 1e-12 * (self.j1 + self.j2)
    }
}

/// Bloch vector; `H(k) = dx sigma_x + dy sigma_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

pub fn d_vector(chain: &SSHChain, k: f64) -> DVector {
    DVector { dx: chain.j1 + chain.j2 * k.cos(), dy: chain.j2 * k.sin(), dz: 0.0 }
}

/// `f(k) = J1 + J2 e^{-ik}`.
pub fn off_diagonal(chain: &SSHChain, k: f64) -> Complex64 {
    Complex64::new(chain.j1, 0.0) + Complex64::from_polar(chain.j2, -k)
}

/// 2x2 Bloch Hamiltonian in the (A, B) basis.
pub fn bloch_hamiltonian(chain: &SSHChain, k: f64) -> ComplexMatrix {
    let f = off_diagonal(chain, k);
    let zero = Complex64::new(0.0, 0.0);
    ComplexMatrix::from_row_slice(2, 2, &[zero, f, f.conj(), zero])
}

/// `(E_-, E_+) = (-|f(k)|, +|f(k)|)`.
pub fn dispersion(chain: &SSHChain, k: f64) -> (f64, f64) {
    let e = off_diagonal(chain, k).norm();
    (-e, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandGap {
    /// `min_k E_+ = |J1 - J2| = 2 M_eff |delta|`.
    pub half_gap: f64,
    /// Separation of the two bands, `2 * half_gap`.
    pub full_gap: f64,
    /// Where the gap is smallest.
    pub k_min: f64,
}

pub fn band_gap(chain: &SSHChain) -> BandGap {
    let half = (chain.j1 - chain.j2).abs();
    BandGap { half_gap: half, full_gap: 2.0 * half, k_min: PI }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingEstimate {
    pub raw: f64,
    pub winding: i64,
    pub residual: f64,
    pub n_k: usize,
}

/// Raw winding of a closed, sampled planar curve around the origin.
///
/// The integrand `n_x dn_y - n_y dn_x` is integrated exactly along the
/// great-circle interpolation between neighbouring samples, i.e. each
/// interval contributes the signed angle from `n_j` to `n_{j+1}`. Intervals
/// turning by more than `pi/2` are undersampled and rejected.
pub fn winding_of_samples(points: &[(f64, f64)]) -> Result<f64> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Domain("winding needs at least three samples".into()));
    }
    let mut total = 0.0;
    for j in 0..n {
        let (ax, ay) = points[j];
        let (bx, by) = points[(j + 1) % n];
        if ax.hypot(ay) == 0.0 || bx.hypot(by) == 0.0 {
            return Err(Error::GapClosed);
        }
        let step = (ax * by - ay * bx).atan2(ax * bx + ay * by);
        if step.abs() > 0.5 * PI {
            return Err(Error::Resolution { residual: step.abs() / TAU, n_k: n });
        }
        total += step;
    }
    Ok(total / TAU)
}

/// Winding of the Bloch vector over `k in [0, 2pi)` sampled at `n_k` points.
pub fn winding_estimate(chain: &SSHChain, n_k: usize) -> Result<WindingEstimate> {
    if chain.gap_is_closed() {
        return Err(Error::GapClosed);
    }
    if n_k < MIN_WINDING_GRID {
        return Err(Error::Domain(format!(
            "winding needs n_k >= {MIN_WINDING_GRID}, got {n_k}"
        )));
    }
    let grid = Grid1D::brillouin_zone(n_k)?;
    let points: Vec<(f64, f64)> = grid
        .samples()
        .iter()
        .map(|&k| {
            let d = d_vector(chain, k);
            (d.dx, d.dy)
        })
        .collect();
    let raw = winding_of_samples(&points)?;
    let winding = raw.round();
    let residual = (raw - winding).abs();
    if residual >= WINDING_RESIDUAL_TOL {
        return Err(Error::Resolution { residual, n_k });
    }
    Ok(WindingEstimate { raw, winding: winding as i64, residual, n_k })
}

pub fn winding_number(chain: &SSHChain, n_k: usize) -> Result<i64> {
    winding_estimate(chain, n_k).map(|w| w.winding)
}

/// Single-excitation hopping matrix of the open chain: alternating
/// `J1, J2, J1, ...` on the off-diagonals.
pub fn open_chain_hamiltonian(chain: &SSHChain) -> RealMatrix {
    let n = chain.n_spins();
    let mut h = DMatrix::zeros(n, n);
    for s in 0..n - 1 {
        let j = if s % 2 == 0 { chain.j1 } else { chain.j2 };
        h[(s, s + 1)] = j;
        h[(s + 1, s)] = j;
    }
    h
}

/// Midgap eigenstate of the open chain, amplitudes indexed by spin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeState {
    pub energy: f64,
    pub amplitudes: Vec<f64>,
}

impl EdgeState {
    /// Weight on odd spins (sublattice A).
    pub fn weight_a(&self) -> f64 {
        self.amplitudes.iter().step_by(2).map(|a| a * a).sum()
    }

    /// Weight on even spins (sublattice B).
    pub fn weight_b(&self) -> f64 {
        self.amplitudes.iter().skip(1).step_by(2).map(|a| a * a).sum()
    }
}

fn normalize_sign(v: &mut [f64]) {
    let pivot = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn expectation(h: &RealMatrix, v: &[f64]) -> f64 {
    let n = v.len();
    let mut e = 0.0;
    for i in 0..n {
        for j in 0..n {
            e += v[i] * h[(i, j)] * v[j];
        }
    }
    e
}

/// Eigenstates of the open chain with `|E| < energy_tol`.
///
/// When exactly two states are found and they are degenerate to numerical
/// precision, they are rotated into eigenstates of the chiral operator so the
/// first is the left (A-sublattice) edge state and the second the right
/// (B-sublattice) one. A pair split by finite-size hybridization is returned
/// as the eigenstates themselves, ordered by energy.
pub fn edge_states(chain: &SSHChain, energy_tol: f64) -> Result<Vec<EdgeState>> {
    let h = open_chain_hamiltonian(chain);
    let dec = eigh_real(&h)?;
    let picked: Vec<usize> = (0..dec.values.len())
        .filter(|&i| dec.values[i].abs() < energy_tol)
        .collect();
    let column = |i: usize| -> Vec<f64> { dec.vectors.column(i).iter().copied().collect() };

    let degenerate_pair = picked.len() == 2
        && (dec.values[picked[0]] - dec.values[picked[1]]).abs() <= 1e-10 * chain.m_eff();
    if !degenerate_pair {
        return Ok(picked
            .into_iter()
            .map(|i| {
                let mut amplitudes = column(i);
                normalize_sign(&mut amplitudes);
                EdgeState { energy: dec.values[i], amplitudes }
            })
            .collect());
    }

    let (u, v) = (column(picked[0]), column(picked[1]));
    // Chiral operator restricted to span{u, v}.
    let gamma = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(s, (x, y))| if s % 2 == 0 { x * y } else { -x * y })
            .sum()
    };
    let (guu, guv, gvv) = (gamma(&u, &u), gamma(&u, &v), gamma(&v, &v));
    // Eigenvector of [[guu, guv], [guv, gvv]] with the larger eigenvalue.
    let theta = 0.5 * (2.0 * guv).atan2(guu - gvv);
    let (c, s) = (theta.cos(), theta.sin());
    let mut left: Vec<f64> = u.iter().zip(&v).map(|(a, b)| c * a + s * b).collect();
    let mut right: Vec<f64> = u.iter().zip(&v).map(|(a, b)| -s * a + c * b).collect();
    normalize_sign(&mut left);
    normalize_sign(&mut right);
    Ok(vec![
        EdgeState { energy: expectation(&h, &left), amplitudes: left },
        EdgeState { energy: expectation(&h, &right), amplitudes: right },
    ])
}

/// The two eigenstates closest to zero energy, ordered `(E_-, E_+)`.
pub fn midgap_pair(chain: &SSHChain) -> Result<(EdgeState, EdgeState)> {
    if chain.n_spins() < 2 {
        return Err(Error::Domain("midgap pair needs at least two spins".into()));
    }
    let dec = eigh_real(&open_chain_hamiltonian(chain))?;
    let mut idx: Vec<usize> = (0..dec.values.len()).collect();
    idx.sort_by(|&a, &b| dec.values[a].abs().total_cmp(&dec.values[b].abs()));
    let (mut a, mut b) = (idx[0], idx[1]);
    if dec.values[a] > dec.values[b] {
        std::mem::swap(&mut a, &mut b);
    }
    let state = |i: usize| {
        let mut amplitudes: Vec<f64> = dec.vectors.column(i).iter().copied().collect();
        normalize_sign(&mut amplitudes);
        EdgeState { energy: dec.values[i], amplitudes }
    };
    Ok((state(a), state(b)))
}

/// Decay length `1 / |ln(J1/J2)|` of the edge states, in unit cells.
pub fn localization_length(j1: f64, j2: f64) -> Result<f64> {
    if !(j1 > 0.0 && j2 > 0.0 && j1.is_finite() && j2.is_finite()) {
        return Err(Error::Domain(format!("hoppings must be > 0 (J1 = {j1}, J2 = {j2})")));
    }
    let (lo, hi) = if j1 <= j2 { (j1, j2) } else { (j2, j1) };
    let rate = (hi / lo).ln();
    if rate == 0.0 {
        return Err(Error::DivergentLength);
    }
    Ok(1.0 / rate)
}

/// Chiral operator `diag(+1, -1, +1, ...)`.
pub fn chiral_operator(n_spins: usize) -> Result<RealMatrix> {
    if n_spins == 0 || n_spins % 2 == 1 {
        return Err(Error::Domain(format!("need an even, non-zero spin count, got {n_spins}")));
    }
    Ok(RealMatrix::from_diagonal(&nalgebra::DVector::from_fn(n_spins, |i, _| {
        if i % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    })))
}

/// `(P_A, P_B) = ((I + Gamma)/2, (I - Gamma)/2)`.
pub fn chiral_projectors(n_spins: usize) -> Result<(RealMatrix, RealMatrix)> {
    let gamma = chiral_operator(n_spins)?;
    let id = RealMatrix::identity(n_spins, n_spins);
    Ok(((&id + &gamma) * 0.5, (&id - &gamma) * 0.5))
}
