//! Two-dimensional SSH lattice: four spins (A, B, C, D) per square cell,
//! `J1` inside the cell and `J2` between cells on both axes.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector as CVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice1d::SSHChain;
use crate::numerics::{eigh, ComplexMatrix, RealMatrix};

/// Minimum gap, relative to `M_eff`, for a band to count as isolated.
pub const ISOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SSHLattice2D {
    /// Cells per side; the lattice has `2N x 2N` spins.
    pub n_cells: usize,
    pub j1: f64,
    pub j2: f64,
}

impl SSHLattice2D {
    pub fn new(n_cells: usize, j1: f64, j2: f64) -> Result<Self> {
        // Same constraints as the chain.
        SSHChain::new(n_cells, j1, j2)?;
        Ok(Self { n_cells, j1, j2 })
    }

    pub fn from_delta(n_cells: usize, m_eff: f64, delta: f64) -> Result<Self> {
        let c = SSHChain::from_delta(n_cells, m_eff, delta)?;
        Self::new(n_cells, c.j1, c.j2)
    }

    pub fn delta(&self) -> f64 {
        (self.j2 - self.j1) / (self.j2 + self.j1)
    }

    pub fn m_eff(&self) -> f64 {
        0.5 * (self.j1 + self.j2)
    }

    pub fn swapped(&self) -> Self {
        Self { j1: self.j2, j2: self.j1, ..*self }
    }

    pub fn side(&self) -> usize {
        2 * self.n_cells
    }

    fn f(&self, k: f64) -> Complex64 {
        Complex64::new(self.j1, 0.0) + Complex64::from_polar(self.j2, -k)
    }
}

/// 4x4 Bloch Hamiltonian in the basis (A, B, C, D); A-B and C-D are the x
/// bonds, A-C and B-D the y bonds.
pub fn bloch_hamiltonian_2d(lattice: &SSHLattice2D, k: (f64, f64)) -> ComplexMatrix {
    let (fx, fy) = (lattice.f(k.0), lattice.f(k.1));
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let entries = [
        z,         fx,        fy,        z,
        fx.conj(), z,         z,         fy,
        fy.conj(), z,         z,         fx,
        z,         fy.conj(), fx.conj(), z,
    ];
    ComplexMatrix::from_row_slice(4, 4, &entries)
}

/// The four band energies `+-|f(kx)| +- |f(ky)|`, ascending.
pub fn dispersion_2d(lattice: &SSHLattice2D, k: (f64, f64)) -> [f64; 4] {
    let (ax, ay) = (lattice.f(k.0).norm(), lattice.f(k.1).norm());
    let mut e = [-ax - ay, -ax + ay, ax - ay, ax + ay];
    e.sort_by(f64::total_cmp);
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HighSymmetryPoint {
    Gamma,
    X,
    M,
}

impl HighSymmetryPoint {
    pub fn coords(self) -> (f64, f64) {
        match self {
            Self::Gamma => (0.0, 0.0),
            Self::X => (PI, 0.0),
            Self::M => (PI, PI),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Gamma => "G",
            Self::X => "X",
            Self::M => "M",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BZPath {
    vertices: Vec<HighSymmetryPoint>,
    samples_per_segment: usize,
}

impl BZPath {
    pub fn new(vertices: Vec<HighSymmetryPoint>, samples_per_segment: usize) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Domain("a path needs at least two vertices".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("consecutive path vertices must differ".into()));
        }
        if samples_per_segment < 2 {
            return Err(Error::Domain("samples_per_segment must be >= 2".into()));
        }
        Ok(Self { vertices, samples_per_segment })
    }

    /// M -> Gamma -> X -> M.
    pub fn standard(samples_per_segment: usize) -> Result<Self> {
        use HighSymmetryPoint::*;
        Self::new(vec![M, Gamma, X, M], samples_per_segment)
    }

    pub fn vertices(&self) -> &[HighSymmetryPoint] {
        &self.vertices
    }

    /// `(arc length, k)` samples; vertices shared by two segments appear once.
    pub fn points(&self) -> Vec<(f64, (f64, f64))> {
        let s = self.samples_per_segment;
        let mut out = Vec::new();
        let mut arc = 0.0;
        for (seg, w) in self.vertices.windows(2).enumerate() {
            let (a, b) = (w[0].coords(), w[1].coords());
            let len = (b.0 - a.0).hypot(b.1 - a.1);
            let start = if seg == 0 { 0 } else { 1 };
            for i in start..s {
                let t = i as f64 / (s - 1) as f64;
                out.push((arc + t * len, (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1))));
            }
            arc += len;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    pub arc_length: f64,
    pub k: (f64, f64),
    pub energies: [f64; 4],
}

pub fn path_dispersion(lattice: &SSHLattice2D, path: &BZPath) -> Vec<PathSample> {
    path.points()
        .into_iter()
        .map(|(arc_length, k)| PathSample { arc_length, k, energies: dispersion_2d(lattice, k) })
        .collect()
}

/// Polarization (Zak phase / 2pi) along x and y, each in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZakVector {
    pub px: f64,
    pub py: f64,
}

fn occupied_states(
    lattice: &SSHLattice2D,
    k: (f64, f64),
    bands: std::ops::Range<usize>,
    gauge: f64,
) -> Result<Vec<CVector<Complex64>>> {
    let e = eigh(&bloch_hamiltonian_2d(lattice, k))?;
    let tol = ISOLATION_TOL * lattice.m_eff();
    // (band, neighbour it must stay apart from)
    let below = bands.start.checked_sub(1).map(|i| (bands.start, i));
    let above = (bands.end < 4).then_some((bands.end - 1, bands.end));
    for (inside, outside) in [below, above].into_iter().flatten() {
        let gap = (e.values[inside] - e.values[outside]).abs();
        if gap <= tol {
            return Err(Error::Degeneracy {
                band: inside,
                detail: format!("touches band {outside} (gap {gap:.3e}) at k = ({:.6}, {:.6})", k.0, k.1),
            });
        }
    }
    let phase = Complex64::from_polar(1.0, gauge);
    Ok(bands.map(|b| e.vector(b) * phase).collect())
}

/// Berry phase of a closed discretized loop: `-arg prod det <u_i|u_{i+1}>`.
fn wilson_phase(states: &[Vec<CVector<Complex64>>]) -> f64 {
    let n = states.len();
    let m = states[0].len();
    let mut product = Complex64::new(1.0, 0.0);
    for i in 0..n {
        let (a, b) = (&states[i], &states[(i + 1) % n]);
        let overlap = ComplexMatrix::from_fn(m, m, |r, c| a[r].dotc(&b[c]));
        let det = overlap.determinant();
        product *= det / det.norm();
    }
    -product.arg()
}

fn to_unit_interval(phase: f64) -> f64 {
    let p = (phase / TAU).rem_euclid(1.0);
    if 1.0 - p < 1e-9 {
        0.0
    } else {
        p
    }
}

/// Circular mean of phases.
fn mean_phase(phases: &[f64]) -> f64 {
    let (s, c) = phases.iter().fold((0.0, 0.0), |(s, c), p| (s + p.sin(), c + p.cos()));
    s.atan2(c)
}

/// Wilson-loop polarization of bands `bands` with a k-dependent gauge phase
/// applied to every eigenvector. The result does not depend on the gauge.
pub fn zak_vector_gauged<G>(
    lattice: &SSHLattice2D,
    bands: std::ops::Range<usize>,
    n_k: usize,
    gauge: G,
) -> Result<ZakVector>
where
    G: Fn(f64, f64) -> f64,
{
    if bands.is_empty() || bands.end > 4 {
        return Err(Error::Domain(format!("band range {bands:?} outside 0..4")));
    }
    if n_k < 4 {
        return Err(Error::Domain(format!("n_k must be >= 4, got {n_k}")));
    }
    if (lattice.j1 - lattice.j2).abs() <= 1e-12 * (lattice.j1 + lattice.j2) {
        return Err(Error::GapClosed);
    }
    let ks: Vec<f64> = (0..n_k).map(|i| TAU * i as f64 / n_k as f64).collect();
    // grid[iy][ix]
    let mut grid = Vec::with_capacity(n_k);
    for &ky in &ks {
        let row = ks
            .iter()
            .map(|&kx| occupied_states(lattice, (kx, ky), bands.clone(), gauge(kx, ky)))
            .collect::<Result<Vec<_>>>()?;
        grid.push(row);
    }
    let x_phases: Vec<f64> = grid.iter().map(|row| wilson_phase(row)).collect();
    let y_phases: Vec<f64> = (0..n_k)
        .map(|ix| {
            let column: Vec<_> = grid.iter().map(|row| row[ix].clone()).collect();
            wilson_phase(&column)
        })
        .collect();
    Ok(ZakVector {
        px: to_unit_interval(mean_phase(&x_phases)),
        py: to_unit_interval(mean_phase(&y_phases)),
    })
}

/// Polarization of a single band (default: the lowest, index 0).
pub fn zak_vector(lattice: &SSHLattice2D, band: usize, n_k: usize) -> Result<ZakVector> {
    zak_vector_gauged(lattice, band..band + 1, n_k, |_, _| 0.0)
}

/// Site index of spin `(j, l)` (1-based x and y positions) on the open lattice.
pub fn site_index(lattice: &SSHLattice2D, j: usize, l: usize) -> usize {
    (l - 1) * lattice.side() + (j - 1)
}

/// Single-excitation hopping matrix of the open `2N x 2N` array; bond
/// `(j, j+1)` along either axis carries `J1` for odd `j` and `J2` for even `j`.
pub fn open_lattice_hamiltonian_2d(lattice: &SSHLattice2D) -> RealMatrix {
    let side = lattice.side();
    let n = side * side;
    let mut h = RealMatrix::zeros(n, n);
    let hop = |j: usize| if j % 2 == 1 { lattice.j1 } else { lattice.j2 };
    for l in 1..=side {
        for j in 1..=side {
            let s = site_index(lattice, j, l);
            if j < side {
                let t = site_index(lattice, j + 1, l);
                h[(s, t)] = hop(j);
                h[(t, s)] = hop(j);
            }
            if l < side {
                let t = site_index(lattice, j, l + 1);
                h[(s, t)] = hop(l);
                h[(t, s)] = hop(l);
            }
        }
    }
    h
}
