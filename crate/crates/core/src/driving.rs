//! Floquet renormalization of the spin-spin hoppings.
//!
//! A standing-wave drive `cos(Delta_k x_j + w_d t)` on each spin dresses the
//! hopping between spins `i` and `j` by
//! `B0(2 eta sin(s (i + j)/2 + w_d t) sin(s (i - j)/2))` with `s = Delta_k d0`.
//! With `s = pi/2` the nearest-neighbour factors alternate with period two,
//! which is what produces the dimerized chain.
//!
//! The residual `w_d t` is evaluated at a fixed stroboscopic phase
//! (`phase0`). At `phase0 = pi/4` the pattern is `{1, B0(sqrt2 eta), 1, ...}`;
//! at `phase0 = 0` every nearest-neighbour factor is equal and there is no
//! dimerization at all.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::bessel_j0;

/// Number of sites checked for two-site periodicity.
pub const PERIODICITY_CHECK_SITES: usize = 16;
const PERIODICITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrivingSpec {
    /// Dimensionless drive strength.
    pub eta: f64,
    /// Drive frequency, rad/s. Only bookkeeping after the rotating-wave step.
    pub omega_d: f64,
    /// Transverse microwave field, rad/s. Bookkeeping only.
    pub omega_transverse: f64,
    /// Standing-wave phase advance per spin, `Delta_k * d0` (rad).
    pub delta_k_d0: f64,
    /// Stroboscopic value of `w_d t mod 2pi` at which the factors are read.
    pub phase0: f64,
}

impl Default for DrivingSpec {
    fn default() -> Self {
        Self {
            eta: 0.0,
            omega_d: 1.0,
            omega_transverse: 0.0,
            delta_k_d0: FRAC_PI_2,
            phase0: FRAC_PI_4,
        }
    }
}

impl DrivingSpec {
    pub fn with_eta(eta: f64) -> Self {
        Self { eta, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(Error::Domain(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        if !(self.omega_d.is_finite() && self.omega_d > 0.0) {
            return Err(Error::Domain(format!("omega_d must be > 0, got {}", self.omega_d)));
        }
        if !(self.phase0.is_finite() && self.delta_k_d0.is_finite()) {
            return Err(Error::Domain("phase0 and delta_k_d0 must be finite".into()));
        }
        Ok(())
    }
}

/// Staggered pair of hoppings with their dimerization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaggeredCouplings {
    /// Intracell hopping (odd bond), rad/s.
    pub j1: f64,
    /// Intercell hopping (even bond), rad/s.
    pub j2: f64,
    /// `(J2 - J1) / (J2 + J1)`; positive in the topological phase.
    pub delta: f64,
    /// `(J1 + J2) / 2`.
    pub m_eff: f64,
}

impl StaggeredCouplings {
    pub fn from_hoppings(j1: f64, j2: f64) -> Result<Self> {
        let sum = j1 + j2;
        if sum == 0.0 {
            return Err(Error::DegenerateDrive);
        }
        Ok(Self { j1, j2, delta: (j2 - j1) / sum, m_eff: 0.5 * sum })
    }

    /// `J1 = M(1 - delta)`, `J2 = M(1 + delta)`.
    pub fn from_delta(m_eff: f64, delta: f64) -> Self {
        Self { j1: m_eff * (1.0 - delta), j2: m_eff * (1.0 + delta), delta, m_eff }
    }

    /// Hopping on bond `(j, j+1)`, 1-based: `M [1 + (-1)^j delta]`.
    pub fn bond(&self, j: usize) -> f64 {
        if j % 2 == 1 {
            self.j1
        } else {
            self.j2
        }
    }
}

/// Bessel factor dressing the hopping between spins `i` and `j` (1-based).
pub fn renormalization_factor(i: usize, j: usize, spec: &DrivingSpec) -> Result<f64> {
    if i == j {
        return Err(Error::Domain(format!("no self-hopping: i = j = {i}")));
    }
    let half = 0.5 * spec.delta_k_d0;
    let (fi, fj) = (i as f64, j as f64);
    let arg = 2.0 * spec.eta * (half * (fi + fj) + spec.phase0).sin() * (half * (fi - fj)).sin();
    bessel_j0(arg)
}

/// Nearest-neighbour factors `(j, j+1, J_{j,j+1})` for `n_spins` spins.
pub fn nearest_neighbor_factors(spec: &DrivingSpec, n_spins: usize) -> Result<Vec<(usize, usize, f64)>> {
    (1..n_spins)
        .map(|j| renormalization_factor(j, j + 1, spec).map(|f| (j, j + 1, f)))
        .collect()
}

/// Staggered hoppings produced by the drive on a chain with bare
/// nearest-neighbour strength `m`.
pub fn staggered_couplings(m: f64, spec: &DrivingSpec) -> Result<StaggeredCouplings> {
    spec.validate()?;
    if !m.is_finite() {
        return Err(Error::Domain(format!("coupling strength must be finite, got {m}")));
    }
    let factors = nearest_neighbor_factors(spec, PERIODICITY_CHECK_SITES)?;
    for w in factors.windows(3) {
        let (a, c) = (w[0], w[2]);
        if (a.2 - c.2).abs() > PERIODICITY_TOL {
            return Err(Error::Configuration(format!(
                "drive breaks two-site periodicity: J({},{}) = {} but J({},{}) = {}",
                a.0, a.1, a.2, c.0, c.1, c.2
            )));
        }
    }
    StaggeredCouplings::from_hoppings(m * factors[0].2, m * factors[1].2)
}

/// Same drive on both axes of a square array; returns `(x, y)`.
pub fn staggered_couplings_2d(
    m: f64,
    spec: &DrivingSpec,
) -> Result<(StaggeredCouplings, StaggeredCouplings)> {
    let x = staggered_couplings(m, spec)?;
    let y = staggered_couplings(m, spec)?;
    if x.delta != y.delta {
        return Err(Error::Configuration("delta_x != delta_y for identical drives".into()));
    }
    Ok((x, y))
}
