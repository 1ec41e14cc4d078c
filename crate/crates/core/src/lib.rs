//! Simulator for periodically driven SSH spin arrays coupled through a
//! phononic band gap.
//!
//! Layers, bottom up:
//! - [`numerics`]: Bessel J0, Hermitian eigensolver, periodic quadrature, RK4.
//! - [`model`]: band-gap-mediated coupling matrix and device parameter chain.
//! - [`driving`]: Bessel-renormalized hoppings and the dimerization `delta`.
//! - [`lattice1d`], [`lattice2d`]: band structures, invariants, edge states.
//! - [`dynamics`]: dephasing master equation and state transfer.
//!
//! Energies are angular frequencies with `hbar = 1`; most callers work in
//! units of the mean hopping `M_eff = 1`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driving;
pub mod dynamics;
pub mod error;
pub mod lattice1d;
pub mod lattice2d;
pub mod model;
pub mod numerics;

pub use driving::{DrivingSpec, StaggeredCouplings};
pub use dynamics::{ExcitationDensityMatrix, NoiseSpec, TransferTable, TwoLevelApproximation};
pub use error::{Error, Result};
pub use lattice1d::{DVector, EdgeState, SSHChain};
pub use lattice2d::{BZPath, HighSymmetryPoint, SSHLattice2D, ZakVector};
pub use model::CouplingProfile;
pub use numerics::{ComplexMatrix, Grid1D, RealMatrix};
