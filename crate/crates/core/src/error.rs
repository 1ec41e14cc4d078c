use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input that violates a structural contract (e.g. a non-Hermitian
    /// matrix handed to the Hermitian eigensolver).
    #[error("contract violated: {0}")]
    Contract(String),

    /// A physical/driving configuration that is internally inconsistent.
    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("the band gap is closed (J1 = J2); the invariant is undefined")]
    GapClosed,

    #[error("winding residual {residual:.3e} too large at n_k = {n_k}; increase n_k")]
    Resolution { residual: f64, n_k: usize },

    #[error("degenerate drive: J1 + J2 = 0, dimerization undefined")]
    DegenerateDrive,

    #[error("localization length diverges for J1 = J2")]
    DivergentLength,

    #[error("band {band} is not isolated: {detail}")]
    Degeneracy { band: usize, detail: String },

    #[error("chain is not in the topological phase (delta = {delta}); no midgap pair")]
    NotTopological { delta: f64 },

    #[error("integration diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("trace drifted by {drift:.3e} at t = {time}; reduce the integration step")]
    IntegratorFailure { drift: f64, time: f64 },
}

impl Error {
    /// Numerical failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Resolution { .. }
                | Error::Divergence { .. }
                | Error::IntegratorFailure { .. }
                | Error::Degeneracy { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
