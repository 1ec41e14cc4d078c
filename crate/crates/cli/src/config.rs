//! Run configuration: command-line flags merged over an optional JSON file.

use std::f64::consts::TAU;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use sshsim::driving::{staggered_couplings, DrivingSpec, StaggeredCouplings};
use sshsim::model::{nearest_neighbor_strength, CouplingProfile};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// Frequencies in units of the mean hopping, `M_eff = 1`.
    #[default]
    Natural,
    /// Frequencies in Hz, times in seconds; needs a coupling profile.
    Hz,
}

/// Every option, shared by all subcommands. Field names double as the keys
/// of the JSON config file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// JSON file with default values for any of these options.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Dimerization (J2 - J1) / (J2 + J1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Intracell hopping; requires --j2.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub j1: Option<f64>,
    /// Intercell hopping; requires --j1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub j2: Option<f64>,
    /// Drive strength; the hoppings follow from the Bessel renormalization.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Stroboscopic drive phase (default pi/4); only with --eta.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phase0: Option<f64>,
    /// Mean hopping, or bare hopping when driven (default 1).
    #[arg(long = "m-eff", global = true, allow_hyphen_values = true)]
    pub m_eff: Option<f64>,

    /// Band-gap coupling g_c, Hz (with --units hz).
    #[arg(long = "g-c", global = true)]
    pub g_c: Option<f64>,
    /// Spin detuning from the band edge, Hz.
    #[arg(long = "delta-be", global = true)]
    pub delta_be: Option<f64>,
    /// Phonon localization length, m.
    #[arg(long = "l-c", global = true)]
    pub l_c: Option<f64>,
    /// Spin spacing, m.
    #[arg(long, global = true)]
    pub d0: Option<f64>,

    /// Unit cells per axis.
    #[arg(long, global = true)]
    pub cells: Option<usize>,
    /// Momentum samples per axis.
    #[arg(long, global = true)]
    pub nk: Option<usize>,
    /// Samples per path segment (bandpath2d).
    #[arg(long = "path-samples", global = true)]
    pub path_samples: Option<usize>,
    /// Band index 0-3, or "occupied" for the two negative-energy bands (zak2d).
    #[arg(long, global = true)]
    pub band: Option<String>,
    /// Midgap tolerance (edges).
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Final time.
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Output intervals.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Dephasing rate per spin.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Comma-separated dephasing rates (fidelity-sweep).
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Option<Vec<f64>>,

    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also write a gnuplot script next to the output.
    #[arg(long, global = true)]
    #[serde(default)]
    pub gnuplot: bool,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunConfig {
    /// Applies `flags` on top of `self` (file values). Model-source fields
    /// move as a group: any of delta / j1 / j2 / eta / phase0 on the command
    /// line replaces all of them from the file.
    pub fn overlay(mut self, flags: &RunConfig) -> RunConfig {
        let flag_source = flags.delta.is_some()
            || flags.j1.is_some()
            || flags.j2.is_some()
            || flags.eta.is_some()
            || flags.phase0.is_some();
        if flag_source {
            self.delta = flags.delta;
            self.j1 = flags.j1;
            self.j2 = flags.j2;
            self.eta = flags.eta;
            self.phase0 = flags.phase0;
        }
        overlay!(self, flags; m_eff, g_c, delta_be, l_c, d0, cells, nk, path_samples, band, tol,
            tmax, steps, gamma, gammas, units, output, format);
        self.gnuplot |= flags.gnuplot;
        self
    }

    pub fn load(flags: &RunConfig) -> Result<RunConfig, CliError> {
        match &flags.config {
            None => Ok(flags.clone()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("config: cannot read {}: {e}", path.display())))?;
                let file: RunConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("config: {}: {e}", path.display())))?;
                Ok(file.overlay(flags))
            }
        }
    }

    pub fn units(&self) -> Units {
        self.units.unwrap_or_default()
    }

    /// Angular frequency of a user-supplied rate.
    pub fn rate(&self, value: f64) -> f64 {
        match self.units() {
            Units::Natural => value,
            Units::Hz => TAU * value,
        }
    }

    /// Converts an angular frequency back to the output unit.
    pub fn to_output_frequency(&self, omega: f64) -> f64 {
        match self.units() {
            Units::Natural => omega,
            Units::Hz => omega / TAU,
        }
    }

    fn profile(&self) -> Result<Option<CouplingProfile>, CliError> {
        let given = [self.g_c, self.delta_be, self.l_c, self.d0];
        if given.iter().all(Option::is_none) {
            return Ok(None);
        }
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| CliError::Config(format!("{name}: coupling profile needs --g-c, --delta-be, --l-c and --d0")))
        };
        let (g, d, l, d0) = (need(self.g_c, "g_c")?, need(self.delta_be, "delta_be")?, need(self.l_c, "l_c")?, need(self.d0, "d0")?);
        let profile = CouplingProfile::evenly_spaced(TAU * g, TAU * d, l, d0, 2)?;
        Ok(Some(profile))
    }

    /// Hopping scale in rad/s (Hz mode) or in the natural unit.
    pub fn hopping_scale(&self) -> Result<f64, CliError> {
        let profile = self.profile()?;
        match (self.units(), profile) {
            (Units::Hz, Some(p)) => {
                if self.m_eff.is_some() {
                    return Err(CliError::Config("m_eff: give either --m-eff or a coupling profile, not both".into()));
                }
                Ok(nearest_neighbor_strength(&p)?)
            }
            (Units::Hz, None) => Err(CliError::Config(
                "units: --units hz needs a coupling profile (--g-c, --delta-be, --l-c, --d0)".into(),
            )),
            (Units::Natural, Some(_)) => Err(CliError::Config(
                "units: a coupling profile is only used with --units hz".into(),
            )),
            (Units::Natural, None) => {
                let m = self.m_eff.unwrap_or(1.0);
                if !(m > 0.0 && m.is_finite()) {
                    return Err(CliError::Config(format!("m_eff: must be > 0, got {m}")));
                }
                Ok(m)
            }
        }
    }

    /// Resolves the hopping pair from exactly one model source.
    pub fn couplings(&self) -> Result<StaggeredCouplings, CliError> {
        let mut sources = Vec::new();
        if self.delta.is_some() {
            sources.push("delta");
        }
        if self.j1.is_some() || self.j2.is_some() {
            sources.push("j1/j2");
        }
        if self.eta.is_some() {
            sources.push("eta");
        }
        if self.phase0.is_some() && self.eta.is_none() {
            return Err(CliError::Config("phase0: only meaningful together with --eta".into()));
        }
        match sources.as_slice() {
            [] => Err(CliError::Config("delta: no model given; use one of --delta, --j1/--j2 or --eta".into())),
            ["delta"] => {
                let delta = self.delta.expect("checked");
                Ok(StaggeredCouplings::from_delta(self.hopping_scale()?, delta))
            }
            ["j1/j2"] => match (self.j1, self.j2) {
                (Some(j1), Some(j2)) => {
                    if self.m_eff.is_some() {
                        return Err(CliError::Config("m_eff: conflicts with explicit --j1/--j2".into()));
                    }
                    Ok(StaggeredCouplings::from_hoppings(self.rate(j1), self.rate(j2))?)
                }
                (None, _) => Err(CliError::Config("j1: --j2 given without --j1".into())),
                (_, None) => Err(CliError::Config("j2: --j1 given without --j2".into())),
            },
            ["eta"] => Ok(staggered_couplings(self.hopping_scale()?, &self.driving_spec()?)?),
            many => Err(CliError::Config(format!(
                "{}: conflicting model sources {}; give exactly one",
                many[0].split('/').next().unwrap_or("delta"),
                many.join(", ")
            ))),
        }
    }

    pub fn driving_spec(&self) -> Result<DrivingSpec, CliError> {
        let eta = self
            .eta
            .ok_or_else(|| CliError::Config("eta: this command needs --eta".into()))?;
        let mut spec = DrivingSpec::with_eta(eta);
        if let Some(p) = self.phase0 {
            spec.phase0 = p;
        }
        spec.validate()?;
        Ok(spec)
    }
}
