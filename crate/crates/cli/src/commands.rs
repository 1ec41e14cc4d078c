use std::f64::consts::{PI, TAU};

use serde_json::{json, Value};

use sshsim::driving::nearest_neighbor_factors;
use sshsim::dynamics::{
    fidelity, first_transfer_peak, transfer_step, transfer_trajectory, two_level_approximation,
    ExcitationDensityMatrix, NoiseSpec,
};
use sshsim::lattice1d::{
    band_gap, dispersion, edge_states, localization_length, open_chain_hamiltonian, winding_estimate,
    SSHChain, DEFAULT_EDGE_TOL,
};
use sshsim::lattice2d::{dispersion_2d, path_dispersion, zak_vector_gauged, BZPath, SSHLattice2D};
use sshsim::model::{estimate_parameters, ExperimentalInputs};
use sshsim::numerics::{eigh_real, Grid1D};

use crate::config::{RunConfig, Units};
use crate::output::{Report, Table};
use crate::{CliError, Command};

const DEFAULT_GAMMAS: [f64; 3] = [0.0, 5e-4, 1e-3];

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<Report, CliError> {
    match command {
        Command::Dispersion1d => dispersion1d(cfg),
        Command::Winding => winding(cfg),
        Command::Edges => edges(cfg),
        Command::Bandgap => bandgap(cfg),
        Command::Dispersion2d => dispersion2d(cfg),
        Command::Bandpath2d => bandpath2d(cfg),
        Command::Zak2d => zak2d(cfg),
        Command::Driving => driving(cfg),
        Command::Transfer => transfer(cfg),
        Command::FidelitySweep => fidelity_sweep(cfg),
        Command::ApproxCompare => approx_compare(cfg),
        Command::EstimateParams => estimate_params(cfg),
    }
}

fn chain(cfg: &RunConfig, default_cells: usize) -> Result<SSHChain, CliError> {
    let c = cfg.couplings()?;
    Ok(SSHChain::from_couplings(cells(cfg, default_cells)?, &c)?)
}

fn lattice(cfg: &RunConfig) -> Result<SSHLattice2D, CliError> {
    let c = cfg.couplings()?;
    Ok(SSHLattice2D::new(cells(cfg, 2)?, c.j1, c.j2)?)
}

fn cells(cfg: &RunConfig, default: usize) -> Result<usize, CliError> {
    match cfg.cells.unwrap_or(default) {
        0 => Err(CliError::Config("cells: must be >= 1".into())),
        n => Ok(n),
    }
}

fn positive_count(value: Option<usize>, default: usize, name: &str) -> Result<usize, CliError> {
    match value.unwrap_or(default) {
        0 => Err(CliError::Config(format!("{name}: must be >= 1"))),
        n => Ok(n),
    }
}

fn noise(cfg: &RunConfig, gamma: f64) -> Result<NoiseSpec, CliError> {
    NoiseSpec::new(cfg.rate(gamma)).map_err(|e| CliError::Config(format!("gamma: {e}")))
}

fn tmax(cfg: &RunConfig, natural_default: Option<f64>) -> Result<f64, CliError> {
    let t = match (cfg.tmax, cfg.units(), natural_default) {
        (Some(t), _, _) => t,
        (None, Units::Natural, Some(d)) => d,
        _ => return Err(CliError::Config("tmax: required for this command".into())),
    };
    if !(t > 0.0 && t.is_finite()) {
        return Err(CliError::Config(format!("tmax: must be > 0, got {t}")));
    }
    Ok(t)
}

fn model_fields(report: Report, cfg: &RunConfig, j1: f64, j2: f64) -> Report {
    let delta = (j2 - j1) / (j2 + j1);
    report
        .field("delta", delta)
        .field("j1", cfg.to_output_frequency(j1))
        .field("j2", cfg.to_output_frequency(j2))
}

fn site_label(m: usize) -> String {
    format!("{}_{}", m / 2 + 1, if m.is_multiple_of(2) { 'A' } else { 'B' })
}

fn dispersion1d(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 1)?;
    let nk = positive_count(cfg.nk, 512, "nk")?;
    let grid = Grid1D::periodic(-PI, TAU, nk)?;
    let mut t = Table::new(&["k", "E_minus", "E_plus"]);
    for &k in grid.samples() {
        let (lo, hi) = dispersion(&chain, k);
        t.push(vec![k, cfg.to_output_frequency(lo), cfg.to_output_frequency(hi)]);
    }
    Ok(model_fields(Report::default(), cfg, chain.j1, chain.j2).with_table(t))
}

fn winding(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 1)?;
    let nk = positive_count(cfg.nk, 1024, "nk")?;
    let w = winding_estimate(&chain, nk)?;
    Ok(Report::default()
        .field("winding", w.winding)
        .field("raw", w.raw)
        .field("residual", w.residual)
        .field("n_k", w.n_k)
        .field("delta", chain.delta()))
}

fn edges(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 10)?;
    let tol = cfg.tol.map(|t| cfg.rate(t)).unwrap_or(DEFAULT_EDGE_TOL * chain.m_eff());
    let states = edge_states(&chain, tol)?;
    let spectrum = eigh_real(&open_chain_hamiltonian(&chain))?.values;
    let mut columns = vec!["site".to_string(), "cell".to_string(), "sublattice".to_string()];
    let names: &[&str] = if states.len() == 2 { &["psi_left", "psi_right"] } else { &[] };
    for (i, _) in states.iter().enumerate() {
        columns.push(names.get(i).map_or_else(|| format!("psi_{i}"), |n| n.to_string()));
    }
    let mut t = Table::with_columns(columns);
    for m in 0..chain.n_spins() {
        let mut row = vec![(m + 1) as f64, (m / 2 + 1) as f64, (m % 2) as f64];
        row.extend(states.iter().map(|s| s.amplitudes[m]));
        t.push(row);
    }
    let xi = localization_length(chain.j1, chain.j2).ok();
    let report = model_fields(Report::default(), cfg, chain.j1, chain.j2)
        .field("n_edge_states", states.len())
        .field(
            "edge_energies",
            states.iter().map(|s| cfg.to_output_frequency(s.energy)).collect::<Vec<_>>(),
        )
        .field("localization_length", xi.map_or(Value::Null, Value::from))
        .field("spectrum", spectrum.iter().map(|&e| cfg.to_output_frequency(e)).collect::<Vec<_>>());
    Ok(report.with_table(t))
}

fn bandgap(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 1)?;
    let g = band_gap(&chain);
    Ok(model_fields(Report::default(), cfg, chain.j1, chain.j2)
        .field("half_gap", cfg.to_output_frequency(g.half_gap))
        .field("full_gap", cfg.to_output_frequency(g.full_gap))
        .field("k_min", g.k_min))
}

fn dispersion2d(cfg: &RunConfig) -> Result<Report, CliError> {
    let lat = lattice(cfg)?;
    let nk = positive_count(cfg.nk, 64, "nk")?;
    let mut t = Table::new(&["kx", "ky", "E1", "E2", "E3", "E4"]);
    for iy in 0..nk {
        for ix in 0..nk {
            let k = (TAU * ix as f64 / nk as f64, TAU * iy as f64 / nk as f64);
            let e = dispersion_2d(&lat, k);
            let mut row = vec![k.0, k.1];
            row.extend(e.iter().map(|&x| cfg.to_output_frequency(x)));
            t.push(row);
        }
    }
    Ok(model_fields(Report::default(), cfg, lat.j1, lat.j2).with_table(t))
}

fn bandpath2d(cfg: &RunConfig) -> Result<Report, CliError> {
    let lat = lattice(cfg)?;
    let samples = positive_count(cfg.path_samples, 100, "path_samples")?;
    let path = BZPath::standard(samples)?;
    let mut t = Table::new(&["arc", "kx", "ky", "E1", "E2", "E3", "E4"]);
    let rows = path_dispersion(&lat, &path);
    for s in &rows {
        let mut row = vec![s.arc_length, s.k.0, s.k.1];
        row.extend(s.energies.iter().map(|&x| cfg.to_output_frequency(x)));
        t.push(row);
    }
    let min_gap = rows.iter().map(|s| s.energies[1] - s.energies[0]).fold(f64::INFINITY, f64::min);
    let labels: Vec<&str> = path.vertices().iter().map(|v| v.label()).collect();
    Ok(model_fields(Report::default(), cfg, lat.j1, lat.j2)
        .field("path", labels.join("-"))
        .field("min_gap_12", cfg.to_output_frequency(min_gap))
        .with_table(t))
}

fn zak2d(cfg: &RunConfig) -> Result<Report, CliError> {
    let lat = lattice(cfg)?;
    let nk = positive_count(cfg.nk, 64, "nk")?;
    let band = cfg.band.as_deref().unwrap_or("0");
    let bands = match band {
        "occupied" => 0..2,
        s => match s.parse::<usize>() {
            Ok(b) if b < 4 => b..b + 1,
            _ => return Err(CliError::Config(format!("band: expected 0-3 or \"occupied\", got {s:?}"))),
        },
    };
    let z = zak_vector_gauged(&lat, bands, nk, |_, _| 0.0)?;
    Ok(model_fields(Report::default(), cfg, lat.j1, lat.j2)
        .field("band", band)
        .field("n_k", nk)
        .field("px", z.px)
        .field("py", z.py))
}

fn driving(cfg: &RunConfig) -> Result<Report, CliError> {
    let couplings = cfg.couplings()?;
    let spec = cfg.driving_spec()?;
    let m = cfg.hopping_scale()?;
    let n_spins = 2 * cells(cfg, 8)?;
    let mut t = Table::new(&["i", "j", "factor", "coupling"]);
    for (i, j, f) in nearest_neighbor_factors(&spec, n_spins)? {
        t.push(vec![i as f64, j as f64, f, cfg.to_output_frequency(m * f)]);
    }
    Ok(Report::default()
        .field("eta", spec.eta)
        .field("phase0", spec.phase0)
        .field("j1", cfg.to_output_frequency(couplings.j1))
        .field("j2", cfg.to_output_frequency(couplings.j2))
        .field("delta", couplings.delta)
        .field("m_eff", cfg.to_output_frequency(couplings.m_eff))
        .with_table(t))
}

fn transfer(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 3)?;
    let noise = noise(cfg, cfg.gamma.unwrap_or(0.0))?;
    let t_max = tmax(cfg, Some(400.0))?;
    let steps = positive_count(cfg.steps, 4000, "steps")?;
    let (times, states) = transfer_trajectory(&chain, &noise, t_max, steps)?;
    let n = chain.n_spins();
    let target = ExcitationDensityMatrix::site(n, n - 1)?;
    let mut columns = vec!["t".to_string()];
    columns.extend((0..n).map(site_label));
    columns.push("fidelity".into());
    let mut t = Table::with_columns(columns);
    for (time, s) in times.iter().zip(&states) {
        let mut row = vec![*time];
        row.extend(s.populations());
        row.push(fidelity(s, &target)?);
        t.push(row);
    }
    Ok(model_fields(Report::default(), cfg, chain.j1, chain.j2)
        .field("cells", chain.n_cells)
        .field("gamma", cfg.to_output_frequency(noise.gamma_s))
        .field("step", transfer_step(&chain, &noise))
        .with_table(t))
}

fn fidelity_sweep(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 3)?;
    let gammas = cfg.gammas.clone().unwrap_or_else(|| DEFAULT_GAMMAS.to_vec());
    if gammas.is_empty() {
        return Err(CliError::Config("gammas: empty list".into()));
    }
    let noises = gammas.iter().map(|&g| noise(cfg, g)).collect::<Result<Vec<_>, _>>()?;
    let t_max = tmax(cfg, Some(400.0))?;
    let steps = positive_count(cfg.steps, 4000, "steps")?;
    let n = chain.n_spins();
    let target = ExcitationDensityMatrix::site(n, n - 1)?;
    let peak = |noise: &NoiseSpec| -> Result<(f64, f64), sshsim::Error> {
        let (times, states) = transfer_trajectory(&chain, noise, t_max, steps)?;
        let f = states.iter().map(|s| fidelity(s, &target)).collect::<Result<Vec<_>, _>>()?;
        first_transfer_peak(&times, &f)
    };
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = noises.iter().map(|nz| scope.spawn(|| peak(nz))).collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut t = Table::new(&["gamma", "peak_fidelity", "peak_time"]);
    for (g, r) in gammas.iter().zip(results) {
        let (time, f) = r?;
        t.push(vec![*g, f, time]);
    }
    Ok(model_fields(Report::default(), cfg, chain.j1, chain.j2)
        .field("cells", chain.n_cells)
        .field("tmax", t_max)
        .field("peak_rule", "maximum of the first excursion above 1/2, ended by a drop below 1/4")
        .with_table(t))
}

fn approx_compare(cfg: &RunConfig) -> Result<Report, CliError> {
    let chain = chain(cfg, 3)?;
    let tl = two_level_approximation(&chain)?;
    let t_max = match cfg.tmax {
        Some(_) => tmax(cfg, None)?,
        None => tl.period(),
    };
    let steps = positive_count(cfg.steps, 4000, "steps")?;
    let noise = noise(cfg, cfg.gamma.unwrap_or(0.0))?;
    let (times, states) = transfer_trajectory(&chain, &noise, t_max, steps)?;
    let last = chain.n_spins() - 1;
    let mut t = Table::new(&["t", "exact_1A", "approx_1A", "exact_NB", "approx_NB"]);
    let mut worst = 0.0f64;
    for (&time, s) in times.iter().zip(&states) {
        let p = s.populations();
        let (a1, an) = (tl.first_site(time), tl.last_site(time));
        worst = worst.max((p[0] - a1).abs());
        t.push(vec![time, p[0], a1, p[last], an]);
    }
    Ok(model_fields(Report::default(), cfg, chain.j1, chain.j2)
        .field("e_plus", cfg.to_output_frequency(tl.e_plus))
        .field("e_minus", cfg.to_output_frequency(tl.e_minus))
        .field("omega0", cfg.to_output_frequency(tl.omega0))
        .field("period", tl.period())
        .field("max_deviation_1a", worst)
        .with_table(t))
}

fn estimate_params(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut inputs = ExperimentalInputs::default();
    if let Some(g) = cfg.g_c {
        inputs.g_c_hz = g;
    }
    if let Some(d) = cfg.delta_be {
        inputs.band_edge_hz = inputs.spin_frequency_hz - d;
    }
    if let Some(g) = cfg.gamma {
        inputs.dephasing_hz = g;
    }
    match (cfg.d0, cfg.l_c) {
        (Some(d0), Some(l)) => inputs.d0_over_l_c = Some(d0 / l),
        (None, None) => {}
        _ => return Err(CliError::Config("d0: --d0 and --l-c must be given together".into())),
    }
    let est = estimate_parameters(&inputs)?;
    let columns = ["name", "unit", "computed", "quoted", "note"].map(String::from).to_vec();
    let rows = est
        .values
        .iter()
        .map(|v| {
            vec![
                json!(v.name),
                json!(v.unit),
                json!(v.computed),
                v.quoted.map_or(Value::Null, Value::from),
                json!(v.note),
            ]
        })
        .collect();
    let mut report = Report::default().field("inputs", serde_json::to_value(&est.inputs).expect("serializable"));
    report.records = Some((columns, rows));
    Ok(report)
}
