//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sshsim::driving::{nearest_neighbor_factors, staggered_couplings, DrivingSpec};
use sshsim::dynamics::{
    fidelity_series, first_transfer_peak, lindblad_evolve, lindblad_evolve_with_step,
    oscillation_period, transfer_experiment, transfer_trajectory, two_level_approximation,
    ExcitationDensityMatrix, NoiseSpec,
};
use sshsim::lattice1d::{
    dispersion, edge_states, localization_length, open_chain_hamiltonian, winding_estimate,
    winding_number, SSHChain,
};
use sshsim::lattice2d::{
    bloch_hamiltonian_2d, dispersion_2d, open_lattice_hamiltonian_2d, path_dispersion,
    zak_vector, zak_vector_gauged, BZPath, SSHLattice2D,
};
use sshsim::numerics::{eigh, eigh_real, Grid1D};
use sshsim::Error;

use sshsim_validation::{bessel_j0_quadrature, full_space_liouvillian, max_diff, unvec_row_major, vec_row_major};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Folds a list of sub-checks into one outcome.
fn all(parts: Vec<Outcome>) -> Outcome {
    let pass = parts.iter().all(|p| p.pass);
    let detail = parts
        .iter()
        .map(|p| format!("{}{}", if p.pass { "" } else { "[x] " }, p.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { pass, detail }
}

fn gap_law() -> Outcome {
    let grid = Grid1D::brillouin_zone(4096).unwrap();
    let mut parts = Vec::new();
    for delta in [0.05, 0.1, 0.3, 0.5] {
        let chain = SSHChain::from_delta(1, 1.0, delta).unwrap();
        let (k_min, e_min) = grid
            .samples()
            .iter()
            .map(|&k| (k, dispersion(&chain, k).1))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let at_pi = (k_min.rem_euclid(TAU) - PI).abs() < 1e-12;
        let err = (e_min - 2.0 * delta).abs();
        parts.push(check(
            err < 1e-9 && at_pi,
            format!("delta={delta}: min E+={e_min:.12} at k={k_min:.6}"),
        ));
    }
    all(parts)
}

fn winding_numbers() -> Outcome {
    let mut parts = Vec::new();
    for delta in [0.01, 0.1, 0.5, 0.9] {
        for (d, expect) in [(delta, 1), (-delta, 0)] {
            let chain = SSHChain::from_delta(1, 1.0, d).unwrap();
            let mut ok = true;
            let mut worst = 0.0f64;
            for n_k in [256, 1024, 4096] {
                match winding_estimate(&chain, n_k) {
                    Ok(w) => {
                        ok &= w.winding == expect && w.residual < 1e-6;
                        worst = worst.max(w.residual);
                    }
                    Err(_) => ok = false,
                }
            }
            parts.push(check(ok, format!("delta={d}: W={expect} residual<={worst:.1e}")));
        }
    }
    let flat = SSHChain::from_delta(1, 1.0, 0.0).unwrap();
    parts.push(check(
        matches!(winding_number(&flat, 256), Err(Error::GapClosed)),
        "delta=0 -> GapClosed",
    ));
    all(parts)
}

fn edge_state_criterion() -> Outcome {
    let chain = SSHChain::from_delta(100, 1.0, 0.3).unwrap();
    let spectrum = eigh_real(&open_chain_hamiltonian(&chain)).unwrap();
    let n_zero = spectrum.values.iter().filter(|e| e.abs() < 1e-10).count();
    let states = edge_states(&chain, 1e-10).unwrap();
    let mut parts = vec![check(n_zero == 2 && states.len() == 2, format!("{n_zero} eigenvalues |E|<1e-10"))];
    if states.len() == 2 {
        let left = &states[0];
        // log|a_n| against n - 1 for the A sites of the first ten cells
        let pts: Vec<(f64, f64)> = (0..10)
            .map(|n| (n as f64, left.amplitudes[2 * n].abs().ln()))
            .collect();
        let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / 10.0, a.1 + p.1 / 10.0));
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        let xi_fit = -1.0 / slope;
        let xi = localization_length(chain.j1, chain.j2).unwrap();
        let rel = (xi_fit - xi).abs() / xi;
        parts.push(check(rel < 0.02, format!("xi fit {xi_fit:.6} vs {xi:.6} (rel {rel:.1e})")));
        let even: f64 = left.amplitudes.iter().skip(1).step_by(2).map(|a| a * a).sum();
        parts.push(check(even < 1e-12, format!("even-site weight {even:.1e}")));
    }
    let trivial = SSHChain::from_delta(100, 1.0, -0.3).unwrap();
    let t_spec = eigh_real(&open_chain_hamiltonian(&trivial)).unwrap();
    let n_mid = t_spec.values.iter().filter(|e| e.abs() < 1e-10).count();
    let states = edge_states(&trivial, 1e-10).unwrap();
    parts.push(check(n_mid == 0 && states.is_empty(), format!("delta=-0.3: {n_mid} midgap states")));
    all(parts)
}

fn bands_2d() -> Outcome {
    let lat = SSHLattice2D::from_delta(1, 1.0, 0.5).unwrap();
    let mut worst = 0.0f64;
    for ix in 0..64 {
        for iy in 0..64 {
            let k = (TAU * ix as f64 / 64.0, TAU * iy as f64 / 64.0);
            let closed = dispersion_2d(&lat, k);
            let numeric = eigh(&bloch_hamiltonian_2d(&lat, k)).unwrap().values;
            for (a, b) in closed.iter().zip(&numeric) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let gamma = dispersion_2d(&lat, (0.0, 0.0));
    let gamma_ok = gamma.iter().zip([-4.0, 0.0, 0.0, 4.0]).all(|(a, b)| (a - b).abs() < 1e-12);
    let path = path_dispersion(&lat, &BZPath::standard(200).unwrap());
    let min_gap = path
        .iter()
        .map(|s| s.energies[1] - s.energies[0])
        .fold(f64::INFINITY, f64::min);
    let target = 2.0 * lat.delta().abs() * lat.m_eff();
    all(vec![
        check(worst < 1e-10, format!("closed form vs eigh max diff {worst:.1e}")),
        check(gamma_ok, format!("Gamma spectrum {gamma:?}")),
        check(
            (min_gap - target).abs() < 1e-6,
            format!("min band-1/band-2 gap on M-G-X-M = {min_gap:.9} vs 2|delta|M = {target}"),
        ),
    ])
}

fn zak_criterion() -> Outcome {
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let table: Vec<f64> = (0..64 * 64).map(|_| rng.gen_range(-PI..PI)).collect();
    let gauge = |kx: f64, ky: f64| {
        let ix = ((kx / TAU * 64.0).round() as usize) % 64;
        let iy = ((ky / TAU * 64.0).round() as usize) % 64;
        table[iy * 64 + ix]
    };
    for (delta, expect) in [(0.5, 0.5), (-0.5, 0.0)] {
        let lat = SSHLattice2D::from_delta(1, 1.0, delta).unwrap();
        let z = zak_vector(&lat, 0, 64).unwrap();
        let g = zak_vector_gauged(&lat, 0..1, 64, gauge).unwrap();
        let dev = (z.px - expect).abs().max((z.py - expect).abs());
        let gauge_shift = (z.px - g.px).abs().max((z.py - g.py).abs());
        parts.push(check(
            dev < 1e-3 && gauge_shift < 1e-8 && (z.px - z.py).abs() < 1e-6,
            format!("delta={delta}: ({:.6}, {:.6}), gauge shift {gauge_shift:.1e}", z.px, z.py),
        ));
    }
    all(parts)
}

fn transfer_period() -> Outcome {
    let chain = SSHChain::from_delta(3, 1.0, 0.7).unwrap();
    let table = transfer_experiment(&chain, &NoiseSpec::noiseless(), 800.0, 8000).unwrap();
    let (t_peak, peak) = first_transfer_peak(&table.times, &table.last_site()).unwrap();
    let measured = oscillation_period(&table.times, &table.first_site()).unwrap();
    let predicted = two_level_approximation(&chain).unwrap().period();
    let rel = (measured - predicted).abs() / predicted;
    let quoted = 160.0 / chain.m_eff();
    let rel_quoted = (measured - quoted).abs() / quoted;
    all(vec![
        check(peak > 0.99, format!("peak <3_B> {peak:.4} at t={t_peak:.1}")),
        check(rel < 0.01, format!("revival {measured:.3} vs 2pi/w0 {predicted:.3} (rel {rel:.1e})")),
        check(rel_quoted < 0.2, format!("revival {measured:.3} vs 160/M (rel {rel_quoted:.2})")),
    ])
}

fn dephasing_fidelity() -> Outcome {
    // the target values come without a delta; 0.7 is assumed
    let chain = SSHChain::from_delta(3, 1.0, 0.7).unwrap();
    let target = ExcitationDensityMatrix::site(chain.n_spins(), chain.n_spins() - 1).unwrap();
    let peak_at = |gamma: f64| {
        let (times, states) = transfer_trajectory(&chain, &NoiseSpec::new(gamma).unwrap(), 400.0, 4000).unwrap();
        let f = fidelity_series(&states, &target).unwrap();
        first_transfer_peak(&times, &f).unwrap().1
    };
    let f0 = peak_at(0.0);
    let f1 = peak_at(5e-4);
    let f2 = peak_at(1e-3);
    all(vec![
        check(true, "ASSUMED delta=0.7 (no delta given for this criterion)"),
        check((f1 - 0.91).abs() <= 0.05, format!("F(5e-4 M)={f1:.4} vs 0.91+-0.05")),
        check((f2 - 0.84).abs() <= 0.05, format!("F(1e-3 M)={f2:.4} vs 0.84+-0.05")),
        check(f0 >= f1 && f1 >= f2, format!("monotone: {f0:.4} >= {f1:.4} >= {f2:.4}")),
    ])
}

fn two_level() -> Outcome {
    let chain = SSHChain::from_delta(3, 1.0, 0.7).unwrap();
    let tl = two_level_approximation(&chain).unwrap();
    let period = tl.period();
    let table = transfer_experiment(&chain, &NoiseSpec::noiseless(), period, 4000).unwrap();
    let dev = table
        .times
        .iter()
        .zip(table.first_site())
        .map(|(&t, p)| (p - tl.first_site(t)).abs())
        .fold(0.0, f64::max);
    check(dev < 0.05, format!("max |<1_A> - (1+cos w0 t)/2| = {dev:.4} over T={period:.2}"))
}

fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

fn oracle_equivalences() -> Outcome {
    let c = |x: f64| Complex64::new(x, 0.0);
    // (a) two spins in the full four-dimensional space; basis index 2 s1 + s2, s = 1 excited
    let (j, gamma) = (0.7, 0.3);
    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let sp = DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
    let sz = DMatrix::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(1.0)]);
    let sm = sp.adjoint();
    let h_full = (kron(&sp, &sm) + kron(&sm, &sp)).scale(j);
    let z = [kron(&sz, &id2), kron(&id2, &sz)];
    let super_op = full_space_liouvillian(&h_full, &z, gamma);
    // subspace basis: |1> = spin 1 excited = index 2, |2> = index 1
    let sub_index = [2usize, 1usize];
    let mut rho_full0 = DMatrix::<Complex64>::zeros(4, 4);
    rho_full0[(2, 2)] = c(1.0);
    let chain = SSHChain::new(1, j, 1.0).unwrap();
    let h_sub = open_chain_hamiltonian(&chain).map(c);
    let rho0 = ExcitationDensityMatrix::site(2, 0).unwrap();
    let grid = Grid1D::uniform(0.0, 4.0, 16).unwrap();
    let sub = lindblad_evolve(&h_sub, &rho0, &NoiseSpec::new(gamma).unwrap(), &grid).unwrap();
    let mut worst_a = 0.0f64;
    for (t, s) in grid.samples().iter().zip(&sub) {
        let v = (super_op.clone() * c(*t)).exp() * vec_row_major(&rho_full0);
        let full = unvec_row_major(&v, 4);
        let projected = DMatrix::from_fn(2, 2, |r, q| full[(sub_index[r], sub_index[q])]);
        worst_a = worst_a.max(max_diff(&projected, s.matrix()));
    }

    // (b) noiseless evolution against exp(-iHt)
    let chain = SSHChain::from_delta(3, 1.0, 0.7).unwrap();
    let h = open_chain_hamiltonian(&chain).map(c);
    let rho0 = ExcitationDensityMatrix::site(6, 0).unwrap();
    let grid = Grid1D::uniform(0.0, 20.0, 40).unwrap();
    let traj = lindblad_evolve_with_step(&h, &rho0, &NoiseSpec::noiseless(), &grid, 0.002).unwrap();
    let mut worst_b = 0.0f64;
    for (t, s) in grid.samples().iter().zip(&traj) {
        let u = (h.clone() * (-Complex64::i() * *t)).exp();
        let psi = u.column(0).into_owned();
        let exact = &psi * psi.adjoint();
        worst_b = worst_b.max(max_diff(&exact, s.matrix()));
    }

    // (c) real-space 2D Hamiltonian against a bond list from coordinates
    let lat = SSHLattice2D::new(2, 0.3, 1.1).unwrap();
    let side = 4usize;
    let mut bonds = Vec::new();
    for a in 0..side * side {
        for b in 0..side * side {
            let (xa, ya) = (a % side + 1, a / side + 1);
            let (xb, yb) = (b % side + 1, b / side + 1);
            if xa.abs_diff(xb) + ya.abs_diff(yb) == 1 {
                let lower = if xa == xb { ya.min(yb) } else { xa.min(xb) };
                bonds.push((a, b, if lower % 2 == 1 { lat.j1 } else { lat.j2 }));
            }
        }
    }
    let mut reference = DMatrix::<f64>::zeros(16, 16);
    for (a, b, w) in bonds {
        reference[(a, b)] = w;
    }
    let exact_c = open_lattice_hamiltonian_2d(&lat) == reference;

    all(vec![
        check(worst_a < 1e-8, format!("(a) N=1 subspace vs full space {worst_a:.1e}")),
        check(worst_b < 1e-8, format!("(b) unitary oracle {worst_b:.1e}")),
        check(exact_c, "(c) 2D bond list exact"),
    ])
}

fn driving_layer() -> Outcome {
    let spec = DrivingSpec { phase0: FRAC_PI_4, ..DrivingSpec::with_eta(1.0) };
    let factors = nearest_neighbor_factors(&spec, 16).unwrap();
    let periodic = factors.windows(3).all(|w| w[0].2 == w[2].2);
    let undriven = staggered_couplings(1.0, &DrivingSpec::with_eta(0.0)).unwrap().delta;
    let driven = staggered_couplings(1.0, &spec).unwrap().delta;
    let b = bessel_j0_quadrature(2f64.sqrt());
    let oracle = (b - 1.0) / (b + 1.0);
    let err = (driven - oracle).abs();
    all(vec![
        check(periodic, "J(j,j+1) == J(j+2,j+3) on 16 spins"),
        check(undriven == 0.0, format!("eta=0 delta={undriven}")),
        check(err < 1e-10, format!("eta=1 delta={driven:.12} vs oracle {oracle:.12}")),
    ])
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("gap law", gap_law),
        ("winding numbers", winding_numbers),
        ("edge states", edge_state_criterion),
        ("2D bands", bands_2d),
        ("2D polarization", zak_criterion),
        ("transfer period", transfer_period),
        ("dephasing fidelity", dephasing_fidelity),
        ("two-level approximation", two_level),
        ("oracle equivalences", oracle_equivalences),
        ("driving layer", driving_layer),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {}", n + 1, outcome.detail);
        if !outcome.pass {
            failed.push(n + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
