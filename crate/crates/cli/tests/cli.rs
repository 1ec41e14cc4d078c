use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sshsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sshsim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn dispersion1d_table() {
    let out = sshsim(&["dispersion1d", "--delta", "0.1", "--nk", "512"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["k", "E_minus", "E_plus"]);
    assert_eq!(rows.len(), 512);
    // first sample is k = -pi, where E_+ = 2|delta|
    assert!((rows[0][0] + std::f64::consts::PI).abs() < 1e-11);
    assert!((rows[0][2] - 0.2).abs() < 1e-11);
    assert!(rows.iter().all(|r| (r[1] + r[2]).abs() < 1e-11));
}

#[test]
fn winding_json() {
    let out = sshsim(&["winding", "--delta", "-0.1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["winding"], 0);
    let out = sshsim(&["winding", "--j1", "0.5", "--j2", "1.5"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["winding"], 1);
}

#[test]
fn transfer_reproduces_populations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("transfer.csv");
    let p = path.to_str().unwrap();
    let out = sshsim(&[
        "transfer", "--delta", "0.7", "--cells", "3", "--gamma", "0", "--tmax", "400", "--steps", "4000", "--output", p,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["t", "1_A", "1_B", "2_A", "2_B", "3_A", "3_B", "fidelity"]);
    assert_eq!(rows.len(), 4001);
    for r in &rows {
        let total: f64 = r[1..7].iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!((r[7] - r[6]).abs() < 1e-9);
    }
    let peak = rows.iter().map(|r| r[6]).fold(0.0, f64::max);
    assert!(peak > 0.99);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = sshsim(&["fidelity-sweep", "--delta", "0.7", "--tmax", "50", "--steps", "100", "--output", path.to_str().unwrap()]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn exit_codes() {
    let conflict = sshsim(&["winding", "--delta", "0.1", "--j1", "1", "--j2", "2"]);
    assert_eq!(conflict.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&conflict.stderr).contains("delta"));

    let half = sshsim(&["winding", "--j1", "1"]);
    assert_eq!(half.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&half.stderr).contains("j2"));

    assert_eq!(sshsim(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(sshsim(&["winding", "--delta", "0"]).status.code(), Some(1));
    let bad_gamma = sshsim(&["transfer", "--delta", "0.7", "--gamma", "-1", "--tmax", "1"]);
    assert_eq!(bad_gamma.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_gamma.stderr).contains("gamma"));
    // the two negative bands touch the positive ones along kx = ky
    assert_eq!(sshsim(&["zak2d", "--delta", "0.5", "--band", "occupied"]).status.code(), Some(2));
    // undersampled winding grid
    assert_eq!(sshsim(&["winding", "--delta", "0.0001", "--nk", "65"]).status.code(), Some(2));
    assert_eq!(sshsim(&["approx-compare", "--delta", "-0.5"]).status.code(), Some(1));
    assert_eq!(sshsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"delta": 0.5, "nk": 256, "format": "json"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["winding", "--config", c]))).unwrap();
    assert_eq!((v["winding"].as_i64(), v["n_k"].as_i64()), (Some(1), Some(256)));
    // a model flag replaces the file's model source instead of conflicting with it
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["winding", "--config", c, "--j1", "2", "--j2", "1"]))).unwrap();
    assert_eq!(v["winding"], 0);
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["winding", "--config", c, "--nk", "128"]))).unwrap();
    assert_eq!(v["n_k"], 128);

    std::fs::write(&cfg, r#"{"delta": 0.5, "bogus": 1}"#).unwrap();
    let out = sshsim(&["winding", "--config", c]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn gnuplot_companion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bands.csv");
    let out = sshsim(&["bandpath2d", "--delta", "0.5", "--output", path.to_str().unwrap(), "--gnuplot"]);
    assert!(out.status.success());
    let gp = std::fs::read_to_string(dir.path().join("bands.csv.gp")).unwrap();
    assert!(gp.contains("using 1:7"));
    assert!(Path::new(&path).exists());
    assert_eq!(sshsim(&["winding", "--delta", "0.5", "--gnuplot"]).status.code(), Some(1));
}

#[test]
fn two_dimensional_commands() {
    let (header, rows) = csv_rows(&stdout(&sshsim(&["dispersion2d", "--delta", "0.5", "--nk", "8"])));
    assert_eq!(header, ["kx", "ky", "E1", "E2", "E3", "E4"]);
    assert_eq!(rows.len(), 64);
    assert_eq!(&rows[0][2..], &[-4.0, 0.0, 0.0, 4.0]);

    let v: Value = serde_json::from_str(&stdout(&sshsim(&["bandpath2d", "--delta", "0.5", "--format", "json"]))).unwrap();
    assert_eq!(v["path"], "M-G-X-M");
    assert!((v["min_gap_12"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(v["rows"][0]["e1"].is_number());

    let v: Value = serde_json::from_str(&stdout(&sshsim(&["zak2d", "--delta", "0.5", "--nk", "32"]))).unwrap();
    assert!((v["px"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert!((v["py"].as_f64().unwrap() - 0.5).abs() < 1e-3);
}

#[test]
fn chain_commands() {
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["edges", "--delta", "0.3", "--cells", "40", "--format", "json"]))).unwrap();
    assert_eq!(v["n_edge_states"], 2);
    assert_eq!(v["rows"].as_array().unwrap().len(), 80);
    let first = v["rows"][0]["psi_left"].as_f64().unwrap().abs();
    assert!(first > 0.8);

    let v: Value = serde_json::from_str(&stdout(&sshsim(&["bandgap", "--delta", "0.3"]))).unwrap();
    assert!((v["half_gap"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert!((v["full_gap"].as_f64().unwrap() - 1.2).abs() < 1e-12);

    let (header, rows) = csv_rows(&stdout(&sshsim(&["driving", "--eta", "1"])));
    assert_eq!(header, ["i", "j", "factor", "coupling"]);
    assert_eq!(rows.len(), 15);
    assert_eq!(rows[0][2], 1.0);
    assert_eq!(rows[1][2], rows[3][2]);
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["driving", "--eta", "1", "--format", "json"]))).unwrap();
    assert!((v["delta"].as_f64().unwrap() + 0.282_763_261_364_731).abs() < 1e-12);
    assert_eq!(sshsim(&["driving", "--delta", "0.3"]).status.code(), Some(1));
    assert_eq!(sshsim(&["winding", "--phase0", "0.3"]).status.code(), Some(1));

    // driven chain at eta = 1 is trivial
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["winding", "--eta", "1"]))).unwrap();
    assert_eq!(v["winding"], 0);
}

#[test]
fn dynamics_commands() {
    let (header, rows) = csv_rows(&stdout(&sshsim(&["approx-compare", "--delta", "0.7", "--steps", "400"])));
    assert_eq!(header, ["t", "exact_1A", "approx_1A", "exact_NB", "approx_NB"]);
    assert_eq!(rows.len(), 401);
    assert!(rows.iter().all(|r| (r[1] - r[2]).abs() < 0.15));
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["approx-compare", "--delta", "0.7", "--format", "json"]))).unwrap();
    // bulk admixture of |1_A> keeps the deviation near 0.12 at this dimerization
    let dev = v["max_deviation_1a"].as_f64().unwrap();
    assert!((dev - 0.119).abs() < 0.005, "{dev}");
    assert!((v["period"].as_f64().unwrap() - 347.045).abs() < 0.01);

    let (_, rows) = csv_rows(&stdout(&sshsim(&[
        "fidelity-sweep", "--delta", "0.7", "--gammas", "0,0.001", "--tmax", "300", "--steps", "3000",
    ])));
    assert_eq!(rows.len(), 2);
    assert!(rows[0][1] > 0.99 && rows[1][1] < rows[0][1]);
}

#[test]
fn hz_units_need_a_profile() {
    assert_eq!(sshsim(&["bandgap", "--delta", "0.3", "--units", "hz"]).status.code(), Some(1));
    let out = sshsim(&[
        "bandgap", "--delta", "0.5", "--units", "hz", "--g-c", "25e6", "--delta-be", "1.067e9", "--l-c", "1", "--d0", "1e-9",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    // M/2pi = g_c^2 / (2 Delta) with d0 = 0; half gap = 2|delta| M
    let m_hz = 25e6f64 * 25e6 / (2.0 * 1.067e9);
    assert!((v["half_gap"].as_f64().unwrap() - m_hz).abs() < 1e-6 * m_hz);
}

#[test]
fn parameter_report() {
    let (text, code) = {
        let o = sshsim(&["estimate-params", "--format", "csv"]);
        (stdout(&o), o.status.code())
    };
    assert_eq!(code, Some(0));
    assert!(text.starts_with("name,unit,computed,quoted,note\n"));
    assert!(text.contains("m_over_2pi,Hz,292877.225867,1500000,"));
    let v: Value = serde_json::from_str(&stdout(&sshsim(&["estimate-params"]))).unwrap();
    assert_eq!(v["inputs"]["g_c_hz"], 25e6);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn library_entry_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gap.csv");
    let p = path.to_str().unwrap();
    assert_eq!(sshsim_cli::run(["sshsim", "bandgap", "--delta", "0.2", "--format", "csv", "--output", p]), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "delta,j1,j2,half_gap,full_gap,k_min\n0.2,0.8,1.2,0.4,0.8,3.14159265359\n");
    assert_eq!(sshsim_cli::run(["sshsim", "bandgap"]), 1);
}
