//! End-to-end exercises of the command layer: golden record, determinism,
//! config diagnostics, sweep parallelism, norms.

use borewave_cli::{commands, GlobalOpts, NormArgs};
use std::fs;
use std::path::{Path, PathBuf};

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn quiet(out: Option<PathBuf>) -> GlobalOpts {
    GlobalOpts { out, threads: 1, seed: 0, quiet: true }
}

#[test]
fn reference_run_matches_golden_record() {
    let dir = tempfile::tempdir().unwrap();
    let summary =
        commands::cmd_run(&repo_config("reference-bore-1d.toml"), &quiet(Some(dir.path().into())))
            .unwrap();
    assert_eq!(summary.exit_code, 0);
    let golden: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/record.json"))
            .unwrap(),
    )
    .unwrap();
    let got: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("record.json")).unwrap()).unwrap();
    for key in ["r0_eps", "final_u_s", "margin", "threshold", "final_e_norm", "final_t"] {
        let a = golden[key].as_f64().unwrap();
        let b = got[key].as_f64().unwrap();
        assert!(
            (a - b).abs() <= 1e-9 * a.abs().max(1e-12),
            "{key}: golden {a} vs fresh {b}"
        );
    }
    assert_eq!(golden["termination"]["kind"], got["termination"]["kind"]);
    // artifacts exist and the SVG is self-contained
    let svg = fs::read_to_string(dir.path().join("us.svg")).unwrap();
    assert!(svg.starts_with("<svg") && !svg.contains("href"));
    assert!(dir.path().join("eta_final.bin").exists());
}

#[test]
fn identical_config_gives_byte_identical_ledger() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [&d1, &d2] {
        commands::cmd_run(&repo_config("gaussian-direct.toml"), &quiet(Some(d.path().into())))
            .unwrap();
    }
    let a = fs::read(d1.path().join("ledger.csv")).unwrap();
    let b = fs::read(d2.path().join("ledger.csv")).unwrap();
    assert_eq!(a, b, "ledger CSV must be byte-identical across reruns");
}

#[test]
fn zero_data_run_is_clean_with_zero_norms() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[grid]
dim = 1
length = [40.0]
points = [128]
[params]
b = 0.16666666666666666
d = 0.16666666666666666
eps = 0.1
[init]
pipeline = "direct"
kind = "zero"
[solver]
dt = 0.02
t_end = 1.0
[ledger]
stride = 0.1
s = 2.0
r = 2.0
"#;
    let path = dir.path().join("zero.toml");
    fs::write(&path, cfg).unwrap();
    let summary = commands::cmd_run(&path, &quiet(Some(dir.path().into()))).unwrap();
    assert_eq!(summary.exit_code, 0);
    let csv = fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let u_s: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(u_s, 0.0);
    }
}

#[test]
fn missing_field_is_named_in_the_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let broken = r#"
[grid]
dim = 1
length = [40.0]
points = [128]
[params]
b = 0.1
d = 0.1
[init]
pipeline = "direct"
kind = "zero"
[solver]
dt = 0.02
t_end = 1.0
[ledger]
stride = 0.1
s = 2.0
r = 2.0
"#;
    let path = dir.path().join("broken.toml");
    fs::write(&path, broken).unwrap();
    let err = commands::cmd_run(&path, &quiet(None)).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains("eps"), "diagnostic must name the missing field: {msg}");
}

#[test]
fn sweep_parallelism_is_bitwise_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
[grid]
dim = 1
length = [80.0]
points = [512]
[params]
b = 0.16666666666666666
d = 0.16666666666666666
eps = 0.1
[init]
pipeline = "bore-1d"
kind = "tanh"
eta_minus = -0.5
eta_plus = 0.5
[solver]
dt = 0.05
t_end = 2.0
[ledger]
stride = 0.25
s = 2.0
r = 2.0
track_blocks = false
[threshold]
enabled = true
halt_on_contamination = false
"#;
    let path = dir.path().join("sweep.toml");
    fs::write(&path, cfg).unwrap();
    let eps = [0.1, 0.05, 0.025];
    let serial = commands::cmd_sweep_eps(&path, &eps, &quiet(None)).unwrap();
    let mut par_opts = quiet(None);
    par_opts.threads = 2;
    let parallel = commands::cmd_sweep_eps(&path, &eps, &par_opts).unwrap();
    assert_eq!(serial.ledger_csvs, parallel.ledger_csvs, "per-eps ledgers must match bitwise");
    assert_eq!(serial.fit_note, parallel.fit_note);

    // duplicates rejected
    let dup = commands::cmd_sweep_eps(&path, &[0.1, 0.1, 0.05], &quiet(None));
    assert!(dup.is_err());
    // fewer than three values rejected
    assert!(commands::cmd_sweep_eps(&path, &[0.1, 0.05], &quiet(None)).is_err());
}

#[test]
fn norms_command_reads_binary_fields() {
    let dir = tempfile::tempdir().unwrap();
    let grid = borewave::GridSpec::new_1d(2.0 * std::f64::consts::PI, 64).unwrap();
    let field = borewave::Field::from_fn(&grid, |x| (2.0 * x[0]).cos());
    let path = dir.path().join("field.bin");
    let mut f = fs::File::create(&path).unwrap();
    borewave::io::write_field_binary(&field, &mut f).unwrap();
    drop(f);
    let reports = commands::cmd_norms(
        &NormArgs {
            field: path,
            s: 0.0,
            p: "2".into(),
            r: 2.0,
            eps: Some(0.25),
            b: Some(1.0),
            d: Some(0.0),
        },
        &quiet(None),
    )
    .unwrap();
    // B^0_{2,2} of cos(2x) on L=2π is its L² norm √π
    let besov = &reports[0];
    assert!((besov.value - std::f64::consts::PI.sqrt()).abs() < 1e-10);
    assert_eq!(reports.len(), 3);
}
