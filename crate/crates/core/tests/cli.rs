use std::path::{Path, PathBuf};
use std::process::Command;

use ris_sim::dps::{DpsModel, StateCode};
use ris_sim::scenario::{ResultTable, RunManifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ris-sim"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn manifest(dir: &Path) -> RunManifest {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn sweep_writes_results_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(bin().args(["sweep", "--experiment", "dps_state_sweep", "--config"]).arg(config("single_element.toml")).arg("--out").arg(dir.path()));
    let t = ResultTable::read_csv(dir.path().join("results.csv")).unwrap();
    assert_eq!(t.len(), 16);
    let m = manifest(dir.path());
    assert_eq!(m.command, "sweep");
    assert_eq!(m.version, env!("CARGO_PKG_VERSION"));
    assert_eq!(m.arguments["experiment"], "dps_state_sweep");
    assert!(m.config.is_some());
    assert!(dir.path().join("dps_states.csv").exists());
}

#[test]
fn eval_accepts_digest_or_file() {
    let dir = tempfile::tempdir().unwrap();
    let digest = "7444744474447444";
    run_ok(bin().args(["eval", "--states", digest, "--config"]).arg(config("los_exhaustive.toml")).arg("--out").arg(dir.path().join("a")));
    let file = dir.path().join("states.txt");
    std::fs::write(&file, format!("{digest}\n")).unwrap();
    run_ok(bin().args(["eval", "--config"]).arg(config("los_exhaustive.toml")).arg("--states").arg(&file).arg("--out").arg(dir.path().join("b")));
    let a = std::fs::read(dir.path().join("a/results.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/results.csv")).unwrap();
    assert_eq!(a, b);

    let bad = bin().args(["eval", "--states", "12", "--config"]).arg(config("los_exhaustive.toml")).arg("--out").arg(dir.path().join("c")).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn optimize_records_seed_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(bin().args(["optimize", "--tr", "10", "--tg", "1", "--seed", "42", "--config"]).arg(config("los_exhaustive.toml")).arg("--out").arg(dir.path()));
    let m = manifest(dir.path());
    assert_eq!(m.seed, Some(42));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    // RMS: all-zero plus 10 draws; GS: 16 elements x 16 codes
    assert_eq!(trace.lines().count(), 1 + 11 + 256);
    let t = ResultTable::read_csv(dir.path().join("results.csv")).unwrap();
    assert_eq!(t.rows[0].evaluation_count, 267);
}

#[test]
fn track_and_exhaustive_run() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(bin().args(["track", "--activation", "0.1", "--config"]).arg(config("walk_matched.toml")).arg("--out").arg(dir.path().join("t")));
    let t = ResultTable::read_csv(dir.path().join("t/results.csv")).unwrap();
    assert_eq!(t.method("tracking_0.100m").count(), 21);

    run_ok(bin().args(["exhaustive", "--config"]).arg(config("los_exhaustive.toml")).arg("--out").arg(dir.path().join("e")));
    let pmf = std::fs::read_to_string(dir.path().join("e/pmf.csv")).unwrap();
    assert!(pmf.starts_with("bin_low_db,bin_high_db,count,probability"));
}

#[test]
fn fit_dps_from_touchstone_directory() {
    let dir = tempfile::tempdir().unwrap();
    let s2p = dir.path().join("s2p");
    std::fs::create_dir(&s2p).unwrap();
    // Through lines whose phases are half the Table I reflection phases.
    let m = DpsModel::table_one();
    for code in StateCode::all(4) {
        let (db, deg) = m.state_db_deg(code);
        let amp = 10f64.powf(db / 40.0);
        let half = (deg - m.gamma0_deg) / 2.0;
        let mut text = String::from("! synthetic\n# GHZ S MA R 50\n");
        for f in [3.4, 3.5, 3.6] {
            text += &format!("{f} 0 0 {amp} {half} {amp} {half} 0 0\n");
        }
        std::fs::write(s2p.join(format!("state_{:02}.s2p", code.value())), text).unwrap();
    }
    let model = dir.path().join("model.toml");
    run_ok(bin().arg("fit-dps").arg(&s2p).arg("-o").arg(&model).arg("--out").arg(dir.path().join("o")));
    let fitted = DpsModel::from_toml(&std::fs::read_to_string(&model).unwrap()).unwrap();
    for (a, b) in fitted.orders.iter().zip(&m.orders) {
        assert!((a.phase_deg - b.phase_deg).abs() < 1e-6, "{a:?} {b:?}");
        assert!((a.attenuation_db - b.attenuation_db).abs() < 1e-6);
    }
    assert!(dir.path().join("o/dps_fit.csv").exists());
    assert_eq!(manifest(&dir.path().join("o")).command, "fit-dps");
}

#[test]
fn unknown_experiment_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["sweep", "--experiment", "nope", "--config"]).arg(config("los_exhaustive.toml")).arg("--out").arg(dir.path()).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment"));
}
