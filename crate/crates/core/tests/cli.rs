//! End-to-end runs of the `wormsim` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wormsim::experiment::{SweepConfig, SweepReport, Table};

fn wormsim(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wormsim"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn wormsim")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("sweep.toml");
    fs::write(&path, text).unwrap();
    path
}

const SMALL: &str = r#"
mode = "compare"
rounds = 30
master_seed = 5

[model]
n_total = 60
beta = 1e-4
i_a0 = 1
i_b0 = 1

[sweep]
axis = "y"
points = 4
"#;

#[test]
fn presets_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        SweepConfig::load(&path, &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 4);
}

#[test]
fn ode_and_simulate_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = wormsim(dir.path(), &["ode", "-n", "200", "--beta", "3e-5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["trajectory.csv", "metrics.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let o = wormsim(dir.path(), &["simulate", "-n", "50", "--beta", "2e-4", "--rounds", "20", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rounds = fs::read_to_string(dir.path().join("rounds.csv")).unwrap();
    assert_eq!(rounds.lines().count(), 21);
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&wormsim(dir.path(), &["no-such-command"])), 1);
    assert_eq!(code(&wormsim(dir.path(), &["ode", "-n", "10", "--ia", "9", "--ib", "9"])), 1);
    assert_eq!(code(&wormsim(dir.path(), &["sweep"])), 1);
    let cfg = write_config(dir.path(), "mode = \"compare\"\nbogus = 1\n");
    let o = wormsim(dir.path(), &["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(code(&wormsim(dir.path(), &["--help"])), 0);
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let o = wormsim(&a, &["--config", cfg.to_str().unwrap(), "--threads", "1", "sweep"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = wormsim(&b, &["--config", cfg.to_str().unwrap(), "--threads", "3", "sweep"]);
    assert_eq!(code(&o), 0);
    for f in ["report.json", "points.csv", "rounds/point_0.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    wormsim(&c, &["--config", cfg.to_str().unwrap(), "--seed", "6", "sweep"]);
    assert_ne!(fs::read(a.join("report.json")).unwrap(), fs::read(c.join("report.json")).unwrap());
}

#[test]
fn emit_plots_schema_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&wormsim(dir.path(), &["--config", cfg, "sweep"])), 0);
    let o = wormsim(dir.path(), &["emit-plots", "--figure", "fig2", "--figure", "fig3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let header = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), "y,ti_rel,mi_rel,ti_rel_model,mi_rel_model");
    let report = SweepReport::from_json_file(dir.path().join("report.json")).unwrap();
    let table = Table::read(&dir.path().join("fig2.csv")).unwrap();
    for (row, point) in table.rows.iter().zip(&report.points) {
        let sim = point.simulation.as_ref().unwrap();
        assert_eq!(row[0], point.value);
        assert_eq!(row[1].unwrap().to_bits(), sim.ti_relative.mean.to_bits());
        assert_eq!(row[2].unwrap().to_bits(), sim.mi_relative.mean.to_bits());
    }

    // a Y sweep has no c/i grid
    assert_eq!(code(&wormsim(dir.path(), &["emit-plots", "--figure", "fig6"])), 1);
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let loose = format!("{SMALL}\n[validate.thresholds]\nmi_rel = 100.0\nti_rel = 100.0\n");
    let cfg = write_config(dir.path(), &loose);
    let o = wormsim(dir.path(), &["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let tight = format!("{SMALL}\n[validate.thresholds]\nmi_rel = 1e-9\n");
    let cfg = write_config(dir.path(), &tight);
    let o = wormsim(dir.path(), &["--config", cfg.to_str().unwrap(), "validate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn synthetic_trace_stats_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let o = wormsim(
        dir.path(),
        &["synth-trace", "--nodes", "150", "--days", "10", "--mean-rate", "1e-7", "--output", trace.to_str().unwrap()],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = wormsim(dir.path(), &["trace-stats", "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trace_stats.json")).unwrap()).unwrap();
    assert!(stats.is_object());
    let o = wormsim(dir.path(), &["trace-replay", "--trace", trace.to_str().unwrap(), "--rounds", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = wormsim(dir.path(), &["trace-replay", "--trace", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}
