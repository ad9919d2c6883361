//! Drives the `casimir` binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FAST: &str = r#"
seed = 11

[units]
system = "reduced"

[thermo]
beta = 1.0
hbar = 1.0
c = 5.0

[slab_a]
thickness = 6.0

[[slab_a.species]]
name = "cation"
charge = 1.0
mass = MASS
density = 0.039788735772973836

[[slab_a.species]]
name = "anion"
charge = -1.0
mass = MASS
density = 0.039788735772973836

[numerics]
classical = true
coupled_force = false

[sweep]
d = [100.0, 200.0, 400.0]
"#;

fn fast(mass: f64) -> String {
    FAST.replace("MASS", &format!("{mass:?}"))
}

fn casimir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_to(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![extra[0], cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()];
    args.extend_from_slice(&extra[1..]);
    casimir(&args)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn zeta3_verb_prints_both_values() {
    let o = casimir(&["zeta3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("quadrature  0.6010284"), "{text}");
    assert!(text.contains("series      0.6010284"), "{text}");
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let cases = [
        ("syntax.toml", "seed = = 3".to_string()),
        ("unknown.toml", fast(100.0).replace("seed = 11", "seed = 11\nbogus = 1")),
        ("charged.toml", fast(100.0).replace("charge = -1.0", "charge = -2.0")),
        ("negative.toml", fast(100.0).replace("thickness = 6.0", "thickness = -6.0")),
    ];
    for (name, text) in cases {
        let cfg = write(tmp.path(), name, &text);
        let o = run_to(&cfg, &out, &["run"]);
        assert_eq!(code(&o), 2, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = casimir(&["run", tmp.path().join("absent.toml").to_str().unwrap()]);
    assert_eq!(code(&missing), 2);

    let cfg = write(tmp.path(), "ok.toml", &fast(100.0));
    let bad_tol = run_to(&cfg, &out, &["run", "--tol-overrides", "no_such_tol=1"]);
    assert_eq!(code(&bad_tol), 2);
    let bad_d = run_to(&cfg, &out, &["sweep", "--d-list", "100,-1"]);
    assert_eq!(code(&bad_d), 2);
}

#[test]
fn run_is_reproducible_and_writes_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "fast.toml", &fast(100.0));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run_to(&cfg, &a, &["run"])), 0);
    assert_eq!(code(&run_to(&cfg, &b, &["run", "--sequential"])), 0);
    let ra = fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, fs::read(b.join("report.json")).unwrap());
    assert!(a.join("timing.json").exists());

    let r = report(&a);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        for key in ["f_leading", "capacitor_el", "capacitor_mag_exponent", "config_hash"] {
            assert!(!row[key].is_null(), "missing {key}");
        }
        for key in ["eq2", "eq3", "eq4", "eq5"] {
            assert!(row["lifshitz"][key].is_number(), "missing lifshitz.{key}");
        }
        assert!(row["residuals"].is_object());
        assert_eq!(row["config_hash"], r["config_hash"]);
        assert_eq!(row["capacitor_el"].as_f64(), Some(0.0));
    }
    assert_eq!(fs::read_to_string(a.join("sweep.csv")).unwrap().lines().count(), 4);

    // A different seed changes the hash but not the deterministic force.
    let c = tmp.path().join("c");
    assert_eq!(code(&run_to(&cfg, &c, &["run", "--seed", "12"])), 0);
    let rc = report(&c);
    assert_ne!(rc["config_hash"], r["config_hash"]);
    assert_eq!(rc["rows"][0]["f_leading"], r["rows"][0]["f_leading"]);
}

#[test]
fn sweep_follows_inverse_cube() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "fast.toml", &fast(100.0));
    let probe = tmp.path().join("probe");
    assert_eq!(code(&run_to(&cfg, &probe, &["run"])), 0);
    let lambda = report(&probe)["lambda_screen"].as_f64().unwrap();
    let list: Vec<String> = [50.0, 100.0, 200.0, 400.0].iter().map(|x| format!("{:?}", x * lambda)).collect();

    let out = tmp.path().join("sweep");
    let o = run_to(&cfg, &out, &["sweep", "--d-list", &list.join(",")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut csv = csv::Reader::from_path(out.join("sweep.csv")).unwrap();
    let col = csv.headers().unwrap().iter().position(|h| h == "f_assembled").unwrap();
    let f: Vec<f64> = csv.records().map(|r| r.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(f.len(), 4);
    let slope = report(&out)["fits"]["f_assembled_vs_d"]["slope"].as_f64().unwrap();
    assert!((slope + 3.0).abs() < 0.05, "slope {slope}");
    // Direct check on the CSV numbers.
    let s = (f[3].abs() / f[0].abs()).ln() / 8f64.ln();
    assert!((s + 3.0).abs() < 0.05, "csv slope {s}");
}

#[test]
fn leading_force_ignores_masses() {
    let tmp = TempDir::new().unwrap();
    let light = write(tmp.path(), "light.toml", &fast(100.0));
    let heavy = write(tmp.path(), "heavy.toml", &fast(2500.0));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&run_to(&light, &a, &["run"])), 0);
    assert_eq!(code(&run_to(&heavy, &b, &["run"])), 0);
    let (ra, rb) = (report(&a), report(&b));
    for i in 0..3 {
        assert_eq!(ra["rows"][i]["f_leading"], rb["rows"][i]["f_leading"]);
    }
}

#[test]
fn unscreened_slabs_fail_certification() {
    let tmp = TempDir::new().unwrap();
    let text = fast(100.0).replace("density = 0.039788735772973836", "density = 0.0");
    let cfg = write(tmp.path(), "empty.toml", &text);
    let o = run_to(&cfg, &tmp.path().join("out"), &["run"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bracket_a"));
}

#[test]
fn si_config_runs() {
    let tmp = TempDir::new().unwrap();
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/si_electrolyte.toml");
    let out = tmp.path().join("si");
    let o = run_to(&cfg, &out, &["run"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["units"]["system"], "si");
    let exponent = r["capacitor_mag_exponent"].as_f64().unwrap();
    assert!(exponent > 4.0, "{exponent}");
}
