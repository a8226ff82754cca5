use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    summary: Value,
    stderr: String,
}

fn ringqpe(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ringqpe"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().unwrap(),
        summary: serde_json::from_str(stdout.trim()).unwrap_or(Value::Null),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(TAU) - PI
}

fn circ(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

fn schema_check(name: &str, summary: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("schemas/{name}.schema.json"));
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(summary)
        .map(|e| e.to_string())
        .collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn evolve_defaults_reproduce_the_revival() {
    let tmp = TempDir::new().unwrap();
    let r = ringqpe(tmp.path(), &["--out", "o", "evolve"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    schema_check("evolve", &r.summary);
    let g = 1024;
    for k in 0..3 {
        let (header, rows) = read_csv(&tmp.path().join(format!("o/evolve_t{k}.csv")));
        assert_eq!(header, ["phi", "re_psi", "im_psi", "density"]);
        assert_eq!(rows.len(), g);
        assert!(rows.iter().all(|r| r[0] >= -PI && r[0] < PI));
        assert!(tmp.path().join(format!("o/evolve_t{k}.svg")).exists());
    }
    let peaks = r.summary["peak_angles"].as_array().unwrap();
    assert_eq!(f(&peaks[0]), 0.0);
    assert!(circ(f(&peaks[2]), -1.4) <= TAU / g as f64);
    let times = r.summary["times"].as_array().unwrap();
    assert!((f(&times[2]) - 4.0 * PI).abs() < 1e-12);
    assert!((f(&times[1]) - 4.0 * PI / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn evolve_without_flux_returns() {
    let tmp = TempDir::new().unwrap();
    let r = ringqpe(
        tmp.path(),
        &["--out", "o", "--format", "csv", "evolve", "--flux", "0"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, a) = read_csv(&tmp.path().join("o/evolve_t0.csv"));
    let (_, b) = read_csv(&tmp.path().join("o/evolve_t2.csv"));
    for (ra, rb) in a.iter().zip(&b) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
    // only the requested format
    assert!(!tmp.path().join("o/evolve_t0.svg").exists());
    assert!(!tmp.path().join("o/evolve.json").exists());
}

#[test]
fn qpe_reads_the_flux() {
    let tmp = TempDir::new().unwrap();
    let r = ringqpe(tmp.path(), &["--out", "o", "qpe"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    schema_check("qpe", &r.summary);
    assert!(f(&r.summary["abs_error"]) <= TAU / 1024.0);
    assert!((f(&r.summary["flux_principal"]) - 0.7).abs() < 1e-3);
    assert!(r.summary.get("register_peak").is_none());

    let r = ringqpe(tmp.path(), &["--out", "o", "qpe", "--flux", "0"]);
    assert_eq!(r.code, 0);
    assert!(f(&r.summary["phase_estimate"]).abs() <= 1e-9);

    let r = ringqpe(tmp.path(), &["--out", "o", "qpe", "--t-qubits", "8"]);
    assert_eq!(r.code, 0);
    schema_check("qpe", &r.summary);
    assert!(f(&r.summary["ring_register_difference"]) <= TAU / 256.0);
    let (header, rows) = read_csv(&tmp.path().join("o/qpe_register.csv"));
    assert_eq!(header, ["outcome", "phase", "probability"]);
    assert_eq!(rows.len(), 256);
}

#[test]
fn qpe_samples_are_seeded() {
    let tmp = TempDir::new().unwrap();
    let args = ["--out", "o", "--seed", "11", "qpe", "--samples", "500"];
    let a = ringqpe(tmp.path(), &args);
    let first = fs::read(tmp.path().join("o/qpe_samples.csv")).unwrap();
    let b = ringqpe(tmp.path(), &args);
    assert_eq!(a.summary, b.summary);
    assert_eq!(
        first,
        fs::read(tmp.path().join("o/qpe_samples.csv")).unwrap()
    );
    let (_, rows) = read_csv(&tmp.path().join("o/qpe_samples.csv"));
    assert_eq!(rows.iter().map(|r| r[1]).sum::<f64>(), 500.0);
    assert!(circ(f(&a.summary["sample_mode"]), -1.4) < 0.1);
}

#[test]
fn nonabelian_scalar_gauge_matches_qpe() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[gauge]\ndim = 1\ncoefficients = [0.7]\n");
    let na = ringqpe(tmp.path(), &["--config", &cfg, "--out", "o", "nonabelian"]);
    assert_eq!(na.code, 0, "{}", na.stderr);
    schema_check("nonabelian", &na.summary);
    let qpe = ringqpe(tmp.path(), &["--out", "o", "qpe", "--flux", "0.7"]);
    let ch = &na.summary["channels"][0];
    assert!((f(&ch["peak_angle"]) - f(&qpe.summary["phase_estimate"])).abs() < 1e-12);
    assert!((f(&ch["expected_phase"]) - 1.4).abs() < 1e-12);
}

#[test]
fn nonabelian_random_and_zero() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "[gauge]\ndim = 3\nrandom = true\n");
    let r = ringqpe(
        tmp.path(),
        &["--config", &cfg, "--out", "o", "--seed", "5", "nonabelian"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let channels = r.summary["channels"].as_array().unwrap();
    assert_eq!(channels.len(), 3);
    for (c, theta) in channels
        .iter()
        .zip(r.summary["theta_eigenvalues"].as_array().unwrap())
    {
        assert!(circ(f(&c["phase_estimate"]), 2.0 * f(theta)) <= TAU / 1024.0);
    }
    for b in 0..3 {
        assert!(tmp
            .path()
            .join(format!("o/nonabelian_channel{b}.csv"))
            .exists());
    }

    let cfg = write_config(
        tmp.path(),
        "[gauge]\ndim = 2\nmatrix_re = [[0, 0], [0, 0]]\n",
    );
    let r = ringqpe(tmp.path(), &["--config", &cfg, "--out", "o", "nonabelian"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    for c in r.summary["channels"].as_array().unwrap() {
        assert!(f(&c["phase_estimate"]).abs() < 1e-9);
    }
}

#[test]
fn nonabelian_rejects_bad_gauges() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[gauge]\ndim = 2\nmatrix_re = [[0, 1], [0, 0]]\n",
    );
    let r = ringqpe(tmp.path(), &["--config", &cfg, "--out", "o", "nonabelian"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("gauge.matrix_re"), "{}", r.stderr);
    assert!(r.stderr.contains("residual"), "{}", r.stderr);

    let r = ringqpe(tmp.path(), &["--out", "o", "nonabelian"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("gauge"));

    let cfg = write_config(
        tmp.path(),
        "[gauge]\ndim = 2\nrandom = true\ncoefficients = [0, 0, 0, 0]\n",
    );
    assert_eq!(
        ringqpe(tmp.path(), &["--config", &cfg, "nonabelian"]).code,
        1
    );
}

#[test]
fn pathint_defaults() {
    let tmp = TempDir::new().unwrap();
    let r = ringqpe(tmp.path(), &["--out", "o", "pathint", "check-poisson"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    schema_check("poisson", &r.summary);
    assert!(f(&r.summary["relative_difference"]) <= 1e-6);
    assert_eq!(r.summary["dominance_decreasing"], Value::Bool(true));

    let r = ringqpe(tmp.path(), &["--out", "o", "pathint", "propagator"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    schema_check("propagator", &r.summary);
    assert!(f(&r.summary["config_space"]["residual"]) <= 5e-2);
    assert!(f(&r.summary["phase_space"]["residual"]) <= 1e-6);

    let r = ringqpe(tmp.path(), &["--out", "o", "pathint", "classical-scan"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    schema_check("scan", &r.summary);
    let (header, rows) = read_csv(&tmp.path().join("o/scan.csv"));
    assert_eq!(header[1], "return_time");
    assert_eq!(header[5], "d_star");
    for (row, tr) in rows.iter().zip([4.0 * PI, 40.0 * PI, 400.0 * PI]) {
        assert!((row[1] - tr).abs() <= 1e-12 * tr);
        assert!((row[5] - (8.0 * PI).sqrt() / 2.0).abs() < 1e-9);
    }
    let (header, _) = read_csv(&tmp.path().join("o/scan_paths.csv"));
    assert!(header[1..].iter().all(|h| h.contains("unwrapped")));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    // cost guard
    let r = ringqpe(
        tmp.path(),
        &["--out", "o", "pathint", "propagator", "--steps", "7"],
    );
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("steps 7 > 6"), "{}", r.stderr);
    // tolerance: the identity at the minimal cutoffs
    let r = ringqpe(
        tmp.path(),
        &[
            "--out",
            "o",
            "pathint",
            "check-poisson",
            "--poisson-cutoff",
            "40",
            "--windings",
            "5",
        ],
    );
    assert_eq!(r.code, 4);
    assert!(f(&r.summary["relative_difference"]) > 1e-6);
    // output directory is a file
    fs::write(tmp.path().join("taken"), "x").unwrap();
    assert_eq!(ringqpe(tmp.path(), &["--out", "taken", "evolve"]).code, 2);
    // grid cannot resolve the cutoff
    let r = ringqpe(tmp.path(), &["evolve", "--grid", "64"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("numerics.grid"));
}

#[test]
fn config_errors_name_the_field() {
    let tmp = TempDir::new().unwrap();
    for (text, field) in [
        ("[physics]\nfluxx = 1.0\n", "physics"),
        ("[physics]\nflux = \"a\"\n", "physics.flux"),
        ("[physics]\nhbar = -1.0\n", "physics.hbar"),
        ("[numerics]\ntimes = [0.0, -1.0]\n", "numerics.times[1]"),
        ("[output]\nformats = [\"png\"]\n", "output.formats"),
        ("[extra]\n", "extra"),
    ] {
        let cfg = write_config(tmp.path(), text);
        let r = ringqpe(tmp.path(), &["--config", &cfg, "evolve"]);
        assert_eq!(r.code, 1, "{text}");
        assert!(r.stderr.contains(field), "{text}: {}", r.stderr);
    }
}

#[test]
fn flags_override_the_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "[physics]\nflux = 0.3\n[numerics]\ncutoff = 40\ngrid = 256\n[output]\ndir = \"fromfile\"\nformats = [\"json\"]\n",
    );
    let r = ringqpe(tmp.path(), &["--config", &cfg, "qpe"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(f(&r.summary["flux"]), 0.3);
    assert!(tmp.path().join("fromfile/qpe.json").exists());
    assert!(!tmp.path().join("fromfile/qpe_distribution.csv").exists());
    let r = ringqpe(
        tmp.path(),
        &["--config", &cfg, "--out", "flag", "qpe", "--flux", "1.3"],
    );
    assert_eq!(f(&r.summary["flux"]), 1.3);
    assert!(tmp.path().join("flag/qpe.json").exists());
}

#[test]
fn no_temporary_files_left() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(ringqpe(tmp.path(), &["--out", "o", "evolve"]).code, 0);
    for entry in fs::read_dir(tmp.path().join("o")).unwrap() {
        let name = entry.unwrap().file_name().to_string_lossy().into_owned();
        assert!(!name.ends_with(".tmp"), "{name}");
    }
}
