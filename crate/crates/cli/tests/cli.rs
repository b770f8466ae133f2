use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gencx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gencx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn check<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check named {name}"))
}

fn residual_rows(dir: &Path) -> Vec<(usize, f64, f64)> {
    let mut reader = csv::Reader::from_path(dir.join("residuals.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["order", "residual_norm", "beta_norm", "wall_ms"]
    );
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap())
        })
        .collect()
}

fn deform(config_name: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = config(config_name);
    let out = dir.to_string_lossy().into_owned();
    let mut args = vec!["deform", "--config", cfg.as_str(), "--out", out.as_str(), "--json"];
    args.extend_from_slice(extra);
    gencx(&args)
}

#[test]
fn verify_algebra_default_run_passes() {
    let out = gencx(&["verify-algebra", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["parameters"]["n_max"], 3);
    assert_eq!(report["parameters"]["trials"], 200);
    assert!(report["checks"].as_array().unwrap().len() > 20);
}

#[test]
fn verify_algebra_zero_trials_is_an_empty_pass() {
    let out = gencx(&["verify-algebra", "--trials", "0", "--json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().is_empty());
}

#[test]
fn corrupted_star_fails_only_the_star_identity() {
    let out = gencx(&["verify-algebra", "--n-max", "2", "--trials", "10", "--corrupt-star"]);
    assert_eq!(code(&out), 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().all(|l| l.contains("star identity")), "{stderr}");
    assert!(stdout(&out).contains("FAIL  m=2 star identity"));
}

#[test]
fn verify_algebra_is_byte_identical_across_runs() {
    let args = ["verify-algebra", "--seed", "11", "--n-max", "2", "--trials", "15", "--json"];
    assert_eq!(gencx(&args).stdout, gencx(&args).stdout);
}

#[test]
fn hodge_on_kaehler_t2_gives_ratio_four() {
    let cfg = config("kaehler_t2.toml");
    let out = gencx(&["verify-hodge", "--config", &cfg, "--json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = json(&out);
    for name in ["delta+", "delta+bar", "delta-", "delta-bar"] {
        let c = check(&report, &format!("Lap(dH) = 4 Lap({name})"));
        assert_eq!(c["status"], "pass");
        assert!(c["value"].as_f64().unwrap() <= 1e-9);
    }
    let ratio = check(&report, "Rayleigh ratio Lap(dH) / Lap(delta+)")["value"].as_f64().unwrap();
    assert!((ratio - 4.0).abs() < 1e-9);
}

#[test]
fn hodge_on_kaehler_t4_has_four_component_pattern() {
    let cfg = config("kaehler_t4.toml");
    let out = gencx(&["verify-hodge", "--config", &cfg, "--json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = json(&out);
    let c = check(&report, "components of d^H outside delta+-, delta+-bar");
    assert!(c["value"].as_f64().unwrap() < 1e-12);
    for name in ["delta+", "delta+bar", "delta-", "delta-bar"] {
        assert!(check(&report, &format!("{name} component size"))["value"].as_f64().unwrap() > 0.1);
    }
}

#[test]
fn hodge_on_hermitian_only_reports_torsion_of_second_structure() {
    let cfg = config("hermitian_t4.toml");
    let out = gencx(&["verify-hodge", "--config", &cfg, "--json"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = json(&out);
    assert!(check(&report, "J2 torsion components are nonzero")["value"].as_f64().unwrap() > 1e-3);
    assert!(check(&report, "J2 Nijenhuis tensor max entry")["value"].as_f64().unwrap() > 1e-3);
    assert_eq!(check(&report, "J1 torsion components vanish")["status"], "pass");
    assert_eq!(check(&report, "anticommutators")["status"], "skipped");
}

#[test]
fn hodge_reports_are_byte_identical() {
    let cfg = config("kaehler_t4.toml");
    let args = ["verify-hodge", "--config", cfg.as_str(), "--json"];
    assert_eq!(gencx(&args).stdout, gencx(&args).stdout);
}

#[test]
fn constant_poisson_residuals_vanish() {
    let dir = tempfile::tempdir().unwrap();
    let out = deform("poisson_t4.toml", dir.path(), &[]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let rows = residual_rows(dir.path());
    assert_eq!(rows.iter().map(|r| r.0).collect::<Vec<_>>(), [1, 2, 3, 4]);
    for (_, residual, beta) in rows {
        assert!(residual < 1e-12);
        assert_eq!(beta, 0.0);
    }
}

#[test]
fn exact_b_field_run_passes_with_nonzero_correction() {
    let dir = tempfile::tempdir().unwrap();
    let out = deform("bfield_t4.toml", dir.path(), &[]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let rows = residual_rows(dir.path());
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().any(|r| r.2 > 1e-3));
    assert!(rows.iter().all(|r| r.1 <= 1e-9));

    let series: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("series.json")).unwrap()).unwrap();
    assert_eq!(series["order"], 4);
    assert_eq!(series["beta"].as_array().unwrap().len(), 4);
    let term = &series["beta"][0]["terms"][0];
    assert_eq!(term["k"].as_array().unwrap().len(), 4);
    assert!(term["k"][0].is_i64());
    let entry = term["matrix"][0][0].as_str().unwrap();
    assert!(entry.starts_with('(') && entry.ends_with(')') && entry.contains(','));
    assert_eq!(series["psi_series"].as_array().unwrap().len(), 5);

    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(report.as_bytes(), out.stdout.as_slice());
    assert!(!report.contains("wall_ms"));
}

#[test]
fn deform_reports_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = deform("poisson_t4.toml", a.path(), &["--order", "2"]);
    let rb = deform("poisson_t4.toml", b.path(), &["--order", "2"]);
    assert_eq!(ra.stdout, rb.stdout);
    let read = |d: &Path, f: &str| std::fs::read(d.join(f)).unwrap();
    assert_eq!(read(a.path(), "report.json"), read(b.path(), "report.json"));
    assert_eq!(read(a.path(), "series.json"), read(b.path(), "series.json"));
}

#[test]
fn unreachable_tolerance_is_a_residual_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = deform("bfield_t4.toml", dir.path(), &["--order", "1", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
}

#[test]
fn non_integrable_deformation_is_a_precondition_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = deform("nonintegrable_t4.toml", dir.path(), &[]);
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    let report = json(&out);
    assert_eq!(check(&report, "deformation of J1 is integrable")["status"], "fail");
    assert!(!dir.path().join("series.json").exists());
}

#[test]
fn malformed_config_is_a_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let target: PathBuf = dir.path().join("never");
    let out = deform("malformed.toml", &target, &[]);
    assert_eq!(code(&out), 64);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unexpected_key"));
    assert!(!target.exists());
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = gencx(&["verify-hodge", "--config", "/nonexistent/gencx.toml"]);
    assert_eq!(code(&out), 64);
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(code(&gencx(&["deform", "--bogus"])), 64);
}

#[test]
fn order_out_of_range_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&deform("poisson_t4.toml", dir.path(), &["--order", "0"])), 64);
}
