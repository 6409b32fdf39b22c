use std::path::Path;
use std::process::{Command, Output};

fn edept(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edept"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL_GRIDS: &str = r#""grids": {
    "position": {
      "rho": {"kind": "radial_graded", "scale": 1.0, "width": 8.0, "max": 60.0, "n": 200},
      "z": {"kind": "symmetric_graded", "scale": 1.0, "width": 8.0, "half_width": 60.0, "n": 200}
    },
    "modes": {
      "rho": {"kind": "radial_sinh", "scale": 0.5, "max": 10.0, "n": 100},
      "z": {"kind": "symmetric_sinh", "scale": 0.5, "half_width": 10.0, "n": 100}
    },
    "truncation": {"edge_fraction": 1e-3, "enforce": true}
  }"#;

#[test]
fn default_validate_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = edept(&["validate"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(!stdout.contains("FAIL"));
    for name in ["maxwell_wave", "transversality", "electric_relation", "round_trip_t1", "parseval"] {
        assert!(stdout.contains(name), "missing {name}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "validate");
    assert!(summary["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn falloff_reports_tenth_power_detection_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out = edept(&["falloff", "--alpha", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("falloff_exponents.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "direction_deg,alpha,quantity,view,branch,exponent,prefactor,r_squared,check_exponent,window_gap,predicted,reliable"
    );
    let row = lines
        .find(|l| l.starts_with("4.5000000000000000e1,1,detection_rate,"))
        .expect("45 degree detection-rate row");
    let cols: Vec<&str> = row.split(',').collect();
    let p: f64 = cols[5].parse().unwrap();
    assert!((p - 10.0).abs() < 0.3, "{p}");
    assert_eq!(cols[10], "1.0000000000000000e1");
    let summary = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("1/r^7"));
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"schema_version": 1, "falloff": {"scan": {"windw": 3}}}"#);
    let out = edept(&["falloff", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("falloff.scan") && err.contains("windw"), "{err}");

    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(edept(&["fields", "--config", &cfg], dir.path()).status.code(), Some(2));
}

#[test]
fn usage_errors_and_help() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(edept(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(edept(&["fields", "--branch", "sideways"], dir.path()).status.code(), Some(2));
    assert_eq!(edept(&["fields", "--alpha", "0"], dir.path()).status.code(), Some(2));
    let help = Command::new(env!("CARGO_BIN_EXE_edept")).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn failed_check_exits_one_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{"schema_version": 1, {SMALL_GRIDS},
            "validation": {{"points": 50, "norm_doubling": false}},
            "tolerances": {{"maxwell": 1e-30}}}}"#
    );
    let cfg = write_config(dir.path(), &body);
    let out = edept(&["validate", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let checks = std::fs::read_to_string(dir.path().join("validate_checks.csv")).unwrap();
    assert!(checks.starts_with("name,value,tolerance,pass\n"));
    assert!(checks.contains("maxwell_wave,") && checks.contains(",false"));
}

#[test]
fn truncated_grid_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"schema_version": 1, "grids": {
        "position": {
          "rho": {"kind": "radial_linear", "max": 2.0, "n": 40},
          "z": {"kind": "symmetric_linear", "half_width": 2.0, "n": 40}
        }}}"#;
    let cfg = write_config(dir.path(), body);
    let out = edept(&["spectrum", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fields_and_spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{"schema_version": 1, {SMALL_GRIDS},
            "fields": {{"times": [0.0, 1.0],
                        "rho": {{"kind": "linear", "min": 0.0, "max": 2.0, "n": 4}},
                        "z": {{"kind": "linear", "min": -1.0, "max": 1.0, "n": 2}}}}}}"#
    );
    let cfg = write_config(dir.path(), &body);
    let out = edept(&["fields", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("fields.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,rho,z,re_A_theta,im_A_theta,re_E_theta,im_E_theta,re_B_rho,im_B_rho,re_B_z,im_B_z,u_e,u_m,u_total,detection_rate"
    );
    assert_eq!(lines.len(), 1 + 2 * 5 * 3);
    // (t, ρ, z) = (0, 1, 0): A_θ = 1/2 for unit parameters.
    let row = lines.iter().find(|l| l.starts_with("0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,")).unwrap();
    let a: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((a - 0.5).abs() < 1e-15);

    let out = edept(&["spectrum", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let spec = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(spec.starts_with(
        "k_rho,k_z,omega,re_plus,im_plus,re_minus,im_minus,re_axial,im_axial,re_f_plus,im_f_plus,re_f_minus,im_f_minus\n"
    ));
    assert_eq!(spec.lines().count(), 1 + 100 * 201);
}

#[test]
fn energy_reports_drift() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!(r#"{{"schema_version": 1, {SMALL_GRIDS}}}"#));
    let out = edept(&["energy", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,position_energy,spectral_energy,relative_gap");
    assert_eq!(csv.lines().count(), 4);
}
