//! End-to-end tests of the `casimir` binary: exit-status discipline,
//! output determinism, and the documented file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_casimir")
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn casimir")
}

fn write_plasma_config(dir: &Path, extra: &str) -> PathBuf {
    // plasma model keeps the end-to-end tests fast; data files are linked
    // from the repository data directory
    let hist = data_dir().join("roughness_histogram.dat");
    let cfg = format!
        ("[geometry]\nsphere_radius_um = 95.65\n\n[model]\nkind = plasma\n\n[roughness]\nhistogram = {}\n\n[output]\ndir = {}\n{extra}",
        hist.display(),
        dir.join("out").display(),
    );
    let path = dir.join("run.cfg");
    std::fs::write(&path, cfg).unwrap();
    path
}

#[test]
fn roughness_command_reports_measured_statistics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_plasma_config(tmp.path(), "");
    let out = run(&["roughness", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("H0 = 2.734 nm"), "report:\n{report}");
    assert!(report.contains("A_st"), "report:\n{report}");
    let file = tmp.path().join("out/roughness_report.txt");
    assert_eq!(std::fs::read_to_string(file).unwrap(), report);
}

#[test]
fn force_command_produces_consistent_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_plasma_config(tmp.path(), "");
    let out = run(&["force", "--config", cfg.to_str().unwrap(), "--z", "70,90"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("out/force_table.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "csv:\n{csv}");
    assert!(lines[0].starts_with("z_nm,"));
    // eta_c of the plasma model sits in (0.4, 0.6) at these separations and
    // the roughness factors stay within a fraction of a percent of 1
    for line in &lines[1..] {
        let fields: Vec<f64> = line.split(',').map(|f| f.trim().parse().unwrap()).collect();
        let (eta_c, eta_r, eta_cr) = (fields[3], fields[4], fields[5]);
        assert!((0.40..0.60).contains(&eta_c), "eta_c = {eta_c}");
        assert!((1.0..1.01).contains(&eta_r), "eta_r = {eta_r}");
        assert!((eta_cr - eta_c * eta_r).abs() < 0.002, "eta_cr = {eta_cr}");
        assert!(fields[1] < 0.0 && fields[2] < 0.0 && fields[6] < 0.0);
    }
}

#[test]
fn force_command_empty_z_list_is_empty_success() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_plasma_config(tmp.path(), "\n[run]\nz_nm =\n");
    let out = run(&["force", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(tmp.path().join("out/force_table.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1); // header only
}

#[test]
fn missing_optical_file_exits_2_naming_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("bad.cfg");
    std::fs::write(
        &cfg_path,
        "[model]\nkind = tabulated\noptical_table = not_there.dat\n",
    )
    .unwrap();
    let out = run(&["force", "--config", cfg_path.to_str().unwrap(), "--z", "70"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("not_there.dat"), "stderr: {err}");
    assert!(!tmp.path().join("out/force_table.csv").exists(), "no partial outputs");
}

#[test]
fn outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_plasma_config(tmp.path(), "");
    let first = run(&["force", "--config", cfg.to_str().unwrap(), "--z", "80"]);
    assert!(first.status.success());
    let a = std::fs::read_to_string(tmp.path().join("out/force_table.csv")).unwrap();
    let second = run(&["force", "--config", cfg.to_str().unwrap(), "--z", "80"]);
    assert!(second.status.success());
    let b = std::fs::read_to_string(tmp.path().join("out/force_table.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn analyze_command_full_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    // synthetic scans from a 1/z^3 curve with a +0.25 nm offset
    let mut scan_text = String::from("z_nm, scan_1, scan_2, scan_3\n");
    for i in 0..60 {
        let z_nm = 62.0 + i as f64 * 4.0;
        let z = (z_nm + 0.25) * 1e-9;
        let f_pn = -1e-27 / (z * z * z) * 1e12;
        scan_text.push_str(&format!(
            "{z_nm}, {:.4}, {:.4}, {:.4}\n",
            f_pn, f_pn + 0.8, f_pn - 0.8
        ));
    }
    let scan_path = tmp.path().join("scans.dat");
    std::fs::write(&scan_path, scan_text).unwrap();

    let extra = format!(
        "\n[scans]\nfile = {}\nbeta = 0.95\n\n[errors]\nsystematic_pn = 1.7, 0.55, 0.31, 0.12\n",
        scan_path.display()
    );
    let cfg = write_plasma_config(tmp.path(), &extra);
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("scans: 3 used"), "report:\n{report}");
    assert!(report.contains("t_p(f)"), "report:\n{report}");
    assert!(report.contains("10% equivalence halfwidth"), "report:\n{report}");
    assert!(tmp.path().join("out/analysis.csv").exists());
}

#[test]
fn analyze_exclusion_lowers_scan_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scan_text = String::from("z_nm, scan_1, scan_2, scan_3, scan_4\n");
    for i in 0..30 {
        let z_nm = 62.0 + i as f64 * 8.0;
        let f = -400.0 / (1.0 + i as f64);
        scan_text.push_str(&format!("{z_nm}, {f}, {}, {}, {}\n", f + 1.0, f - 1.0, f + 0.5));
    }
    let scan_path = tmp.path().join("scans.dat");
    std::fs::write(&scan_path, &scan_text).unwrap();
    let extra = format!("\n[scans]\nfile = {}\nexclude = 2, 4\n", scan_path.display());
    let cfg = write_plasma_config(tmp.path(), &extra);
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("scans: 2 used (2 excluded)"), "report:\n{report}");
}

#[test]
fn malformed_scan_file_exits_2_with_line_number() {
    let tmp = tempfile::tempdir().unwrap();
    let scan_path = tmp.path().join("scans.dat");
    std::fs::write(&scan_path, "z_nm, scan_1, scan_2\n62, -480, -490\n63, oops, -475\n").unwrap();
    let extra = format!("\n[scans]\nfile = {}\n", scan_path.display());
    let cfg = write_plasma_config(tmp.path(), &extra);
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr: {err}");
}

#[test]
fn budget_command_totals_near_published_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_plasma_config(tmp.path(), "");
    let out = run(&["budget", "--config", cfg.to_str().unwrap(), "--z", "62"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("TOTAL"), "report:\n{report}");
    let csv = std::fs::read_to_string(tmp.path().join("out/budget.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let total: f64 = row.last().unwrap().trim().parse().unwrap();
    assert!((1.55..1.85).contains(&total), "total = {total}%");
}

#[test]
fn roughness_command_reports_dominant_period_with_profile() {
    let tmp = tempfile::tempdir().unwrap();
    let mut profile = String::from("# synthetic cross section\n");
    for i in 0..128 {
        let x = i as f64 * 4.0;
        let h = 2.5 + 1.5 * (2.0 * std::f64::consts::PI * x / 180.0).sin();
        profile.push_str(&format!("{x}, {h:.6}\n"));
    }
    let profile_path = tmp.path().join("profile.dat");
    std::fs::write(&profile_path, profile).unwrap();
    let extra = format!("\n[roughness]\nprofile = {}\n", profile_path.display());
    // the second [roughness] section merges with the first (flat key map)
    let cfg = write_plasma_config(tmp.path(), &extra);
    let out = run(&["roughness", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("dominant profile period"), "report:\n{report}");
}

#[test]
fn model_and_temperature_flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_plasma_config(tmp.path(), "");
    // model override changes the reported label and the numbers
    let out = run(&[
        "force", "--config", cfg.to_str().unwrap(),
        "--z", "100", "--model", "drude",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("model: drude"), "report:\n{report}");
    // finite temperature exercises the Matsubara path end to end
    let out = run(&[
        "force", "--config", cfg.to_str().unwrap(),
        "--z", "100", "--temperature", "300",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("temperature: 300 K"), "report:\n{report}");
    let csv = std::fs::read_to_string(tmp.path().join("out/force_table.csv")).unwrap();
    let eta_c: f64 = csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().trim().parse().unwrap();
    assert!((0.4..0.7).contains(&eta_c), "eta_c(100 nm, 300 K) = {eta_c}");
}

#[test]
fn beta_flag_changes_the_student_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let mut scan_text = String::from("z_nm, scan_1, scan_2, scan_3\n");
    for i in 0..40 {
        let z_nm = 62.0 + i as f64 * 6.0;
        let f = -300.0 / (1.0 + i as f64 * 0.2);
        scan_text.push_str(&format!("{z_nm}, {f:.3}, {:.3}, {:.3}\n", f + 1.5, f - 1.5));
    }
    let scan_path = tmp.path().join("scans.dat");
    std::fs::write(&scan_path, scan_text).unwrap();
    let extra = format!("\n[scans]\nfile = {}\n", scan_path.display());
    let cfg = write_plasma_config(tmp.path(), &extra);
    let out = run(&["analyze", "--config", cfg.to_str().unwrap(), "--beta", "0.60"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = String::from_utf8_lossy(&out.stdout);
    assert!(report.contains("beta = 0.6"), "report:\n{report}");
    // n = 3 scans -> f = 2, t_0.8(2) = 1.0607
    assert!(report.contains("1.060") || report.contains("1.061"), "report:\n{report}");
}

#[test]
fn bundled_example_config_loads() {
    // end-to-end with the repository's example configuration (tabulated
    // model); roughness is the cheapest command touching it
    let cfg = data_dir().join("example.cfg");
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "roughness",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("roughness_report.txt").exists());
}
