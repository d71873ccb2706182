use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nevan(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nevan"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn csv_rows(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    text.lines().skip(1).map(str::to_string).collect()
}

#[test]
fn jensen_on_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = nevan(&["jensen", "--expr", "f=z", "--radii", "2,4,8"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("jensen.csv"));
    assert_eq!(rows.len(), 3);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert!(dir.path().join("report.json").exists());
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn malformed_expression_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let out = nevan(&["jensen", "--expr", "f=z+*2", "--radii", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("expressions.f") && err.contains("column"), "{err}");
}

#[test]
fn radius_outside_annulus_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nevan(&["jensen", "--expr", "f=z", "--radii", "2,4", "--r0", "3"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bound_table_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let out = nevan(&["bound-table"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_rows(&dir.path().join("bound_table.csv")).len(), 9);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("job.toml");
    fs::write(&config, "command = \"analyze\"\nradii = [2.0, 3.0]\n\n[expressions]\nf = \"exp(z)\"\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nevan"))
        .args(["--config", config.to_str().unwrap(), "--radii", "2,3,5", "--out"])
        .arg(dir.path().join("run"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("run/functionals.csv")).unwrap();
    assert!(text.lines().any(|l| l.contains("5.0000000000000000e0")), "{text}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("job.toml");
    fs::write(&config, "command = \"jensen\"\nradius = [2.0]\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nevan"))
        .args(["--config", config.to_str().unwrap(), "--out"])
        .arg(dir.path().join("run"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
