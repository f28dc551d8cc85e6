use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn spectra(args: &[&str], out_root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra"))
        .args(args)
        .env("SPECTRA_OUT", out_root)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"));
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_is_alphabetized_and_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let first = spectra(&["list"], tmp.path());
    let second = spectra(&["list"], tmp.path());
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    let charts: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "charts:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .collect();
    let mut sorted = charts.clone();
    sorted.sort_unstable();
    assert_eq!(charts, sorted);
    assert!(text.contains("associate_family") && text.contains("thm_drift"));
}

#[test]
fn run_writes_every_report_under_output_root() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spectra(&["run", &scenario("interval")], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let dir = tmp.path().join("interval");
    for file in [
        "eigenvalues.csv",
        "convergence.csv",
        "constants.json",
        "bounds.csv",
        "bounds_skipped.csv",
        "weyl_fit.json",
        "MANIFEST",
    ] {
        assert!(dir.join(file).is_file(), "missing {file}");
    }
    let eig = fs::read_to_string(dir.join("eigenvalues.csv")).unwrap();
    assert_eq!(eig.lines().next(), Some("resolution,k,lambda,residual"));
    assert_eq!(eig.lines().count(), 1 + 3 * 12);
}

#[test]
fn parallel_run_matches_sequential() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(
        spectra(&["run", &scenario("square_baseline")], a.path()).status.code(),
        Some(0)
    );
    assert_eq!(
        spectra(&["run", "--parallel", &scenario("square_baseline")], b.path())
            .status
            .code(),
        Some(0)
    );
    for file in ["eigenvalues.csv", "bounds.csv", "convergence.csv", "constants.json"] {
        let x = fs::read(a.path().join("square_baseline").join(file)).unwrap();
        let y = fs::read(b.path().join("square_baseline").join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn verify_reports_violations_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = spectra(&["verify", &scenario("drift_interval")], tmp.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("PASS drift_interval"), "{}", stdout(&ok));

    let bad = spectra(&["verify", &scenario("hemisphere")], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    assert!(text.lines().last().unwrap().starts_with("FAIL hemisphere"), "{text}");
    let csv = fs::read_to_string(tmp.path().join("hemisphere/bounds.csv")).unwrap();
    let false_rows = csv.lines().filter(|l| l.split(',').nth(5) == Some("false")).count();
    assert_eq!(false_rows, text.lines().filter(|l| l.contains("VIOLATED")).count());
}

#[test]
fn convergence_prints_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = spectra(&["convergence", &scenario("drift_interval")], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("drift_interval/convergence.csv").is_file());
    assert!(!tmp.path().join("drift_interval/bounds.csv").exists());
    assert!(stdout(&out).lines().count() > 12);
}

#[test]
fn module_errors_exit_two_and_keep_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("indefinite.toml");
    fs::write(
        &config,
        r#"name = "indefinite"
chart.id = "flat_rectangle"
domain.kind = "rectangle"
domain.lo = [0.0, 0.0]
domain.hi = [1.0, 1.0]
tensor.kind = "expr"
tensor.components = ["1", "0", "x - 0.5"]
mesh.resolutions = [4, 8, 16]
eigen.k_max = 4
"#,
    )
    .unwrap();
    let out = spectra(&["run", config.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("chart point"), "{err}");
    let manifest = fs::read_to_string(tmp.path().join("indefinite/MANIFEST")).unwrap();
    assert!(manifest.contains("status incomplete"));

    let missing = spectra(&["verify", "no/such/file.toml"], tmp.path());
    assert_eq!(missing.status.code(), Some(2));
}
