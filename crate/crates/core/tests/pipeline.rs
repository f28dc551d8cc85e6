use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use spectra_core::report::{self, list_catalog, RunOptions, Scenario};
use spectra_core::SpectraError;

fn suite(name: &str) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(format!("{name}.toml"));
    report::load(&path).unwrap()
}

fn options(root: &Path) -> RunOptions {
    RunOptions {
        parallel: false,
        out_root: Some(root.to_path_buf()),
    }
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(file).display()))
}

fn false_rows(dir: &Path) -> usize {
    read(dir, "bounds.csv")
        .lines()
        .skip(1)
        .filter(|l| l.split(',').nth(5) == Some("false"))
        .count()
}

#[test]
fn square_baseline_runs_clean_with_second_order_convergence() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = report::run(&suite("square_baseline"), &options(tmp.path())).unwrap();
    assert_eq!(summary.exit_code(), 0, "{:?}", summary.violations);
    assert_eq!(false_rows(&summary.out_dir), 0);
    let convergence = read(&summary.out_dir, "convergence.csv");
    let first = convergence.lines().find(|l| l.starts_with("1,64,")).unwrap();
    let order: f64 = first.split(',').nth(5).unwrap().parse().unwrap();
    assert!((order - 2.0).abs() <= 0.3, "order {order}");
    assert!(read(&summary.out_dir, "MANIFEST").contains("status complete"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let scenario = suite("drift_interval");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = report::run(&scenario, &options(a.path())).unwrap();
    let second = report::run(
        &scenario,
        &RunOptions {
            parallel: true,
            out_root: Some(b.path().to_path_buf()),
        },
    )
    .unwrap();
    for file in [
        "eigenvalues.csv",
        "convergence.csv",
        "constants.json",
        "bounds.csv",
        "bounds_skipped.csv",
        "weyl_fit.json",
        "MANIFEST",
    ] {
        assert_eq!(
            read(&first.out_dir, file),
            read(&second.out_dir, file),
            "{file} differs"
        );
    }
}

#[test]
fn drift_interval_extrapolates_to_shifted_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let (_, rows) = report::run_convergence(&suite("drift_interval"), &options(tmp.path())).unwrap();
    let row = rows.iter().find(|r| r.index == 1 && r.resolution == 2000).unwrap();
    let exact = 1.0 + PI * PI;
    assert!(
        (row.extrapolated - exact).abs() / exact <= 1e-4,
        "{} vs {exact}",
        row.extrapolated
    );
    assert_eq!(row.target, Some(exact));
}

#[test]
fn indefinite_tensor_fails_and_names_the_sample() {
    let toml = r#"
name = "indefinite"
chart.id = "flat_rectangle"
domain.kind = "rectangle"
domain.lo = [0.0, 0.0]
domain.hi = [1.0, 1.0]
tensor.kind = "diagonal"
tensor.values = [1.0, -1.0]
mesh.resolutions = [4, 8, 16]
eigen.k_max = 4
"#;
    let scenario = Scenario::from_toml_str(toml).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let err = report::run(&scenario, &options(tmp.path())).unwrap_err();
    assert!(matches!(err, SpectraError::Tensor { .. }), "{err:?}");
    assert!(err.to_string().contains("chart point"), "{err}");
    let manifest = read(&tmp.path().join("indefinite"), "MANIFEST");
    assert!(manifest.contains("status incomplete"), "{manifest}");
    assert!(manifest.contains("chart point"), "{manifest}");
}

#[test]
fn exit_status_matches_false_rows() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["interval", "hemisphere"] {
        let summary = report::run(&suite(name), &options(tmp.path())).unwrap();
        let rows = false_rows(&summary.out_dir);
        assert_eq!(rows, summary.violations.len(), "{name}");
        assert_eq!(summary.exit_code() == 0, rows == 0, "{name}");
    }
}

#[test]
fn output_root_places_results_under_scenario_name() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = report::run(&suite("interval"), &options(tmp.path())).unwrap();
    assert_eq!(summary.out_dir, PathBuf::from(tmp.path()).join("interval"));
    let manifest = read(&summary.out_dir, "MANIFEST");
    for file in ["eigenvalues.csv", "bounds.csv", "weyl_fit.json"] {
        assert!(manifest.contains(&format!("file {file}")), "{manifest}");
    }
}

#[test]
fn catalog_is_stable_and_complete() {
    let text = list_catalog();
    assert_eq!(text, list_catalog());
    for name in [
        "flat_rectangle",
        "stereographic_sphere",
        "associate_family",
        "thm_drift",
        "thm_tensor",
        "polya_type",
        "recursion_lemma",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn every_suite_file_parses_and_round_trips() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let scenario = report::load(&path).unwrap();
        let again = Scenario::from_toml_str(&scenario.to_toml_string().unwrap()).unwrap();
        assert_eq!(scenario, again, "{}", path.display());
        count += 1;
    }
    assert_eq!(count, 9);
}
