//! End-to-end tests of the phspec binary: golden output, format parity,
//! determinism, exit codes, and the physics visible through the CLI.

use std::path::PathBuf;
use std::process::{Command, Output};

fn phspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phspec"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/observed").join(name)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn table1_matches_golden_file_and_is_deterministic() {
    let golden = include_str!("golden/table1.txt");
    let first = phspec(&["table1"]);
    assert_eq!(code_of(&first), 0);
    assert_eq!(stdout_of(&first), golden);
    assert!(stderr_of(&first).is_empty());

    let second = phspec(&["table1"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn table1_csv_and_text_agree_cell_by_cell() {
    let text = stdout_of(&phspec(&["table1"]));
    let csv = stdout_of(&phspec(&["table1", "--format", "csv"]));
    let text_rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().map(str::to_owned).collect())
        .collect();
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 17);
    assert_eq!(text_rows, rows);
}

#[test]
fn spectrum_enumerates_states_and_repeats_byte_identically() {
    let full = phspec(&["spectrum", "N2"]);
    assert_eq!(code_of(&full), 0);
    assert_eq!(stdout_of(&full).lines().count(), 22);
    assert_eq!(full.stdout, phspec(&["spectrum", "N2"]).stdout);

    let csv = stdout_of(&phspec(&["spectrum", "N2", "--nmax", "2", "--format", "csv"]));
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0], vec!["0", "0", "0.10915590"]);

    let capped = stdout_of(&phspec(&["spectrum", "N2", "--nmax", "3", "--lmax", "1"]));
    assert_eq!(capped.lines().count(), 8);
}

#[test]
fn unknown_molecule_is_usage_error_with_suggestion() {
    let out = phspec(&["spectrum", "N3"]);
    assert_eq!(code_of(&out), 2);
    assert!(stdout_of(&out).is_empty());
    let err = stderr_of(&out);
    assert!(err.contains("N3") && err.contains("did you mean") && err.contains("N2"), "{err}");
}

#[test]
fn unparseable_registry_is_usage_error_naming_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.params");
    std::fs::write(&path, "V0_eV = 3.0\n").unwrap();
    let out = phspec(&["spectrum", "N2", "--registry", path.to_str().unwrap()]);
    assert_eq!(code_of(&out), 2);
    assert!(stderr_of(&out).contains("line 1"), "{}", stderr_of(&out));
}

#[test]
fn clap_rejects_unknown_subcommand_with_code_2() {
    assert_eq!(code_of(&phspec(&["frobnicate"])), 2);
}

#[test]
fn wavefunction_shows_n_nodes_and_unit_norm() {
    let out = phspec(&["wavefunction", "N2", "3", "0", "--points", "2000", "--format", "csv"]);
    assert_eq!(code_of(&out), 0);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 2000);
    let radii: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let big_r: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    let density: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();

    let sign_changes = big_r
        .windows(2)
        .filter(|w| w[0] != 0.0 && w[1] != 0.0 && w[0].signum() != w[1].signum())
        .count();
    assert_eq!(sign_changes, 3);

    let h = radii[1] - radii[0];
    let norm: f64 = density.windows(2).map(|w| 0.5 * (w[0] + w[1]) * h).sum();
    assert!((norm - 1.0).abs() < 1e-5, "trapezoid norm {norm}");
}

#[test]
fn wavefunction_needs_at_least_two_points() {
    let out = phspec(&["wavefunction", "N2", "0", "0", "--points", "1"]);
    assert_eq!(code_of(&out), 2);
}

#[test]
fn validate_passes_on_natural_units() {
    let out = phspec(&["validate", "natural", "--nmax", "1", "--grid-points", "1200"]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("# PASS"), "{text}");
    assert!(text.contains("FD error order"), "{text}");
    assert!(text.contains("Numerov error order"), "{text}");
}

#[test]
fn validate_fails_honestly_on_unreachable_tolerance() {
    let out = phspec(&[
        "validate",
        "natural",
        "--nmax",
        "1",
        "--grid-points",
        "1200",
        "--tolerance",
        "1e-15",
    ]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("FAIL"), "{}", stderr_of(&out));
}

#[test]
fn fit_output_round_trips_as_a_registry() {
    let levels = data_file("n2.levels");
    let fit = phspec(&["fit", levels.to_str().unwrap(), "--mu", "7.0015370022", "--name", "X2"]);
    assert_eq!(code_of(&fit), 0, "{}", stderr_of(&fit));
    let block = stdout_of(&fit);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fitted.params");
    std::fs::write(&path, &block).unwrap();
    let spec = stdout_of(&phspec(&[
        "spectrum",
        "X2",
        "--registry",
        path.to_str().unwrap(),
        "--nmax",
        "1",
        "--format",
        "csv",
    ]));
    let rows = csv_rows(&spec);
    let ground: f64 = rows[0][2].parse().unwrap();
    assert!((ground - 0.10915590).abs() < 1e-6, "fitted ground state {ground}");
}

#[test]
fn fit_on_underdetermined_data_is_a_runtime_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sparse.levels");
    std::fs::write(&path, "0,0,0.5\n").unwrap();
    let out = phspec(&["fit", path.to_str().unwrap(), "--mu", "1.0"]);
    assert_eq!(code_of(&out), 1);
    assert!(stderr_of(&out).contains("under-determined"), "{}", stderr_of(&out));
}
