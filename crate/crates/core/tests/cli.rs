use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use leafspec::cli::{self, Report, REPORT_FILE, SPECTRA_FILE, VERDICTS_FILE};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn leafspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leafspec"))
        .args(args)
        .env_remove(cli::JOBS_ENV)
        .output()
        .expect("binary runs")
}

fn run_into(scenario: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    leafspec(&args)
}

fn verdict_rows(dir: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(dir.join(VERDICTS_FILE)).unwrap();
    r.records().map(Result::unwrap).collect()
}

const SMALL: &str = r#"
[solver]
grid = 64
eigenvalues = 3

[[presentation]]
name = "s2"
family = "sphere_rotation"
n = 2

[[presentation]]
name = "lift"
family = "covering_lift"
base = "s2"
order = 2
"#;

#[test]
fn example1_row_is_not_isospectral() {
    let out = tempfile::tempdir().unwrap();
    let status = run_into(&scenario("example1.scenario"), out.path(), &[]);
    assert_eq!(status.status.code(), Some(0), "{}", String::from_utf8_lossy(&status.stderr));
    let rows = verdict_rows(out.path());
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "example1");
    assert_eq!(&rows[0][1], "true");
    assert_eq!(&rows[0][2], "false");
    assert_eq!(&rows[0][3], "true");
    assert_eq!(&rows[0][6], "false");
}

#[test]
fn corpus_runs_cleanly() {
    let out = tempfile::tempdir().unwrap();
    let status = run_into(&scenario("corpus.scenario"), out.path(), &[]);
    assert_eq!(status.status.code(), Some(0));
    let rows = verdict_rows(out.path());
    assert!(rows.len() >= 10);
    for row in &rows {
        let (codim, qcodim) = (&row[2] == "true", &row[3] == "true");
        let (applies, iso) = (&row[5] == "true", &row[6] == "true");
        assert!(!applies || iso, "{row:?}");
        assert!(!codim || qcodim, "{row:?}");
    }
}

#[test]
fn outputs_are_deterministic_across_worker_counts() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let corpus = scenario("corpus.scenario");
    assert!(run_into(&corpus, a.path(), &["--jobs", "1"]).status.success());
    assert!(run_into(&corpus, b.path(), &["--jobs", "4"]).status.success());
    for file in [SPECTRA_FILE, VERDICTS_FILE, REPORT_FILE] {
        let (x, y) = (
            std::fs::read(a.path().join(file)).unwrap(),
            std::fs::read(b.path().join(file)).unwrap(),
        );
        assert!(x == y, "{file} differs");
    }
}

#[test]
fn report_reconstructs_every_verdict() {
    let out = tempfile::tempdir().unwrap();
    assert!(run_into(&scenario("corpus.scenario"), out.path(), &[]).status.success());
    let report = Report::read(&out.path().join(REPORT_FILE)).unwrap();
    let doc = cli::load_scenario(&scenario("corpus.scenario")).unwrap();
    let fresh = cli::execute(&doc, Some(2)).unwrap();
    assert_eq!(report, fresh);
    assert_eq!(report.provenance.scenario_sha256, doc.digest);
    let rows = verdict_rows(out.path());
    for (row, rec) in rows.iter().zip(&report.verdicts) {
        assert_eq!(&row[0], rec.pair);
        assert_eq!(row[6] == *"true", rec.verdict.isospectral);
    }
}

#[test]
fn empty_comparison_list_gives_spectra_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.scenario");
    std::fs::write(&path, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = run_into(&path, &out, &[]);
    assert_eq!(status.status.code(), Some(0));
    assert!(verdict_rows(&out).is_empty());
    let spectra = std::fs::read_to_string(out.join(SPECTRA_FILE)).unwrap();
    assert_eq!(spectra.lines().count(), 1 + 2 * 3);
}

#[test]
fn undeclared_presentation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scenario");
    std::fs::write(&path, format!("{SMALL}\n[[comparison]]\nsource = \"s2\"\ntarget = \"ghost\"\n")).unwrap();
    let status = run_into(&path, &dir.path().join("out"), &[]);
    assert_eq!(status.status.code(), Some(1));
    let err = String::from_utf8_lossy(&status.stderr);
    assert!(err.contains("unknown presentation \"ghost\""), "{err}");
}

#[test]
fn syntax_error_exits_one_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scenario");
    std::fs::write(&path, SMALL.replace("n = 2", "n = ")).unwrap();
    let status = run_into(&path, &dir.path().join("out"), &[]);
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stderr).contains("line 9"));
}

#[test]
fn consistency_violation_exits_two_after_writing() {
    // a tolerance below the discretisation error turns the covering pair,
    // whose hypotheses hold, into a reported violation
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("strict.scenario");
    let text = SMALL.replace("eigenvalues = 3", "eigenvalues = 3\ntol_spec = 1e-15")
        + "\n[[comparison]]\nsource = \"lift\"\ntarget = \"s2\"\nmap = \"fold\"\n";
    std::fs::write(&path, text).unwrap();
    let out = dir.path().join("out");
    let status = run_into(&path, &out, &[]);
    assert_eq!(status.status.code(), Some(2));
    let report = Report::read(&out.join(REPORT_FILE)).unwrap();
    assert_eq!(report.inconsistent_pairs(), vec!["lift|s2"]);
    assert_eq!(&verdict_rows(&out)[0][5], "true");
}

#[test]
fn converge_orbifold_extrapolates_to_four() {
    let corpus = scenario("corpus.scenario");
    let out = leafspec(&["converge", corpus.to_str().unwrap(), "orbifold", "--ladder", "500,1000,2000", "-k", "3"]);
    assert!(out.status.success());
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let row = r
        .records()
        .map(Result::unwrap)
        .find(|row| &row[1] == "2" && &row[2] == "2000")
        .unwrap();
    let lambda2: f64 = row[5].parse().unwrap();
    assert!((lambda2 - 4.0).abs() < 1e-4, "{lambda2}");
}

#[test]
fn converge_with_no_eigenvalues_is_empty() {
    let corpus = scenario("corpus.scenario");
    let out = leafspec(&["converge", corpus.to_str().unwrap(), "sphere2", "--ladder", "64,128,256", "-k", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn converge_rejects_coarse_ladder() {
    let corpus = scenario("corpus.scenario");
    let out = leafspec(&["converge", corpus.to_str().unwrap(), "sphere2", "--ladder", "8,16,32", "-k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn spectrum_subcommand_prints_csv() {
    let corpus = scenario("corpus.scenario");
    let out = leafspec(&["spectrum", corpus.to_str().unwrap(), "sphere3", "-N", "500", "-k", "4"]);
    assert!(out.status.success());
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let got: Vec<f64> = r.records().map(|row| row.unwrap()[4].parse().unwrap()).collect();
    for (g, e) in got.iter().zip([0.0, 3.0, 8.0, 15.0]) {
        assert!((g - e).abs() <= 1e-4 * e.max(1.0), "{g} vs {e}");
    }
}

#[test]
fn jobs_environment_variable_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("small.scenario");
    std::fs::write(&path, SMALL).unwrap();
    let run = |value: &str| {
        Command::new(env!("CARGO_BIN_EXE_leafspec"))
            .args(["run", path.to_str().unwrap(), "--out", dir.path().join("out").to_str().unwrap()])
            .env(cli::JOBS_ENV, value)
            .output()
            .unwrap()
    };
    assert!(run("3").status.success());
    let bad = run("many");
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains(cli::JOBS_ENV));
}
