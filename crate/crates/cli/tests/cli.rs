use std::path::Path;
use std::process::{Command, Output};

use opcalc_core::besov::Grid;
use opcalc_core::linalg::{ComplexMatrix, C64};

fn opcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let at = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader.records().map(|r| r.unwrap()[at].to_string()).collect()
}

#[test]
fn commutator_check_worked_example() {
    let o = opcalc(&["commutator-check", "--dim", "6", "--trials", "20", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let errors = csv_column(&text, "max_identity_error");
    assert_eq!(errors.len(), 20);
    assert!(errors.iter().all(|e| e.parse::<f64>().unwrap() <= 1e-10));
    assert!(csv_column(&text, "dim").iter().all(|d| d == "6"));
}

#[test]
fn helton_howe_worked_example_writes_both_reports() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("hh");
    let o = opcalc(&[
        "helton-howe", "--phi", "x", "--psi", "y", "--N", "8,16", "--ratio", "4",
        "--out", stem.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert!(csv.starts_with("N,M,lhs,rhs,abs_error\n"));
    assert_eq!(csv_column(&csv, "M"), ["32", "64"]);
    assert!(csv_column(&csv, "abs_error").iter().all(|e| e.parse::<f64>().unwrap() <= 1e-10));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    assert_eq!(json["metadata"]["phi"], "x");
    assert_eq!(json["metadata"]["quad_points"], 16);
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_input_reports_path_and_exits_2() {
    let o = opcalc(&["doi", "--a", "/no/such/dir/a.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/dir/a.json"));

    let o = opcalc(&["besov", "--input", "/no/such/grid.bin"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/grid.bin"));

    let o = opcalc(&["--config", "/no/such/opcalc.toml", "besov"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/opcalc.toml"));
}

#[test]
fn unwritable_output_exits_2() {
    let o = opcalc(&["commutator-check", "--trials", "1", "--out", "/no/such/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/no/such/dir/out.csv"));
}

#[test]
fn exceeded_tolerance_exits_1_with_record() {
    let o = opcalc(&["helton-howe", "--phi", "x^2", "--psi", "y", "--N", "4", "--tolerance", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stderr(&o);
    let record: serde_json::Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(record["subcommand"], "helton-howe");
    assert_eq!(record["check"], "trace formula");
    assert_eq!(record["tolerance"], 1e-300);

    let o = opcalc(&["sinc-check", "--truncations", "10", "--tolerance", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("reconstruction error at largest J"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["commutator-check", "--dim", "0"][..],
        &["helton-howe", "--ratio", "1"],
        &["helton-howe", "--N", "1024", "--ratio", "4"],
        &["doi", "--phi", "x^2.5"],
        &["besov", "--grid-size", "100"],
        &["s1-bound", "--min-dim", "5", "--max-dim", "4"],
        &["no-such-subcommand"],
    ] {
        let o = opcalc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = opcalc(&["doi", "--phi", "x^2.5"]);
    assert!(stderr(&o).contains("exponent"));
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[commutator-check]\ndim = 9\ntrials = 3\nseed = 40\n").unwrap();
    let o = opcalc(&["--config", config.to_str().unwrap(), "commutator-check", "--dim", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(csv_column(&text, "dim"), ["4", "4", "4"]);
    assert_eq!(csv_column(&text, "seed"), ["40", "41", "42"]);

    std::fs::write(&config, "[commutator-check]\ndimension = 9\n").unwrap();
    let o = opcalc(&["--config", config.to_str().unwrap(), "commutator-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.toml"));
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut full: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        full.extend(["--out", &p]);
        let o = opcalc(&full);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        path
    };
    for (args, ext) in [
        (&["commutator-check", "--dim", "5", "--trials", "8", "--seed", "3"][..], "csv"),
        (&["s1-bound", "--trials", "12", "--seed", "9", "--phi", "x*y"], "csv"),
        (&["trioi-check", "--trials", "5"], "csv"),
        (&["besov", "--phi", "cos(x)*y", "--grid-size", "32"], "json"),
        (&["doi", "--dim", "5", "--seed", "2"], "json"),
    ] {
        let first = run(&format!("a.{ext}"), args);
        let second = run(&format!("b.{ext}"), args);
        assert_eq!(std::fs::read(first).unwrap(), std::fs::read(second).unwrap(), "{args:?}");
    }
    let a = run("hh1", &["helton-howe", "--N", "4,8"]);
    let b = run("hh2", &["helton-howe", "--N", "4,8"]);
    for ext in ["csv", "json"] {
        assert_eq!(
            std::fs::read(a.with_extension(ext)).unwrap(),
            std::fs::read(b.with_extension(ext)).unwrap()
        );
    }
}

#[test]
fn doi_reads_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, m: &ComplexMatrix| {
        let p = dir.path().join(name);
        m.write_json(&p).unwrap();
        p
    };
    let a = write("a.json", &ComplexMatrix::from_real_diagonal(&[1.0, 2.0]).unwrap());
    let b = write("b.json", &ComplexMatrix::from_real_diagonal(&[3.0, 4.0]).unwrap());
    let out = dir.path().join("out.json");
    let o = opcalc(&[
        "doi", "--phi", "x + y",
        "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let result = ComplexMatrix::read_json(&out).unwrap();
    assert_eq!(result, ComplexMatrix::from_real_diagonal(&[4.0, 6.0]).unwrap());
}

fn besov_estimate(path: &Path) -> f64 {
    let o = opcalc(&["besov", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    v["estimate"].as_f64().unwrap()
}

#[test]
fn besov_reads_both_grid_formats() {
    let dir = tempfile::tempdir().unwrap();
    let zero = Grid::zeros(16, 1.0).unwrap();
    let bin = dir.path().join("zero.bin");
    std::fs::write(&bin, zero.to_binary()).unwrap();
    assert_eq!(besov_estimate(&bin), 0.0);

    let wave = Grid::from_fn(32, std::f64::consts::PI, |x, _| C64::new((4.0 * x).cos(), 0.0)).unwrap();
    let json = dir.path().join("wave.json");
    std::fs::write(&json, wave.to_json()).unwrap();
    let bin = dir.path().join("wave.bin");
    std::fs::write(&bin, wave.to_binary()).unwrap();
    let (from_json, from_bin) = (besov_estimate(&json), besov_estimate(&bin));
    assert_eq!(from_json, from_bin);
    assert!((from_json - 4.0).abs() < 1e-9, "{from_json}");

    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"BSVGxx").unwrap();
    let o = opcalc(&["besov", "--input", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn remaining_subcommands_pass_by_default() {
    for args in [&["trioi-check"][..], &["s1-bound", "--trials", "20"], &["sinc-check", "--truncations", "50,100"]] {
        let o = opcalc(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    }
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s1.csv");
    let o = opcalc(&["s1-bound", "--phi", "sin(x)*cos(y)", "--trials", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["besov_estimate"].as_f64().unwrap() > 0.0);
    assert!(v["summary"]["all_ratios_finite"].as_bool().unwrap());
}

#[test]
fn help_lists_defaults() {
    let o = opcalc(&["commutator-check", "--help"]);
    let text = stdout(&o);
    for needle in ["[default: 6]", "[default: 20]", "[default: 1]", "[default: 1e-10]", "[default: random]"] {
        assert!(text.contains(needle), "{needle} missing from\n{text}");
    }
}
