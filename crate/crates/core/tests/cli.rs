use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use barcode_entropy::{Barcode, EntropyReport};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_barcode-entropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn barcode-entropy")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited by signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

/// Lines that are neither empty nor `#` metadata.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

fn no_files(dir: &Path) -> bool {
    fs::read_dir(dir).unwrap().next().is_none()
}

#[test]
fn circle_analysis_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let (bc, rep) = (path(&dir, &format!("b{run_id}.txt")), path(&dir, &format!("r{run_id}.csv")));
        let out = run(&["analyze", "--circle", "30", "--seed", "70", "--format", "csv", "--barcode", &bc, "--report", &rep]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        assert!(out.stdout.is_empty(), "report went to a file, stdout should be empty");
        outputs.push((fs::read(&bc).unwrap(), fs::read(&rep).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let report = String::from_utf8(outputs[0].1.clone()).unwrap();
    for key in ["seed=70", "budget=", "convention=", "excluded_zero_length=", "rng="] {
        assert!(report.contains(key), "metadata {key} missing from\n{report}");
    }
}

#[test]
fn classify_barcode_reproduces_the_analysis_report() {
    let dir = TempDir::new().unwrap();
    let (bc, rep) = (path(&dir, "b.txt"), path(&dir, "r.json"));
    let out = run(&["analyze", "--circle", "30", "--seed", "70", "--format", "json", "--barcode", &bc, "--report", &rep]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["classify-barcode", &bc, "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let original = EntropyReport::from_json(&fs::read_to_string(&rep).unwrap()).unwrap();
    let replayed = EntropyReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(original.rows, replayed.rows);
    assert_eq!(original.entropy, replayed.entropy);
    assert_eq!(original.excluded_zero_length, replayed.excluded_zero_length);
    assert_eq!(original.feature_count(), 2);
}

#[test]
fn stages_through_files_equal_the_one_shot_run() {
    let dir = TempDir::new().unwrap();
    let points = path(&dir, "points.csv");
    let out = run(&["sample", "--circle", "30", "--seed", "70", "--out", &points]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("points=30"));

    let (b1, b2) = (path(&dir, "b1.txt"), path(&dir, "b2.txt"));
    let (r1, r2) = (path(&dir, "r1.csv"), path(&dir, "r2.csv"));
    let a = run(&["analyze", "--circle", "30", "--seed", "70", "--format", "csv", "--barcode", &b1, "--report", &r1]);
    let b = run(&["analyze", "--input", &points, "--format", "csv", "--barcode", &b2, "--report", &r2]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    assert_eq!(fs::read(&b1).unwrap(), fs::read(&b2).unwrap());
    let (t1, t2) = (fs::read_to_string(&r1).unwrap(), fs::read_to_string(&r2).unwrap());
    assert_eq!(data_lines(&t1), data_lines(&t2));
}

#[test]
fn sample_writes_the_requested_rows() {
    let dir = TempDir::new().unwrap();
    let points = path(&dir, "torus.csv");
    let out = run(&["sample", "--torus", "400,2,1", "--seed", "3", "--out", &points]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&points).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));

    let out = run(&["sample", "--circle", "30"]);
    assert_eq!(code(&out), 0);
    assert_eq!(data_lines(&String::from_utf8(out.stdout).unwrap()).len(), 30);

    let out = run(&["sample", "--torus", "50", "--torus-sampling", "uniform"]);
    assert_eq!(code(&out), 0);
    assert_eq!(data_lines(&String::from_utf8(out.stdout).unwrap()).len(), 50);
}

#[test]
fn hand_written_barcode_is_classified_like_its_lengths() {
    let dir = TempDir::new().unwrap();
    let bc = path(&dir, "hand.txt");
    fs::write(&bc, "0 0 2\n0 0.8 2\n1 0.5 1.2\n").unwrap();
    let out = run(&["classify-barcode", &bc, "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = EntropyReport::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 3);
    assert_eq!(report.flags(), [true, false, false]);
    assert!((report.entropy - 1.013436099670082).abs() < 1e-12);
    let gains = [0.7273744915988667, 0.27262550840113076, 0.0];
    for (row, want) in report.rows.iter().zip(gains) {
        assert!((row.relative_gain - want).abs() < 1e-12, "{} vs {want}", row.relative_gain);
    }
}

#[test]
fn missing_input_fails_without_partial_outputs() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    fs::create_dir(&out_dir).unwrap();
    let o = |name: &str| out_dir.join(name).to_str().unwrap().to_owned();
    let out = run(&[
        "analyze", "--input", "/nonexistent/points.csv",
        "--barcode", &o("b.txt"), "--report", &o("r.txt"), "--dump-plot", &o("p.txt"), "--dump-complex", &o("c.txt"),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    assert!(stderr(&out).contains("/nonexistent/points.csv"));
    assert!(no_files(&out_dir));
}

#[test]
fn budget_overflow_exits_4_without_outputs() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("out");
    fs::create_dir(&out_dir).unwrap();
    let bc = out_dir.join("b.txt");
    let out = run(&["analyze", "--circle", "30", "--budget", "100", "--barcode", bc.to_str().unwrap()]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("budget"));
    assert!(no_files(&out_dir));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["analyze", "--circle", "0"][..],
        &["analyze", "--circle", "30", "--threshold", "-1"],
        &["analyze", "--circle", "30", "--threshold", "wide"],
        &["analyze", "--circle", "30", "--format", "xml"],
        &["analyze", "--torus", "10,1,2"],
        &["analyze", "--torus", "100", "--torus-sampling", "grid"],
        &["analyze", "--circle", "30", "--torus", "30"],
        &["analyze"],
        &["sample", "--circle", "3,0"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn malformed_point_file_reports_the_line() {
    let dir = TempDir::new().unwrap();
    let points = path(&dir, "bad.csv");
    fs::write(&points, "# x,y\n0,0\n1,0\n1,oops\n").unwrap();
    let out = run(&["analyze", "--input", &points]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    fs::write(&points, "0,0\n1,0,2\n").unwrap();
    let out = run(&["analyze", "--input", &points]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn barcode_file_errors() {
    let dir = TempDir::new().unwrap();
    let bc = path(&dir, "b.txt");

    fs::write(&bc, "# cap=1 threshold=full points=2\n0 0 1\n0 0.5\n").unwrap();
    let out = run(&["classify-barcode", &bc]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    fs::write(&bc, "0 0.5 0.5\n1 1 1\n").unwrap();
    let out = run(&["classify-barcode", &bc]);
    assert_eq!(code(&out), 5, "{}", stderr(&out));

    let rep = path(&dir, "r.txt");
    let out = run(&["classify-barcode", &bc, "--report", &rep]);
    assert_eq!(code(&out), 5);
    assert!(!Path::new(&rep).exists());

    let out = run(&["classify-barcode", &path(&dir, "missing.txt")]);
    assert_eq!(code(&out), 3);
}

#[test]
fn per_dimension_json_is_an_array_of_reports() {
    let out = run(&["analyze", "--circle", "30", "--seed", "70", "--per-dim", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let reports: Vec<EntropyReport> = serde_json::from_slice(&out.stdout).unwrap();
    let dims: Vec<Option<usize>> = reports.iter().map(|r| r.dim).collect();
    assert_eq!(dims, [Some(0), Some(1)]);
    assert!(reports[1].rows.iter().all(|r| r.interval.unwrap().dim == 1));
}

#[test]
fn plot_and_complex_dumps() {
    let dir = TempDir::new().unwrap();
    let (plot, complex, bc) = (path(&dir, "plot.txt"), path(&dir, "complex.txt"), path(&dir, "b.txt"));
    let out = run(&[
        "analyze", "--circle", "12", "--seed", "1", "--max-dim", "1",
        "--dump-plot", &plot, "--dump-complex", &complex, "--barcode", &bc,
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let barcode = Barcode::from_text(&fs::read_to_string(&bc).unwrap()).unwrap();
    let plot_text = fs::read_to_string(&plot).unwrap();
    let rows = data_lines(&plot_text);
    assert_eq!(rows.len(), barcode.len());
    for row in &rows {
        let fields: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(fields.len(), 4);
        assert!(["yes", "no", "zero"].contains(&fields[3]), "{row}");
    }
    assert_eq!(rows.iter().filter(|r| r.ends_with(" yes")).count(), 2);

    // 12 vertices and all 66 edges under the full threshold.
    let complex_text = fs::read_to_string(&complex).unwrap();
    let lines = data_lines(&complex_text);
    assert_eq!(lines.len(), 12 + 66);
    let values: Vec<f64> = lines.iter().map(|l| l.rsplit(' ').next().unwrap().parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn torus_defaults_are_recorded() {
    let out = run(&["analyze", "--torus", "150", "--format", "csv", "--budget", "5000000"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# max_dim=3"), "{text}");
    assert!(text.contains("# threshold=0.9"), "{text}");
    assert!(text.contains("stratified"), "{text}");
}
