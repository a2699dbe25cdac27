//! End-to-end runs of the `gpbag` binary against a small synthetic CSV.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gpbag")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Separable imbalanced toy data written as CSV: positives sit far from
/// the negatives along both features.
fn write_toy_csv(path: &Path, n_pos: usize, n_neg: usize) {
    let mut text = String::from("a,b,class\n");
    for i in 0..n_pos {
        text.push_str(&format!("{},{},hit\n", 5.0 + (i % 7) as f64 * 0.1, 5.0 + (i % 5) as f64 * 0.1));
    }
    for i in 0..n_neg {
        text.push_str(&format!("{},{},miss\n", (i % 9) as f64 * 0.1, (i % 6) as f64 * 0.1));
    }
    fs::write(path, text).unwrap();
}

fn write_config(dir: &Path, data: &Path, extra: &str) -> PathBuf {
    let path = dir.join("experiment.cfg");
    let text = format!(
        "dataset.path = {}\n\
         dataset.label_column = class\n\
         dataset.positive_label = hit\n\
         split.train_fraction = 0.5\n\
         seed = 11\n\
         ensemble.bag_count = 3\n\
         ensemble.boost_rounds = 2\n\
         gp.population_size = 30\n\
         gp.generations = 4\n\
         gp.subpopulations = 3\n\
         output = {}\n\
         {extra}",
        data.display(),
        dir.join("out").display()
    );
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn train_writes_model_dir_manifest_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "");

    let out = run(&["train", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let model_dir = dir.path().join("out/model");
    let members: Vec<_> = fs::read_dir(&model_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".model"))
        .collect();
    assert_eq!(members.len(), 3);
    assert!(model_dir.join("manifest.txt").exists());
    assert!(model_dir.join("ensemble.txt").exists());
    assert!(dir.path().join("out/train.csv").exists());
    assert!(dir.path().join("out/test.csv").exists());
    assert!(dir.path().join("out/training.log").exists());

    let manifest = fs::read_to_string(model_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("gp.population_size = 30"));
    assert!(manifest.contains("derived.feature_count = 2"));
    assert!(manifest.contains("seed = 11"));
}

#[test]
fn train_twice_is_byte_identical_outside_logs() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 8, 24);
    let cfg = write_config(dir.path(), &data, "");

    assert!(run(&["train", "--config", cfg.to_str().unwrap()]).status.success());
    let read_all = |root: &Path| {
        let mut files = vec![
            root.join("out/model/manifest.txt"),
            root.join("out/model/ensemble.txt"),
            root.join("out/model/member_000.model"),
            root.join("out/train.csv"),
            root.join("out/test.csv"),
        ];
        files.sort();
        files.iter().map(|p| fs::read(p).unwrap()).collect::<Vec<_>>()
    };
    let first = read_all(dir.path());
    assert!(run(&["train", "--config", cfg.to_str().unwrap()]).status.success());
    assert_eq!(first, read_all(dir.path()));
}

#[test]
fn train_with_missing_dataset_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), Path::new("/no/such/data.csv"), "");
    let out = run(&["train", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("/no/such/data.csv"), "{}", stderr_of(&out));
    assert!(!dir.path().join("out").exists(), "no partial outputs on failure");
}

#[test]
fn evaluate_perfect_toy_reports_full_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "");
    assert!(run(&["train", "--config", cfg.to_str().unwrap()]).status.success());

    let model = dir.path().join("out/model");
    let test_csv = dir.path().join("out/test.csv");
    let eval_out = dir.path().join("eval");
    let out = run(&[
        "evaluate",
        "--model",
        model.to_str().unwrap(),
        "--data",
        test_csv.to_str().unwrap(),
        "--out",
        eval_out.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let summary = fs::read_to_string(eval_out.join("summary.txt")).unwrap();
    assert!(summary.contains("minority accuracy: 100.00%"), "{summary}");
    assert!(summary.contains("majority accuracy: 100.00%"), "{summary}");
    let report = fs::read_to_string(eval_out.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 2);
    assert!(report.starts_with("seed,train_fraction,tp,fn,fp,tn,"));
}

#[test]
fn evaluate_rejects_feature_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "");
    assert!(run(&["train", "--config", cfg.to_str().unwrap()]).status.success());

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "f0,label\n1.0,hit\n2.0,__negative__\n").unwrap();
    let out = run(&[
        "evaluate",
        "--model",
        dir.path().join("out/model").to_str().unwrap(),
        "--data",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("eval").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("feature count mismatch"), "{}", stderr_of(&out));
}

#[test]
fn sweep_single_cell_emits_run_and_mean_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "sweep.fractions = 0.4\nrepeats = 1\n");
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.path().join("out/sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3, "{csv}"); // header + 1 run + 1 mean
    assert!(lines[1].starts_with("run,0.4,"));
    assert!(lines[2].starts_with("mean,0.4,"));
}

#[test]
fn sweep_rejects_empty_fraction_list() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "sweep.fractions =\n");
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("sweep.fractions"), "{}", stderr_of(&out));
}

#[test]
fn resample_none_none_marks_nothing_synthetic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(
        dir.path(),
        &data,
        "resample.oversampler = none\nresample.undersampler = none\n",
    );
    let out = run(&["resample", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.path().join("out/balanced.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 41); // header + all 40 original rows
    assert!(lines[0].ends_with("label,synthetic"));
    for line in &lines[1..] {
        assert!(line.ends_with(",0"), "{line}");
    }
}

#[test]
fn resample_smote_balances_and_marks_synthetic_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(
        dir.path(),
        &data,
        "resample.oversampler = smote\nresample.undersampler = none\n",
    );
    let out = run(&["resample", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.path().join("out/balanced.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    let positives = rows.iter().filter(|l| l.contains(",hit,")).count();
    let negatives = rows.iter().filter(|l| l.contains(",__negative__,")).count();
    assert!((positives as i64 - negatives as i64).abs() <= 1, "{positives} vs {negatives}");
    let synthetic = rows.iter().filter(|l| l.ends_with(",1")).count();
    assert_eq!(synthetic, positives - 10);
}

#[test]
fn resample_rejects_oversized_explicit_keep() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "resample.undersample_keep = 100\n");
    let out = run(&["resample", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("undersample keep"), "{}", stderr_of(&out));
}

#[test]
fn compare_emits_paired_csv() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "repeats = 2\n");
    let out = run(&["compare", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(dir.path().join("out/compare.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5); // header + 2 repeats x 2 methods
    assert!(lines[1].contains(",ensemble,"));
    assert!(lines[2].contains(",adaboost_stump,"));
    // Paired rows share the seed.
    let seed = |l: &str| l.split(',').nth(1).unwrap().to_string();
    assert_eq!(seed(lines[1]), seed(lines[2]));
}

#[test]
fn quick_preset_overrides_budget() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("toy.csv");
    write_toy_csv(&data, 10, 30);
    let cfg = write_config(dir.path(), &data, "");
    let out = run(&["train", "--config", cfg.to_str().unwrap(), "--preset", "quick", "--jobs", "2"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let manifest = fs::read_to_string(dir.path().join("out/model/manifest.txt")).unwrap();
    assert!(manifest.contains("gp.population_size = 100"));
    assert!(manifest.contains("ensemble.bag_count = 10"));
}
