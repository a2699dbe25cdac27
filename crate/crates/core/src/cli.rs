//! Command implementations behind the `gpbag` binary: train, evaluate,
//! sweep, resample, compare. Every command validates its inputs fully
//! before writing anything under the output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::config::ExperimentConfig;
use crate::dataset::{load_csv, ColumnSelector, Dataset, Label, SplitSpec};
use crate::ensemble::{train_ensemble, EnsembleModel};
use crate::error::{Error, Result};
use crate::evaluation::{
    compare_baseline, evaluate, sweep_train_fraction, ComparisonTable, EvaluationReport, SweepTable,
};
use crate::resampling::balance;
use crate::rng;

/// Token written for negative rows in emitted CSVs; positives keep the
/// configured positive label so emitted files re-load with the same
/// mapping.
pub const NEGATIVE_TOKEN: &str = "__negative__";

pub fn write_dataset_csv(d: &Dataset, positive_token: &str, path: &Path) -> Result<()> {
    let mut out = String::new();
    for j in 0..d.n_features() {
        let _ = write!(out, "f{j},");
    }
    out.push_str("label\n");
    for i in 0..d.n_rows() {
        for v in d.row(i) {
            let _ = write!(out, "{v},");
        }
        out.push_str(match d.label(i) {
            Label::Positive => positive_token,
            Label::Negative => NEGATIVE_TOKEN,
        });
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn load_configured_dataset(cfg: &ExperimentConfig) -> Result<(Dataset, bool)> {
    let path = cfg.require_dataset()?;
    if cfg.positive_label == NEGATIVE_TOKEN {
        return Err(Error::Config(format!(
            "dataset.positive_label may not be the reserved token {NEGATIVE_TOKEN}"
        )));
    }
    let mut d = load_csv(path, &cfg.label_column, &cfg.positive_label)?;
    let flipped = d.canonicalize_labels();
    Ok((d, flipped))
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn manifest_text(cfg: &ExperimentConfig, train: &Dataset, test: &Dataset, flipped: bool) -> String {
    let mut out = String::new();
    out.push_str("format = gpbag-manifest v1\n");
    out.push_str(&format!("version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&cfg.to_text());
    out.push_str(&format!("derived.feature_count = {}\n", train.n_features()));
    out.push_str(&format!("derived.train_rows = {}\n", train.n_rows()));
    out.push_str(&format!("derived.test_rows = {}\n", test.n_rows()));
    out.push_str(&format!("derived.train_positive = {}\n", train.positive_count()));
    out.push_str(&format!("derived.labels_flipped = {}\n", flipped));
    out.push_str("derived.split_label_column = label\n");
    out.push_str(&format!("derived.negative_token = {NEGATIVE_TOKEN}\n"));
    let bag_seeds: Vec<String> = (0..cfg.ensemble.bag_count)
        .map(|b| rng::derive(cfg.ensemble.seed, "bag", b as u64).to_string())
        .collect();
    out.push_str(&format!("derived.bag_seeds = {}\n", bag_seeds.join(",")));
    out
}

fn unix_time() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn cmd_train(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let (data, flipped) = load_configured_dataset(cfg)?;
    let spec = SplitSpec {
        train_fraction: cfg.train_fraction,
        stratified: cfg.stratified,
        seed: cfg.ensemble.seed,
    };
    let started = unix_time();
    let (train, test) = data.stratified_split(&spec)?;
    let model = train_ensemble(&train, &cfg.ensemble)?;

    let out = &cfg.output;
    ensure_out_dir(out)?;
    let model_dir = out.join("model");
    model.save(&model_dir)?;
    let manifest = manifest_text(cfg, &train, &test, flipped);
    let manifest_path = model_dir.join("manifest.txt");
    fs::write(&manifest_path, &manifest).map_err(|e| Error::io(&manifest_path, e))?;
    write_dataset_csv(&train, &cfg.positive_label, &out.join("train.csv"))?;
    write_dataset_csv(&test, &cfg.positive_label, &out.join("test.csv"))?;

    let mut log = String::new();
    let _ = writeln!(log, "started_unix {started}");
    if cfg.seed_defaulted {
        let _ = writeln!(log, "seed defaulted to {}", cfg.ensemble.seed);
    }
    if flipped {
        let _ = writeln!(log, "labels flipped so the minority class is positive");
    }
    let _ = writeln!(
        log,
        "train rows {} ({} positive), test rows {}",
        train.n_rows(),
        train.positive_count(),
        test.n_rows()
    );
    for (b, member) in model.members.iter().enumerate() {
        for h in &member.hypotheses {
            let _ = writeln!(
                log,
                "bag {b} round {} mean_loss {} beta {}",
                h.round, h.epsilon, h.beta
            );
        }
    }
    let _ = writeln!(log, "finished_unix {}", unix_time());
    let log_path = out.join("training.log");
    fs::write(&log_path, log).map_err(|e| Error::io(&log_path, e))?;

    println!(
        "trained {} bags on {} rows; model written to {}",
        model.members.len(),
        train.n_rows(),
        model_dir.display()
    );
    Ok(())
}

fn manifest_value(manifest: &str, key: &str) -> Option<String> {
    manifest.lines().find_map(|line| {
        let (k, v) = line.split_once('=')?;
        (k.trim() == key).then(|| v.trim().to_string())
    })
}

pub struct EvaluateArgs {
    pub model_dir: PathBuf,
    pub data_path: PathBuf,
    pub out: PathBuf,
    pub label_column: Option<String>,
    pub positive_label: Option<String>,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvaluationReport> {
    let model = EnsembleModel::load(&args.model_dir)?;
    let manifest_path = args.model_dir.join("manifest.txt");
    let manifest = fs::read_to_string(&manifest_path).unwrap_or_default();
    let label_column = args
        .label_column
        .clone()
        .or_else(|| manifest_value(&manifest, "derived.split_label_column"))
        .unwrap_or_else(|| "label".into());
    let positive_label = args
        .positive_label
        .clone()
        .or_else(|| manifest_value(&manifest, "dataset.positive_label"))
        .ok_or_else(|| {
            Error::Config("positive label unknown: pass --positive-label or keep manifest.txt beside the model".into())
        })?;
    let test = load_csv(&args.data_path, &ColumnSelector::parse(&label_column), &positive_label)?;
    if test.n_features() != model.feature_count {
        return Err(Error::Data(format!(
            "feature count mismatch: data has {}, model expects {}",
            test.n_features(),
            model.feature_count
        )));
    }
    let report = evaluate(&model, &test)?;
    let dataset_name = manifest_value(&manifest, "dataset.name").unwrap_or_else(|| test.name().to_string());

    ensure_out_dir(&args.out)?;
    let csv_path = args.out.join("report.csv");
    let csv = format!("{}\n{}\n", EvaluationReport::CSV_HEADER, report.csv_row());
    fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;
    let summary_path = args.out.join("summary.txt");
    fs::write(&summary_path, report.summary_text(&dataset_name)).map_err(|e| Error::io(&summary_path, e))?;

    print!("{}", report.summary_text(&dataset_name));
    Ok(report)
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<SweepTable> {
    cfg.validate()?;
    let (data, _) = load_configured_dataset(cfg)?;
    let table = sweep_train_fraction(&data, &cfg.sweep_fractions, &cfg.ensemble, cfg.repeats)?;
    ensure_out_dir(&cfg.output)?;
    let path = cfg.output.join("sweep.csv");
    fs::write(&path, table.to_csv()).map_err(|e| Error::io(&path, e))?;
    println!(
        "swept {} fractions x {} repeats; wrote {}",
        cfg.sweep_fractions.len(),
        cfg.repeats,
        path.display()
    );
    Ok(table)
}

pub fn cmd_resample(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    let (data, _) = load_configured_dataset(cfg)?;
    let plan = cfg
        .ensemble
        .plan
        .with_seed(rng::derive(cfg.ensemble.seed, "resample", 0));
    let balanced = balance(&data, &plan)?;

    ensure_out_dir(&cfg.output)?;
    let path = cfg.output.join("balanced.csv");
    let mut out = String::new();
    for j in 0..balanced.n_features() {
        let _ = write!(out, "f{j},");
    }
    out.push_str("label,synthetic\n");
    for i in 0..balanced.n_rows() {
        for v in balanced.row(i) {
            let _ = write!(out, "{v},");
        }
        let token = match balanced.label(i) {
            Label::Positive => cfg.positive_label.as_str(),
            Label::Negative => NEGATIVE_TOKEN,
        };
        // A row is synthetic when its feature vector is not an original row.
        let synthetic = !data.rows().iter().any(|r| r == balanced.row(i));
        let _ = writeln!(out, "{token},{}", if synthetic { 1 } else { 0 });
    }
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    println!(
        "balanced {} rows -> {} rows ({} positive); wrote {}",
        data.n_rows(),
        balanced.n_rows(),
        balanced.positive_count(),
        path.display()
    );
    Ok(())
}

pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<ComparisonTable> {
    cfg.validate()?;
    let (data, _) = load_configured_dataset(cfg)?;
    let table = compare_baseline(&data, cfg.train_fraction, &cfg.ensemble, cfg.repeats)?;
    ensure_out_dir(&cfg.output)?;
    let path = cfg.output.join("compare.csv");
    fs::write(&path, table.to_csv()).map_err(|e| Error::io(&path, e))?;
    println!(
        "compared ensemble vs boosted stumps over {} paired repeats; ensemble minority wins: {}; wrote {}",
        cfg.repeats,
        table.ensemble_minority_wins(),
        path.display()
    );
    Ok(table)
}
