//! Experiment configuration: flat key-value text with dotted section
//! prefixes. Flags override file values; the fully resolved config is
//! echoed into the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dataset::ColumnSelector;
use crate::ensemble::{EnsembleConfig, VoteRule};
use crate::error::{Error, Result};
use crate::resampling::{Oversampler, Undersampler};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset_path: Option<PathBuf>,
    pub label_column: ColumnSelector,
    pub positive_label: String,
    pub dataset_name: Option<String>,
    pub train_fraction: f64,
    pub stratified: bool,
    pub ensemble: EnsembleConfig,
    pub sweep_fractions: Vec<f64>,
    pub repeats: usize,
    pub output: PathBuf,
    /// True when the file did not set a seed and the default was used.
    pub seed_defaulted: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset_path: None,
            label_column: ColumnSelector::Name("label".into()),
            positive_label: String::new(),
            dataset_name: None,
            train_fraction: 0.5,
            stratified: true,
            ensemble: EnsembleConfig::default(),
            sweep_fractions: vec![0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 0.9],
            repeats: 5,
            output: PathBuf::from("out"),
            seed_defaulted: true,
        }
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got '{value}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        cfg.ensemble.seed = DEFAULT_SEED;
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected 'key = value', got '{raw}'",
                    line_no + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let e = &mut self.ensemble;
        match key {
            "dataset.path" => self.dataset_path = Some(PathBuf::from(value)),
            "dataset.label_column" => self.label_column = ColumnSelector::parse(value),
            "dataset.positive_label" => self.positive_label = value.to_string(),
            "dataset.name" => self.dataset_name = Some(value.to_string()),
            "split.train_fraction" => self.train_fraction = parse_num(key, value)?,
            "split.stratified" => self.stratified = parse_bool(key, value)?,
            "resample.oversampler" => {
                e.plan.oversampler = match value {
                    "none" => Oversampler::None,
                    "random" => Oversampler::Random,
                    "smote" => Oversampler::Smote,
                    _ => {
                        return Err(Error::Config(format!(
                            "{key}: expected none|random|smote, got '{value}'"
                        )))
                    }
                }
            }
            "resample.undersampler" => {
                e.plan.undersampler = match value {
                    "none" => Undersampler::None,
                    "random" => Undersampler::Random,
                    "ncl" => Undersampler::Ncl,
                    _ => {
                        return Err(Error::Config(format!(
                            "{key}: expected none|random|ncl, got '{value}'"
                        )))
                    }
                }
            }
            "resample.target_ratio" => e.plan.target_ratio = parse_num(key, value)?,
            "resample.smote_k" => e.plan.smote_k = parse_num(key, value)?,
            "resample.ncl_k" => e.plan.ncl_k = parse_num(key, value)?,
            "resample.normalize" => e.plan.normalize = parse_bool(key, value)?,
            "resample.undersample_keep" => {
                e.plan.undersample_keep = if value.is_empty() {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "ensemble.bag_count" => e.bag_count = parse_num(key, value)?,
            "ensemble.per_bag_minority" => {
                e.per_bag_minority = if value == "all" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "ensemble.per_bag_majority" => {
                e.per_bag_majority = if value == "match" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "ensemble.boost_rounds" => e.boost_rounds = parse_num(key, value)?,
            "ensemble.vote" => {
                e.vote = match value {
                    "majority" => VoteRule::MajorityLabel,
                    "mean_score" => VoteRule::MeanScore,
                    _ => {
                        return Err(Error::Config(format!(
                            "{key}: expected majority|mean_score, got '{value}'"
                        )))
                    }
                }
            }
            "ensemble.member_threshold" => e.member_threshold = parse_num(key, value)?,
            "gp.population_size" => e.gp.population_size = parse_num(key, value)?,
            "gp.generations" => e.gp.generations = parse_num(key, value)?,
            "gp.subpopulations" => e.gp.subpopulations = parse_num(key, value)?,
            "gp.islands" => e.gp.islands = parse_bool(key, value)?,
            "gp.tournament_k" => e.gp.tournament_k = parse_num(key, value)?,
            "gp.crossover_func_pt_fraction" => e.gp.crossover_func_pt_fraction = parse_num(key, value)?,
            "gp.crossover_any_pt_fraction" => e.gp.crossover_any_pt_fraction = parse_num(key, value)?,
            "gp.fitness_prop_repro_fraction" => e.gp.fitness_prop_repro_fraction = parse_num(key, value)?,
            "gp.max_depth_new" => e.gp.max_depth_new = parse_num(key, value)?,
            "gp.max_depth_crossover" => e.gp.max_depth_crossover = parse_num(key, value)?,
            "gp.max_mutant_depth" => e.gp.max_mutant_depth = parse_num(key, value)?,
            "gp.parsimony_factor" => e.gp.parsimony_factor = parse_num(key, value)?,
            "sweep.fractions" => {
                self.sweep_fractions = value
                    .split(',')
                    .map(|s| parse_num("sweep.fractions", s.trim()))
                    .collect::<Result<Vec<f64>>>()?
            }
            "repeats" => self.repeats = parse_num(key, value)?,
            "seed" => {
                e.seed = parse_num(key, value)?;
                self.seed_defaulted = false;
            }
            "output" => self.output = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// The reduced desk-scale preset. This is NOT the reference
    /// configuration; it exists for fast iteration and smoke runs.
    pub fn apply_quick_preset(&mut self) {
        self.ensemble.gp.population_size = 100;
        self.ensemble.gp.generations = 10;
        self.ensemble.bag_count = 10;
    }

    pub fn apply_preset(&mut self, name: &str) -> Result<()> {
        match name {
            "quick" => {
                self.apply_quick_preset();
                Ok(())
            }
            _ => Err(Error::Config(format!("unknown preset '{name}' (available: quick)"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "split.train_fraction must be in (0, 1], got {}",
                self.train_fraction
            )));
        }
        if self.repeats == 0 {
            return Err(Error::Config("repeats must be >= 1".into()));
        }
        if self.sweep_fractions.is_empty() {
            return Err(Error::Config("sweep.fractions must not be empty".into()));
        }
        self.ensemble.validate()
    }

    pub fn require_dataset(&self) -> Result<&Path> {
        let path = self
            .dataset_path
            .as_deref()
            .ok_or_else(|| Error::Config("dataset.path is required".into()))?;
        if self.positive_label.is_empty() {
            return Err(Error::Config("dataset.positive_label is required".into()));
        }
        Ok(path)
    }

    pub fn dataset_display_name(&self) -> String {
        if let Some(name) = &self.dataset_name {
            return name.clone();
        }
        self.dataset_path
            .as_deref()
            .and_then(Path::file_stem)
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    }

    /// Fully resolved echo in a fixed key order; this is what lands in
    /// the manifest, so re-runs produce byte-identical files.
    pub fn to_text(&self) -> String {
        let e = &self.ensemble;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dataset.path = {}",
            self.dataset_path.as_deref().map(|p| p.display().to_string()).unwrap_or_default()
        );
        let _ = writeln!(out, "dataset.label_column = {}", self.label_column);
        let _ = writeln!(out, "dataset.positive_label = {}", self.positive_label);
        let _ = writeln!(out, "dataset.name = {}", self.dataset_display_name());
        let _ = writeln!(out, "split.train_fraction = {}", self.train_fraction);
        let _ = writeln!(out, "split.stratified = {}", self.stratified);
        let _ = writeln!(
            out,
            "resample.oversampler = {}",
            match e.plan.oversampler {
                Oversampler::None => "none",
                Oversampler::Random => "random",
                Oversampler::Smote => "smote",
            }
        );
        let _ = writeln!(
            out,
            "resample.undersampler = {}",
            match e.plan.undersampler {
                Undersampler::None => "none",
                Undersampler::Random => "random",
                Undersampler::Ncl => "ncl",
            }
        );
        let _ = writeln!(out, "resample.target_ratio = {}", e.plan.target_ratio);
        let _ = writeln!(out, "resample.smote_k = {}", e.plan.smote_k);
        let _ = writeln!(out, "resample.ncl_k = {}", e.plan.ncl_k);
        let _ = writeln!(out, "resample.normalize = {}", e.plan.normalize);
        let _ = writeln!(
            out,
            "resample.undersample_keep = {}",
            e.plan.undersample_keep.map(|k| k.to_string()).unwrap_or_default()
        );
        let _ = writeln!(out, "ensemble.bag_count = {}", e.bag_count);
        let _ = writeln!(
            out,
            "ensemble.per_bag_minority = {}",
            e.per_bag_minority.map(|n| n.to_string()).unwrap_or_else(|| "all".into())
        );
        let _ = writeln!(
            out,
            "ensemble.per_bag_majority = {}",
            e.per_bag_majority.map(|n| n.to_string()).unwrap_or_else(|| "match".into())
        );
        let _ = writeln!(out, "ensemble.boost_rounds = {}", e.boost_rounds);
        let _ = writeln!(
            out,
            "ensemble.vote = {}",
            match e.vote {
                VoteRule::MajorityLabel => "majority",
                VoteRule::MeanScore => "mean_score",
            }
        );
        let _ = writeln!(out, "ensemble.member_threshold = {}", e.member_threshold);
        let _ = writeln!(out, "gp.population_size = {}", e.gp.population_size);
        let _ = writeln!(out, "gp.generations = {}", e.gp.generations);
        let _ = writeln!(out, "gp.subpopulations = {}", e.gp.subpopulations);
        let _ = writeln!(out, "gp.islands = {}", e.gp.islands);
        let _ = writeln!(out, "gp.tournament_k = {}", e.gp.tournament_k);
        let _ = writeln!(out, "gp.crossover_func_pt_fraction = {}", e.gp.crossover_func_pt_fraction);
        let _ = writeln!(out, "gp.crossover_any_pt_fraction = {}", e.gp.crossover_any_pt_fraction);
        let _ = writeln!(out, "gp.fitness_prop_repro_fraction = {}", e.gp.fitness_prop_repro_fraction);
        let _ = writeln!(out, "gp.max_depth_new = {}", e.gp.max_depth_new);
        let _ = writeln!(out, "gp.max_depth_crossover = {}", e.gp.max_depth_crossover);
        let _ = writeln!(out, "gp.max_mutant_depth = {}", e.gp.max_mutant_depth);
        let _ = writeln!(out, "gp.parsimony_factor = {}", e.gp.parsimony_factor);
        let _ = writeln!(
            out,
            "sweep.fractions = {}",
            self.sweep_fractions.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(out, "repeats = {}", self.repeats);
        let _ = writeln!(out, "seed = {}", e.seed);
        let _ = writeln!(out, "output = {}", self.output.display());
        out
    }
}

/// Serialize just the training-relevant sections (resample.*, ensemble.*,
/// gp.*, seed) for embedding a config snapshot in model directories.
pub fn ensemble_config_to_text(cfg: &EnsembleConfig) -> String {
    let mut carrier = ExperimentConfig::default();
    carrier.ensemble = cfg.clone();
    carrier
        .to_text()
        .lines()
        .filter(|l| {
            l.starts_with("resample.")
                || l.starts_with("ensemble.")
                || l.starts_with("gp.")
                || l.starts_with("seed ")
        })
        .map(|l| format!("{l}\n"))
        .collect()
}

pub fn ensemble_config_from_text(text: &str) -> Result<EnsembleConfig> {
    Ok(ExperimentConfig::parse(text)?.ensemble)
}
