//! The top-level hybrid: class-aware bagging into balanced subsets, one
//! boosted GP model per bag, cross-bag voting for the final label.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::boosting::{gpboost_train, weighted_median_predict, BoostedModel};
use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::gp::GpConfig;
use crate::resampling::{balance, ResamplingPlan};
use crate::rng;

/// How member votes combine into the ensemble output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoteRule {
    /// Score = fraction of members voting positive (default).
    MajorityLabel,
    /// Score = mean of the members' weighted-median scores.
    MeanScore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub bag_count: usize,
    /// Minority rows per bag; `None` copies all of them.
    pub per_bag_minority: Option<usize>,
    /// Majority rows per bag; `None` matches the bag's minority count.
    pub per_bag_majority: Option<usize>,
    pub plan: ResamplingPlan,
    pub boost_rounds: usize,
    pub gp: GpConfig,
    pub vote: VoteRule,
    /// Member-level threshold mapping median scores to labels.
    pub member_threshold: f64,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            bag_count: 40,
            per_bag_minority: None,
            per_bag_majority: None,
            plan: ResamplingPlan::default(),
            boost_rounds: 10,
            gp: GpConfig::default(),
            vote: VoteRule::MajorityLabel,
            member_threshold: 0.5,
            seed: 42,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bag_count == 0 {
            return Err(Error::Config("bag_count must be >= 1".into()));
        }
        if self.boost_rounds == 0 {
            return Err(Error::Config("boost_rounds must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.member_threshold) {
            return Err(Error::Config("member_threshold must be in [0, 1]".into()));
        }
        self.plan.validate()?;
        self.gp.validate()
    }
}

/// A trained ensemble; members share the training feature count. The
/// config snapshot records exactly how the model was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub members: Vec<BoostedModel>,
    pub config: EnsembleConfig,
    pub feature_count: usize,
}

impl EnsembleModel {
    pub fn seed(&self) -> u64 {
        self.config.seed
    }
}

/// Assemble one bag: copy (or bootstrap) the minority, bootstrap the
/// majority, then balance per the plan. `bag_seed` drives every random
/// step, so bags are independent given their derived seeds.
pub fn build_bag(train: &Dataset, cfg: &EnsembleConfig, bag_seed: u64) -> Result<Dataset> {
    let (minority, majority) = train.class_partition()?;
    let minority_part = match cfg.per_bag_minority {
        None => minority,
        Some(n) => minority.bootstrap(n, None, rng::derive(bag_seed, "bag-minority", 0))?,
    };
    let majority_n = cfg.per_bag_majority.unwrap_or(minority_part.n_rows());
    let majority_part = majority.bootstrap(majority_n, None, rng::derive(bag_seed, "bag-majority", 0))?;
    let bag = minority_part.concat(&majority_part)?;
    balance(&bag, &cfg.plan.with_seed(rng::derive(bag_seed, "bag-balance", 0)))
}

pub fn build_bags(train: &Dataset, cfg: &EnsembleConfig) -> Result<Vec<Dataset>> {
    cfg.validate()?;
    (0..cfg.bag_count)
        .map(|b| build_bag(train, cfg, rng::derive(cfg.seed, "bag", b as u64)))
        .collect()
}

/// Train one boosted model per bag. Bags train in parallel; every bag's
/// seed is derived up front, so results match sequential training.
pub fn train_ensemble(train: &Dataset, cfg: &EnsembleConfig) -> Result<EnsembleModel> {
    cfg.validate()?;
    if !train.has_both_classes() {
        return Err(Error::Data("training needs both classes present".into()));
    }
    let members: Result<Vec<BoostedModel>> = (0..cfg.bag_count)
        .into_par_iter()
        .map(|b| {
            let bag_seed = rng::derive(cfg.seed, "bag", b as u64);
            let bag = build_bag(train, cfg, bag_seed)?;
            let mut model = gpboost_train(
                &bag,
                cfg.boost_rounds,
                &cfg.gp,
                rng::derive(bag_seed, "bag-boost", 0),
            )?;
            model.decision_threshold = cfg.member_threshold;
            Ok(model)
        })
        .collect();
    Ok(EnsembleModel {
        members: members?,
        config: cfg.clone(),
        feature_count: train.n_features(),
    })
}

/// Vote score in [0, 1] and the label it induces (ties go positive).
pub fn predict(model: &EnsembleModel, x: &[f64]) -> Result<(f64, Label)> {
    if x.len() != model.feature_count {
        return Err(Error::Data(format!(
            "input has {} features, model expects {}",
            x.len(),
            model.feature_count
        )));
    }
    let score = match model.config.vote {
        VoteRule::MajorityLabel => {
            let positives = model
                .members
                .iter()
                .filter(|m| weighted_median_predict(m, x).1 == Label::Positive)
                .count();
            positives as f64 / model.members.len() as f64
        }
        VoteRule::MeanScore => {
            model
                .members
                .iter()
                .map(|m| weighted_median_predict(m, x).0)
                .sum::<f64>()
                / model.members.len() as f64
        }
    };
    let label = if score >= 0.5 { Label::Positive } else { Label::Negative };
    Ok((score, label))
}

/// Element-wise prediction, order preserved.
pub fn predict_batch(model: &EnsembleModel, data: &Dataset) -> Result<Vec<(f64, Label)>> {
    if data.n_rows() > 0 && data.n_features() != model.feature_count {
        return Err(Error::Data(format!(
            "dataset has {} features, model expects {}",
            data.n_features(),
            model.feature_count
        )));
    }
    data.rows().iter().map(|r| predict(model, r)).collect()
}

impl EnsembleModel {
    /// Persist as a directory: one text file per member, a short index
    /// file, and the config snapshot the model was trained with.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut index = String::new();
        index.push_str("format = gpbag-ensemble v1\n");
        index.push_str(&format!("members = {}\n", self.members.len()));
        index.push_str(&format!("feature_count = {}\n", self.feature_count));
        let index_path = dir.join("ensemble.txt");
        fs::write(&index_path, index).map_err(|e| Error::io(&index_path, e))?;
        let config_path = dir.join("config.txt");
        fs::write(&config_path, crate::config::ensemble_config_to_text(&self.config))
            .map_err(|e| Error::io(&config_path, e))?;
        for (i, member) in self.members.iter().enumerate() {
            let path = dir.join(format!("member_{i:03}.model"));
            fs::write(&path, member.to_text()).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<EnsembleModel> {
        let index_path = dir.join("ensemble.txt");
        let index = fs::read_to_string(&index_path).map_err(|e| Error::io(&index_path, e))?;
        let mut members_n = None;
        let mut feature_count = None;
        for line in index.lines() {
            let Some((key, value)) = line.split_once('=') else { continue };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "format" => {
                    if value != "gpbag-ensemble v1" {
                        return Err(Error::Model(format!("unknown ensemble format '{value}'")));
                    }
                }
                "members" => members_n = value.parse::<usize>().ok(),
                "feature_count" => feature_count = value.parse::<usize>().ok(),
                _ => {}
            }
        }
        let members_n = members_n.ok_or_else(|| Error::Model("index missing member count".into()))?;
        let feature_count =
            feature_count.ok_or_else(|| Error::Model("index missing feature_count".into()))?;
        if members_n == 0 {
            return Err(Error::Model("ensemble holds no members".into()));
        }
        let config_path = dir.join("config.txt");
        let config_text = fs::read_to_string(&config_path).map_err(|e| Error::io(&config_path, e))?;
        let config = crate::config::ensemble_config_from_text(&config_text)?;
        let mut members = Vec::with_capacity(members_n);
        for i in 0..members_n {
            let path = dir.join(format!("member_{i:03}.model"));
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            members.push(BoostedModel::from_text(&text)?);
        }
        Ok(EnsembleModel {
            members,
            config,
            feature_count,
        })
    }
}
