//! Per-bag class balancing: over-sampling of the minority (random
//! duplication or SMOTE interpolation) and under-sampling of the majority
//! (random removal or neighborhood cleaning).

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dataset::{ColumnKind, Dataset, Label};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oversampler {
    None,
    Random,
    Smote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Undersampler {
    None,
    Random,
    Ncl,
}

/// How to balance one training subset.
#[derive(Debug, Clone, PartialEq)]
pub struct ResamplingPlan {
    pub oversampler: Oversampler,
    pub undersampler: Undersampler,
    /// Desired majority/minority ratio after resampling.
    pub target_ratio: f64,
    pub smote_k: usize,
    pub ncl_k: usize,
    /// Min-max normalize features before nearest-neighbor distances.
    pub normalize: bool,
    /// Absolute majority row count for the random undersampler; overrides
    /// the ratio-derived count when set.
    pub undersample_keep: Option<usize>,
    pub seed: u64,
}

impl Default for ResamplingPlan {
    fn default() -> Self {
        ResamplingPlan {
            oversampler: Oversampler::Smote,
            undersampler: Undersampler::Random,
            target_ratio: 1.0,
            smote_k: 5,
            ncl_k: 3,
            normalize: true,
            undersample_keep: None,
            seed: 0,
        }
    }
}

impl ResamplingPlan {
    pub fn none() -> Self {
        ResamplingPlan {
            oversampler: Oversampler::None,
            undersampler: Undersampler::None,
            ..ResamplingPlan::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_ratio < 1.0 {
            return Err(Error::Config(format!(
                "target_ratio must be >= 1, got {}",
                self.target_ratio
            )));
        }
        if self.smote_k == 0 || self.ncl_k == 0 {
            return Err(Error::Config("smote_k and ncl_k must be >= 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut p = self.clone();
        p.seed = seed;
        p
    }
}

/// Column scales for min-max normalized distances. Constant columns get
/// scale 1 so they contribute nothing.
fn column_scales(data: &Dataset, normalize: bool) -> Vec<(f64, f64)> {
    let d = data.n_features();
    if !normalize || data.n_rows() == 0 {
        return vec![(0.0, 1.0); d];
    }
    (0..d)
        .map(|j| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for r in data.rows() {
                lo = lo.min(r[j]);
                hi = hi.max(r[j]);
            }
            let span = hi - lo;
            (lo, if span > 0.0 { span } else { 1.0 })
        })
        .collect()
}

fn squared_distance(a: &[f64], b: &[f64], scales: &[(f64, f64)]) -> f64 {
    a.iter()
        .zip(b)
        .zip(scales)
        .map(|((&x, &y), &(_, span))| {
            let dx = (x - y) / span;
            dx * dx
        })
        .sum()
}

/// Indices of the k nearest rows to `query_idx` among `rows`, self
/// excluded, distance ties broken by lower row index.
fn knn_indices(rows: &[Vec<f64>], query_idx: usize, k: usize, scales: &[(f64, f64)]) -> Vec<usize> {
    let mut dist: Vec<(f64, usize)> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != query_idx)
        .map(|(i, r)| (squared_distance(&rows[query_idx], r, scales), i))
        .collect();
    dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    dist.truncate(k);
    dist.into_iter().map(|(_, i)| i).collect()
}

/// Duplicate `extra` minority rows uniformly at random with replacement.
pub fn random_oversample(minority: &Dataset, extra: usize, seed: u64) -> Result<Dataset> {
    if minority.n_rows() == 0 {
        return Err(Error::Data("cannot oversample an empty dataset".into()));
    }
    let mut rng = rng::sub_rng(seed, "oversample", 0);
    let mut indices: Vec<usize> = (0..minority.n_rows()).collect();
    for _ in 0..extra {
        indices.push(rng.random_range(0..minority.n_rows()));
    }
    Ok(minority.take_rows(&indices, minority.name().to_string()))
}

/// A SMOTE synthetic row together with the pair it interpolates.
#[derive(Debug, Clone)]
pub struct SyntheticRow {
    pub values: Vec<f64>,
    pub parent: usize,
    pub neighbor: usize,
}

/// SMOTE interpolation details; `dataset` holds the originals followed by
/// the synthetic rows, in generation order.
#[derive(Debug, Clone)]
pub struct SmoteOutput {
    pub dataset: Dataset,
    pub synthetic: Vec<SyntheticRow>,
}

/// Add `extra` synthetic minority rows. Each synthetic row interpolates a
/// random minority row toward one of its k nearest minority neighbors:
/// `x_new = x_i + g * (x_nn - x_i)` with `g ~ U[0,1]`. Integer columns are
/// rounded to the nearest integer afterwards.
pub fn smote_detailed(minority: &Dataset, extra: usize, k: usize, normalize: bool, seed: u64) -> Result<SmoteOutput> {
    if minority.n_rows() < 2 {
        return Err(Error::Data("SMOTE requires >= 2 minority samples".into()));
    }
    if k == 0 {
        return Err(Error::Config("SMOTE needs k >= 1".into()));
    }
    let mut rng = rng::sub_rng(seed, "smote", 0);
    let scales = column_scales(minority, normalize);
    let k_eff = k.min(minority.n_rows() - 1);
    let neighbors: Vec<Vec<usize>> = (0..minority.n_rows())
        .map(|i| knn_indices(minority.rows(), i, k_eff, &scales))
        .collect();

    let mut features: Vec<Vec<f64>> = minority.rows().to_vec();
    let mut labels: Vec<Label> = minority.labels().to_vec();
    let mut synthetic = Vec::with_capacity(extra);
    for _ in 0..extra {
        let i = rng.random_range(0..minority.n_rows());
        let nn = neighbors[i][rng.random_range(0..k_eff)];
        let g: f64 = rng.random();
        let values: Vec<f64> = minority
            .row(i)
            .iter()
            .zip(minority.row(nn))
            .zip(minority.column_kinds())
            .map(|((&a, &b), kind)| {
                let v = a + g * (b - a);
                match kind {
                    ColumnKind::Integer => v.round(),
                    ColumnKind::Real => v,
                }
            })
            .collect();
        features.push(values.clone());
        labels.push(Label::Positive);
        synthetic.push(SyntheticRow {
            values,
            parent: i,
            neighbor: nn,
        });
    }
    let dataset = Dataset::from_rows(
        minority.name().to_string(),
        features,
        labels,
        minority.column_kinds().to_vec(),
    )?;
    Ok(SmoteOutput { dataset, synthetic })
}

pub fn smote(minority: &Dataset, extra: usize, k: usize, seed: u64) -> Result<Dataset> {
    smote_detailed(minority, extra, k, true, seed).map(|o| o.dataset)
}

/// Uniform sample without replacement of `keep` majority rows.
pub fn random_undersample(majority: &Dataset, keep: usize, seed: u64) -> Result<Dataset> {
    if keep == 0 || keep > majority.n_rows() {
        return Err(Error::Config(format!(
            "undersample keep must be in 1..={}, got {}",
            majority.n_rows(),
            keep
        )));
    }
    let mut rng = rng::sub_rng(seed, "undersample", 0);
    let mut indices: Vec<usize> = (0..majority.n_rows()).collect();
    indices.shuffle(&mut rng);
    indices.truncate(keep);
    indices.sort_unstable();
    Ok(majority.take_rows(&indices, majority.name().to_string()))
}

/// Neighborhood cleaning over a combined two-class dataset: drop a
/// negative row when the majority of its k nearest neighbors are
/// positive, and drop the negative rows among the k neighbors of any
/// positive row that its k-NN vote misclassifies. Positive rows are never
/// removed; the pass is deterministic.
pub fn ncl_clean(combined: &Dataset, k: usize, normalize: bool) -> Result<Dataset> {
    if !combined.has_both_classes() {
        return Err(Error::Data("neighborhood cleaning needs both classes present".into()));
    }
    if k == 0 {
        return Err(Error::Config("neighborhood cleaning needs k >= 1".into()));
    }
    if k >= combined.n_rows() {
        return Err(Error::Config(format!(
            "neighborhood cleaning needs k < row count ({})",
            combined.n_rows()
        )));
    }
    let scales = column_scales(combined, normalize);
    let n = combined.n_rows();
    let mut drop = vec![false; n];
    for i in 0..n {
        let nn = knn_indices(combined.rows(), i, k, &scales);
        let pos_votes = nn.iter().filter(|&&j| combined.label(j) == Label::Positive).count();
        let neg_votes = k - pos_votes;
        match combined.label(i) {
            Label::Negative => {
                if pos_votes > neg_votes {
                    drop[i] = true;
                }
            }
            Label::Positive => {
                if neg_votes > pos_votes {
                    for &j in &nn {
                        if combined.label(j) == Label::Negative {
                            drop[j] = true;
                        }
                    }
                }
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !drop[i]).collect();
    Ok(combined.take_rows(&keep, combined.name().to_string()))
}

/// Balance one bag: under-sample the majority toward the target ratio,
/// then over-sample the minority to close the remaining gap, and shuffle.
pub fn balance(bag: &Dataset, plan: &ResamplingPlan) -> Result<Dataset> {
    plan.validate()?;
    if !bag.has_both_classes() {
        return Err(Error::Data("balance needs both classes present".into()));
    }

    let cleaned;
    let source = if plan.undersampler == Undersampler::Ncl {
        cleaned = ncl_clean(bag, plan.ncl_k, plan.normalize)?;
        &cleaned
    } else {
        bag
    };
    let (minority, majority) = source.class_partition()?;

    let majority = match plan.undersampler {
        Undersampler::Random => {
            let ratio_keep = (minority.n_rows() as f64 * plan.target_ratio).round() as usize;
            let keep = match plan.undersample_keep {
                Some(k) => k,
                None => ratio_keep.clamp(1, majority.n_rows()),
            };
            if keep == majority.n_rows() {
                majority
            } else {
                random_undersample(&majority, keep, rng::derive(plan.seed, "balance-under", 0))?
            }
        }
        Undersampler::None | Undersampler::Ncl => majority,
    };

    // Minority rows needed so that majority/minority <= target_ratio.
    let want_minority = (majority.n_rows() as f64 / plan.target_ratio).ceil() as usize;
    let extra = want_minority.saturating_sub(minority.n_rows());
    let minority = match plan.oversampler {
        _ if extra == 0 => minority,
        Oversampler::None => minority,
        Oversampler::Random => {
            random_oversample(&minority, extra, rng::derive(plan.seed, "balance-over", 0))?
        }
        Oversampler::Smote => smote_detailed(
            &minority,
            extra,
            plan.smote_k,
            plan.normalize,
            rng::derive(plan.seed, "balance-over", 0),
        )?
        .dataset,
    };

    let mut combined = minority.concat(&majority)?;
    let mut order: Vec<usize> = (0..combined.n_rows()).collect();
    order.shuffle(&mut rng::sub_rng(plan.seed, "balance-shuffle", 0));
    combined = combined.take_rows(&order, bag.name().to_string());
    Ok(combined)
}
