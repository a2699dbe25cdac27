//! Metrics (confusion counts, per-class accuracy, rank-based AUC) and the
//! experiment protocols: training-fraction sweeps and the paired
//! comparison against a plain boosted-stump baseline.

use std::fmt::Write as _;

use crate::boosting::{adaboost_m1_train, adaboost_predict, adaboost_score};
use crate::dataset::{Dataset, Label, SplitSpec};
use crate::ensemble::{predict_batch, train_ensemble, EnsembleConfig};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub true_positives: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_negatives + self.false_positives + self.true_negatives
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    pub minority_accuracy: f64,
    pub majority_accuracy: f64,
    pub overall_accuracy: f64,
    pub auc: f64,
    pub error_count: usize,
    pub seed: u64,
    pub train_fraction: Option<f64>,
}

/// Standard confusion counts with the minority class as positive.
pub fn confusion(predictions: &[Label], truth: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != truth.len() {
        return Err(Error::Data(format!(
            "predictions ({}) and truth ({}) differ in length",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Data("cannot build a confusion matrix from no rows".into()));
    }
    let mut m = ConfusionMatrix {
        true_positives: 0,
        false_negatives: 0,
        false_positives: 0,
        true_negatives: 0,
    };
    for (p, t) in predictions.iter().zip(truth) {
        match (t, p) {
            (Label::Positive, Label::Positive) => m.true_positives += 1,
            (Label::Positive, Label::Negative) => m.false_negatives += 1,
            (Label::Negative, Label::Positive) => m.false_positives += 1,
            (Label::Negative, Label::Negative) => m.true_negatives += 1,
        }
    }
    Ok(m)
}

/// Rank-based AUC (Mann-Whitney): the probability a random positive
/// outscores a random negative, ties counting half. Computed from
/// mid-ranks in O(n log n); equals the trapezoidal ROC area.
pub fn auc(scores: &[f64], truth: &[Label]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::Data("scores and truth differ in length".into()));
    }
    let positives = truth.iter().filter(|l| **l == Label::Positive).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Data("AUC needs at least one positive and one negative".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // Tied block occupies 1-based ranks i+1 ..= j; everyone gets the mid-rank.
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if truth[idx] == Label::Positive {
                rank_sum_pos += mid_rank;
            }
        }
        i = j;
    }
    let p = positives as f64;
    let n = negatives as f64;
    Ok((rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n))
}

/// Assemble a report from per-row scores, thresholded labels and truth.
pub fn report_from_scores(
    scores: &[f64],
    predictions: &[Label],
    truth: &[Label],
    seed: u64,
    train_fraction: Option<f64>,
) -> Result<EvaluationReport> {
    let m = confusion(predictions, truth)?;
    let auc = auc(scores, truth)?;
    Ok(EvaluationReport {
        confusion: m,
        minority_accuracy: m.true_positives as f64 / (m.true_positives + m.false_negatives) as f64,
        majority_accuracy: m.true_negatives as f64 / (m.true_negatives + m.false_positives) as f64,
        overall_accuracy: (m.true_positives + m.true_negatives) as f64 / m.total() as f64,
        auc,
        error_count: m.false_negatives + m.false_positives,
        seed,
        train_fraction,
    })
}

/// Evaluate a trained ensemble on a held-out set. AUC is computed on the
/// vote scores, whose granularity is 1/member-count.
pub fn evaluate(model: &crate::ensemble::EnsembleModel, test: &Dataset) -> Result<EvaluationReport> {
    if test.n_rows() == 0 || !test.has_both_classes() {
        return Err(Error::Data("evaluation needs a non-empty test set with both classes".into()));
    }
    let outputs = predict_batch(model, test)?;
    let scores: Vec<f64> = outputs.iter().map(|(s, _)| *s).collect();
    let predictions: Vec<Label> = outputs.iter().map(|(_, l)| *l).collect();
    report_from_scores(&scores, &predictions, test.labels(), model.seed(), None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub fraction: f64,
    pub repeat: usize,
    pub seed: u64,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionSummary {
    pub fraction: f64,
    pub mean_minority_accuracy: f64,
    pub std_minority_accuracy: f64,
    pub mean_majority_accuracy: f64,
    pub mean_overall_accuracy: f64,
    pub mean_auc: f64,
    pub mean_error_count: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<FractionSummary>,
}

fn mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    values.sum::<f64>() / n
}

fn sample_std(values: impl Iterator<Item = f64> + Clone, mean: f64) -> f64 {
    let n = values.clone().count();
    if n < 2 {
        return 0.0;
    }
    (values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// One stratified split + train + evaluate per (fraction, repeat) cell,
/// with per-fraction means and sample standard deviations.
pub fn sweep_train_fraction(
    data: &Dataset,
    fractions: &[f64],
    cfg: &EnsembleConfig,
    repeats: usize,
) -> Result<SweepTable> {
    if fractions.is_empty() {
        return Err(Error::Config("sweep needs at least one fraction".into()));
    }
    if repeats == 0 {
        return Err(Error::Config("sweep needs repeats >= 1".into()));
    }
    for f in fractions {
        if !(*f > 0.0 && *f < 1.0) {
            return Err(Error::Config(format!("sweep fractions must be in (0, 1), got {f}")));
        }
    }
    let mut rows = Vec::new();
    for (fi, &fraction) in fractions.iter().enumerate() {
        for repeat in 0..repeats {
            let cell = (fi * repeats + repeat) as u64;
            let run_seed = rng::derive(cfg.seed, "sweep-cell", cell);
            let (train, test) = data.stratified_split(&SplitSpec::new(fraction, run_seed))?;
            let mut run_cfg = cfg.clone();
            run_cfg.seed = run_seed;
            let model = train_ensemble(&train, &run_cfg)?;
            let mut report = evaluate(&model, &test)?;
            report.train_fraction = Some(fraction);
            rows.push(SweepRow {
                fraction,
                repeat,
                seed: run_seed,
                report,
            });
        }
    }
    let summaries = fractions
        .iter()
        .map(|&fraction| {
            let cell: Vec<&SweepRow> = rows.iter().filter(|r| r.fraction == fraction).collect();
            let minority = cell.iter().map(|r| r.report.minority_accuracy);
            let m_min = mean(minority.clone());
            FractionSummary {
                fraction,
                mean_minority_accuracy: m_min,
                std_minority_accuracy: sample_std(minority, m_min),
                mean_majority_accuracy: mean(cell.iter().map(|r| r.report.majority_accuracy)),
                mean_overall_accuracy: mean(cell.iter().map(|r| r.report.overall_accuracy)),
                mean_auc: mean(cell.iter().map(|r| r.report.auc)),
                mean_error_count: mean(cell.iter().map(|r| r.report.error_count as f64)),
            }
        })
        .collect();
    Ok(SweepTable { rows, summaries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ensemble,
    AdaboostStump,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ensemble => "ensemble",
            Method::AdaboostStump => "adaboost_stump",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub repeat: usize,
    pub seed: u64,
    pub method: Method,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    /// Repeats where the ensemble's minority accuracy strictly beats the
    /// baseline's.
    pub fn ensemble_minority_wins(&self) -> usize {
        let mut wins = 0;
        for pair in self.rows.chunks(2) {
            if let [a, b] = pair {
                let (ens, base) = if a.method == Method::Ensemble { (a, b) } else { (b, a) };
                if ens.report.minority_accuracy > base.report.minority_accuracy {
                    wins += 1;
                }
            }
        }
        wins
    }
}

/// Paired protocol: per repeat, one stratified split shared by the
/// proposed ensemble and a plain boosted-stump baseline trained on the
/// identical training rows.
pub fn compare_baseline(
    data: &Dataset,
    train_fraction: f64,
    cfg: &EnsembleConfig,
    repeats: usize,
) -> Result<ComparisonTable> {
    if repeats == 0 {
        return Err(Error::Config("comparison needs repeats >= 1".into()));
    }
    let mut rows = Vec::new();
    for repeat in 0..repeats {
        let run_seed = rng::derive(cfg.seed, "compare-cell", repeat as u64);
        let (train, test) = data.stratified_split(&SplitSpec::new(train_fraction, run_seed))?;

        let mut run_cfg = cfg.clone();
        run_cfg.seed = run_seed;
        let model = train_ensemble(&train, &run_cfg)?;
        let mut report = evaluate(&model, &test)?;
        report.train_fraction = Some(train_fraction);
        report.seed = run_seed;
        rows.push(ComparisonRow {
            repeat,
            seed: run_seed,
            method: Method::Ensemble,
            report,
        });

        let baseline = adaboost_m1_train(&train, cfg.boost_rounds, run_seed)?;
        let scores: Vec<f64> = test.rows().iter().map(|r| adaboost_score(&baseline, r)).collect();
        let predictions: Vec<Label> = test.rows().iter().map(|r| adaboost_predict(&baseline, r)).collect();
        let mut report = report_from_scores(&scores, &predictions, test.labels(), run_seed, Some(train_fraction))?;
        report.train_fraction = Some(train_fraction);
        rows.push(ComparisonRow {
            repeat,
            seed: run_seed,
            method: Method::AdaboostStump,
            report,
        });
    }
    Ok(ComparisonTable { rows })
}

fn fmt_fraction(f: Option<f64>) -> String {
    f.map(|v| v.to_string()).unwrap_or_default()
}

impl EvaluationReport {
    pub const CSV_HEADER: &'static str = "seed,train_fraction,tp,fn,fp,tn,minority_accuracy,majority_accuracy,overall_accuracy,auc,error_count";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            fmt_fraction(self.train_fraction),
            self.confusion.true_positives,
            self.confusion.false_negatives,
            self.confusion.false_positives,
            self.confusion.true_negatives,
            self.minority_accuracy,
            self.majority_accuracy,
            self.overall_accuracy,
            self.auc,
            self.error_count
        )
    }

    /// Human-readable summary with per-class accuracy up front.
    pub fn summary_text(&self, dataset: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dataset: {dataset}");
        let _ = writeln!(out, "minority accuracy: {:.2}%  ({} of {})",
            self.minority_accuracy * 100.0,
            self.confusion.true_positives,
            self.confusion.true_positives + self.confusion.false_negatives);
        let _ = writeln!(out, "majority accuracy: {:.2}%  ({} of {})",
            self.majority_accuracy * 100.0,
            self.confusion.true_negatives,
            self.confusion.true_negatives + self.confusion.false_positives);
        let _ = writeln!(out, "overall accuracy:  {:.2}%", self.overall_accuracy * 100.0);
        let _ = writeln!(out, "auc:               {:.4}", self.auc);
        let _ = writeln!(out, "errors:            {} (fn {} + fp {})",
            self.error_count, self.confusion.false_negatives, self.confusion.false_positives);
        let _ = writeln!(out, "confusion:         tp {} fn {} fp {} tn {}",
            self.confusion.true_positives, self.confusion.false_negatives,
            self.confusion.false_positives, self.confusion.true_negatives);
        out
    }
}

impl SweepTable {
    pub const CSV_HEADER: &'static str = "kind,fraction,repeat,seed,tp,fn,fp,tn,minority_accuracy,majority_accuracy,overall_accuracy,auc,error_count,minority_accuracy_std";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "run,{},{},{},{},{},{},{},{},{},{},{},{},",
                r.fraction,
                r.repeat,
                r.seed,
                r.report.confusion.true_positives,
                r.report.confusion.false_negatives,
                r.report.confusion.false_positives,
                r.report.confusion.true_negatives,
                r.report.minority_accuracy,
                r.report.majority_accuracy,
                r.report.overall_accuracy,
                r.report.auc,
                r.report.error_count
            );
        }
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "mean,{},,,,,,,{},{},{},{},{},{}",
                s.fraction,
                s.mean_minority_accuracy,
                s.mean_majority_accuracy,
                s.mean_overall_accuracy,
                s.mean_auc,
                s.mean_error_count,
                s.std_minority_accuracy
            );
        }
        out
    }
}

impl ComparisonTable {
    pub const CSV_HEADER: &'static str = "repeat,seed,method,tp,fn,fp,tn,minority_accuracy,majority_accuracy,overall_accuracy,auc,error_count";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                r.repeat,
                r.seed,
                r.method.name(),
                r.report.confusion.true_positives,
                r.report.confusion.false_negatives,
                r.report.confusion.false_positives,
                r.report.confusion.true_negatives,
                r.report.minority_accuracy,
                r.report.majority_accuracy,
                r.report.overall_accuracy,
                r.report.auc,
                r.report.error_count
            );
        }
        out
    }
}
