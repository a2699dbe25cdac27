//! Two boosting trainers and their predictors: AdaBoost.M1 over decision
//! stumps, and a variant whose weak hypothesis each round is the best
//! program from a GP run on a weight-proportional bootstrap, combined by
//! confidence-weighted median.

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::gp::{self, clamp01, FitnessCase, GpConfig, Program};
use crate::rng;

/// Floor applied to beta inside log(1/beta) vote masses so a perfect
/// round (beta = 0) gets a large finite weight.
const BETA_FLOOR: f64 = 1e-10;

/// Axis-aligned threshold classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    /// When true, rows with feature value above the threshold are positive.
    pub positive_above: bool,
}

impl Stump {
    pub fn predict(&self, x: &[f64]) -> Label {
        let above = x[self.feature] > self.threshold;
        if above == self.positive_above {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    /// Exhaustive weighted-error minimization over all features, midpoint
    /// thresholds and both polarities. Deterministic: first strict
    /// improvement wins, scanning features then thresholds in order.
    pub fn fit(data: &Dataset, weights: &[f64]) -> Result<Stump> {
        if data.n_rows() == 0 {
            return Err(Error::Data("cannot fit a stump on an empty dataset".into()));
        }
        if weights.len() != data.n_rows() {
            return Err(Error::Data("weight vector length mismatch".into()));
        }
        let total_w: f64 = weights.iter().sum();
        let mut best: Option<(f64, Stump)> = None;
        let mut consider = |err: f64, stump: Stump| match &best {
            Some((e, _)) if *e <= err => {}
            _ => best = Some((err, stump)),
        };
        for feature in 0..data.n_features() {
            let mut order: Vec<usize> = (0..data.n_rows()).collect();
            order.sort_by(|&a, &b| data.row(a)[feature].total_cmp(&data.row(b)[feature]));
            // Threshold below the minimum: everything is "above".
            let mut err_above: f64 = order
                .iter()
                .filter(|&&i| data.label(i) == Label::Negative)
                .map(|&i| weights[i])
                .sum();
            let low = data.row(order[0])[feature] - 1.0;
            consider(
                err_above / total_w,
                Stump {
                    feature,
                    threshold: low,
                    positive_above: true,
                },
            );
            consider(
                1.0 - err_above / total_w,
                Stump {
                    feature,
                    threshold: low,
                    positive_above: false,
                },
            );
            let mut idx = 0;
            while idx < order.len() {
                let v = data.row(order[idx])[feature];
                // Move every row sharing this value to the "below" side.
                while idx < order.len() && data.row(order[idx])[feature] == v {
                    let i = order[idx];
                    match data.label(i) {
                        Label::Positive => err_above += weights[i],
                        Label::Negative => err_above -= weights[i],
                    }
                    idx += 1;
                }
                if idx == order.len() {
                    break;
                }
                let next = data.row(order[idx])[feature];
                let threshold = 0.5 * (v + next);
                consider(
                    err_above / total_w,
                    Stump {
                        feature,
                        threshold,
                        positive_above: true,
                    },
                );
                consider(
                    1.0 - err_above / total_w,
                    Stump {
                        feature,
                        threshold,
                        positive_above: false,
                    },
                );
            }
        }
        Ok(best.expect("at least one candidate stump").1)
    }
}

/// A weak hypothesis is either a GP program scored in [0, 1] or a stump.
#[derive(Debug, Clone, PartialEq)]
pub enum WeakModel {
    Program(Program),
    Stump(Stump),
}

impl WeakModel {
    /// Real-valued output in [0, 1].
    pub fn score(&self, x: &[f64]) -> f64 {
        match self {
            WeakModel::Program(p) => clamp01(p.eval(x)),
            WeakModel::Stump(s) => s.predict(x).target(),
        }
    }

    pub fn predict(&self, x: &[f64], threshold: f64) -> Label {
        if self.score(x) >= threshold {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            WeakModel::Program(p) => p.to_string(),
            WeakModel::Stump(s) => format!(
                "(stump {} {} {})",
                s.feature,
                s.threshold,
                if s.positive_above { "above" } else { "below" }
            ),
        }
    }

    pub fn parse(text: &str) -> Result<WeakModel> {
        let trimmed = text.trim();
        if let Some(body) = trimmed.strip_prefix("(stump ") {
            let body = body
                .strip_suffix(')')
                .ok_or_else(|| Error::Model("unterminated stump".into()))?;
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Model(format!("bad stump text '{trimmed}'")));
            }
            let feature = parts[0]
                .parse()
                .map_err(|_| Error::Model(format!("bad stump feature '{}'", parts[0])))?;
            let threshold = parts[1]
                .parse()
                .map_err(|_| Error::Model(format!("bad stump threshold '{}'", parts[1])))?;
            let positive_above = match parts[2] {
                "above" => true,
                "below" => false,
                other => return Err(Error::Model(format!("bad stump polarity '{other}'"))),
            };
            Ok(WeakModel::Stump(Stump {
                feature,
                threshold,
                positive_above,
            }))
        } else {
            Ok(WeakModel::Program(Program::parse(trimmed)?))
        }
    }
}

/// One boosting round: the weak model, its recorded error (0-1 error for
/// AdaBoost.M1, mean relative loss for the GP trainer) and its
/// confidence beta = error / (1 - error).
#[derive(Debug, Clone, PartialEq)]
pub struct WeakHypothesis {
    pub model: WeakModel,
    pub epsilon: f64,
    pub beta: f64,
    pub round: usize,
}

/// Ordered sequence of weak hypotheses with the label decision threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    pub hypotheses: Vec<WeakHypothesis>,
    pub decision_threshold: f64,
}

/// Per-sample relative losses of one round and their weighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundLoss {
    pub per_sample: Vec<f64>,
    pub mean: f64,
}

/// Weighted 0-1 error of label predictions under normalized weights.
pub fn weighted_error_from_labels(predictions: &[Label], truth: &[Label], weights: &[f64]) -> f64 {
    assert_eq!(predictions.len(), truth.len());
    assert_eq!(predictions.len(), weights.len());
    let total: f64 = weights.iter().sum();
    predictions
        .iter()
        .zip(truth)
        .zip(weights)
        .filter(|((p, t), _)| p != t)
        .map(|(_, w)| w)
        .sum::<f64>()
        / total
}

/// Weighted 0-1 error of a hypothesis on a dataset.
pub fn weighted_error(h: &WeakModel, data: &Dataset, weights: &[f64]) -> f64 {
    let predictions: Vec<Label> = data.rows().iter().map(|r| h.predict(r, 0.5)).collect();
    weighted_error_from_labels(&predictions, data.labels(), weights)
}

/// Classifier confidence beta = epsilon / (1 - epsilon).
pub fn beta_of(epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Data(format!("epsilon must be in [0, 1), got {epsilon}")));
    }
    Ok(epsilon / (1.0 - epsilon))
}

/// Relative per-sample losses of a program on a dataset: residuals
/// |clamp01(h(x)) - y| divided by the largest residual (all zero when
/// every prediction is exact), averaged under the normalized weights.
pub fn round_loss(h: &Program, data: &Dataset, weights: &[f64]) -> RoundLoss {
    assert_eq!(weights.len(), data.n_rows());
    let residuals: Vec<f64> = data
        .rows()
        .iter()
        .zip(data.labels())
        .map(|(x, y)| (clamp01(h.eval(x)) - y.target()).abs())
        .collect();
    let max = residuals.iter().cloned().fold(0.0, f64::max);
    let per_sample: Vec<f64> = if max == 0.0 {
        vec![0.0; residuals.len()]
    } else {
        residuals.iter().map(|r| r / max).collect()
    };
    let total_w: f64 = weights.iter().sum();
    let mean = per_sample
        .iter()
        .zip(weights)
        .map(|(l, w)| l * w / total_w)
        .sum();
    RoundLoss { per_sample, mean }
}

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn renormalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
}

/// Classic AdaBoost.M1 over decision stumps. Each round fits the stump
/// minimizing weighted error, records beta = eps/(1 - eps), multiplies
/// the weight of every correctly classified sample by beta and
/// renormalizes. Rounds with eps >= 0.5 are discarded (weights reset to
/// uniform, one retry, then stop); eps = 0 records the round and stops.
pub fn adaboost_m1_train(train: &Dataset, rounds: usize, _seed: u64) -> Result<BoostedModel> {
    if rounds == 0 {
        return Err(Error::Config("boosting needs rounds >= 1".into()));
    }
    if !train.has_both_classes() {
        return Err(Error::Data("boosting needs both classes present".into()));
    }
    let n = train.n_rows();
    let mut weights = uniform_weights(n);
    let mut hypotheses = Vec::new();
    let mut just_reset = false;
    while hypotheses.len() < rounds {
        let stump = Stump::fit(train, &weights)?;
        let predictions: Vec<Label> = train.rows().iter().map(|r| stump.predict(r)).collect();
        let epsilon = weighted_error_from_labels(&predictions, train.labels(), &weights);
        if epsilon >= 0.5 {
            if just_reset {
                break;
            }
            weights = uniform_weights(n);
            just_reset = true;
            continue;
        }
        just_reset = false;
        let beta = beta_of(epsilon)?;
        hypotheses.push(WeakHypothesis {
            model: WeakModel::Stump(stump),
            epsilon,
            beta,
            round: hypotheses.len() + 1,
        });
        if epsilon == 0.0 {
            break;
        }
        for (i, p) in predictions.iter().enumerate() {
            if *p == train.label(i) {
                weights[i] *= beta;
            }
        }
        renormalize(&mut weights);
    }
    if hypotheses.is_empty() {
        return Err(Error::Data(
            "no stump reached error < 0.5; training produced no usable round".into(),
        ));
    }
    Ok(BoostedModel {
        hypotheses,
        decision_threshold: 0.5,
    })
}

fn vote_mass(beta: f64) -> f64 {
    (1.0 / beta.max(BETA_FLOOR)).ln()
}

/// Betas outside (0, 1) carry non-positive or unbounded vote mass and are
/// excluded from combination; beta = 0 rounds are kept aside as the
/// fallback (they are perfect on their training set).
fn usable_hypotheses(m: &BoostedModel) -> Vec<&WeakHypothesis> {
    m.hypotheses
        .iter()
        .filter(|h| h.beta > 0.0 && h.beta < 1.0)
        .collect()
}

fn fallback_hypothesis(m: &BoostedModel) -> &WeakHypothesis {
    m.hypotheses
        .iter()
        .min_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.round.cmp(&b.round)))
        .expect("boosted model has at least one hypothesis")
}

/// Label-vote prediction: every usable hypothesis adds log(1/beta) mass
/// to its predicted label; ties go to the positive (minority) label.
pub fn adaboost_predict(m: &BoostedModel, x: &[f64]) -> Label {
    if adaboost_score(m, x) >= 0.5 {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Fraction of total vote mass on the positive label.
pub fn adaboost_score(m: &BoostedModel, x: &[f64]) -> f64 {
    let mut hyps: Vec<&WeakHypothesis> = m.hypotheses.iter().filter(|h| h.beta < 1.0).collect();
    if hyps.is_empty() {
        hyps.push(&m.hypotheses[0]);
    }
    let mut pos = 0.0;
    let mut total = 0.0;
    for h in hyps {
        let mass = vote_mass(h.beta);
        total += mass;
        if h.model.predict(x, m.decision_threshold) == Label::Positive {
            pos += mass;
        }
    }
    if total == 0.0 {
        return 0.5;
    }
    pos / total
}

/// Confidence-weighted median: sort hypothesis outputs, return the
/// smallest output whose cumulative log(1/beta) mass over all outputs
/// less than or equal to it reaches half the total mass. When no
/// hypothesis has beta in (0, 1), the single smallest-error hypothesis
/// answers alone.
pub fn weighted_median_predict(m: &BoostedModel, x: &[f64]) -> (f64, Label) {
    assert!(!m.hypotheses.is_empty(), "model has no hypotheses");
    let usable = usable_hypotheses(m);
    let score = if usable.is_empty() {
        fallback_hypothesis(m).model.score(x)
    } else {
        let mut outputs: Vec<(f64, f64)> = usable
            .iter()
            .map(|h| (h.model.score(x), vote_mass(h.beta)))
            .collect();
        outputs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let half = 0.5 * outputs.iter().map(|(_, m)| m).sum::<f64>();
        let mut cum = 0.0;
        let mut i = 0;
        let mut chosen = outputs[outputs.len() - 1].0;
        while i < outputs.len() {
            let v = outputs[i].0;
            while i < outputs.len() && outputs[i].0 == v {
                cum += outputs[i].1;
                i += 1;
            }
            if cum >= half {
                chosen = v;
                break;
            }
        }
        chosen
    };
    let label = if score >= m.decision_threshold {
        Label::Positive
    } else {
        Label::Negative
    };
    (score, label)
}

/// Step-8 style update: w_i *= beta^(1 - L_i), so samples with the
/// largest relative loss keep their weight while well-predicted samples
/// shrink (beta < 1).
fn update_weights(weights: &mut [f64], losses: &[f64], beta: f64) {
    for (w, l) in weights.iter_mut().zip(losses) {
        *w *= beta.powf(1.0 - l);
    }
}

/// Boosting with GP-evolved weak hypotheses.
///
/// Round t draws a size-N bootstrap of the training set with probability
/// proportional to the current weights, evolves a program on it, scores
/// the program's relative losses on the full training set, records
/// beta = mean/(1 - mean) and updates weights. Rounds with mean loss
/// >= 0.5 are skipped (weights reset to uniform, one retry, then stop);
/// a round with mean loss 0 is recorded and training stops.
pub fn gpboost_train(train: &Dataset, rounds: usize, gp_cfg: &GpConfig, seed: u64) -> Result<BoostedModel> {
    if rounds == 0 {
        return Err(Error::Config("boosting needs rounds >= 1".into()));
    }
    if !train.has_both_classes() {
        return Err(Error::Data("boosting needs both classes present".into()));
    }
    let n = train.n_rows();
    let mut weights = uniform_weights(n);
    let mut hypotheses = Vec::new();
    let mut attempt: u64 = 0;
    let mut just_reset = false;
    while hypotheses.len() < rounds {
        attempt += 1;
        let sample = train.bootstrap(n, Some(&weights), rng::derive(seed, "boost-sample", attempt))?;
        let cases: Vec<FitnessCase> = sample
            .rows()
            .iter()
            .zip(sample.labels())
            .map(|(x, y)| FitnessCase {
                input: x.clone(),
                target: y.target(),
                weight: 1.0,
            })
            .collect();
        let gp_seed = rng::derive(seed, "boost-gp", attempt);
        let result = gp::run_gp(&cases, &gp_cfg.with_seed(gp_seed))?;
        let loss = round_loss(&result.best, train, &weights);
        if loss.mean >= 0.5 {
            if just_reset {
                break;
            }
            weights = uniform_weights(n);
            just_reset = true;
            continue;
        }
        just_reset = false;
        let beta = beta_of(loss.mean)?;
        hypotheses.push(WeakHypothesis {
            model: WeakModel::Program(result.best),
            epsilon: loss.mean,
            beta,
            round: hypotheses.len() + 1,
        });
        if loss.mean == 0.0 {
            break;
        }
        update_weights(&mut weights, &loss.per_sample, beta);
        renormalize(&mut weights);
    }
    if hypotheses.is_empty() {
        return Err(Error::Data(
            "no evolved hypothesis reached mean loss < 0.5; training produced no usable round".into(),
        ));
    }
    Ok(BoostedModel {
        hypotheses,
        decision_threshold: 0.5,
    })
}

impl BoostedModel {
    /// Structured text persistence; floats keep their shortest exact form
    /// so a round trip is bit-identical.
    pub fn to_text(&self) -> String {
        let mut out = String::from("gpbag-model v1\n");
        out.push_str(&format!("threshold {}\n", self.decision_threshold));
        out.push_str(&format!("rounds {}\n", self.hypotheses.len()));
        for h in &self.hypotheses {
            out.push_str(&format!("round {} epsilon {} beta {}\n", h.round, h.epsilon, h.beta));
            out.push_str(&h.model.to_text());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BoostedModel> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != "gpbag-model v1" {
            return Err(Error::Model(format!("unknown model header '{header}'")));
        }
        let threshold_line = lines
            .next()
            .ok_or_else(|| Error::Model("missing threshold line".into()))?;
        let decision_threshold: f64 = threshold_line
            .strip_prefix("threshold ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Model(format!("bad threshold line '{threshold_line}'")))?;
        let rounds_line = lines
            .next()
            .ok_or_else(|| Error::Model("missing rounds line".into()))?;
        let rounds: usize = rounds_line
            .strip_prefix("rounds ")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Model(format!("bad rounds line '{rounds_line}'")))?;
        let mut hypotheses = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let meta = lines
                .next()
                .ok_or_else(|| Error::Model("missing round line".into()))?;
            let parts: Vec<&str> = meta.split_whitespace().collect();
            if parts.len() != 6 || parts[0] != "round" || parts[2] != "epsilon" || parts[4] != "beta" {
                return Err(Error::Model(format!("bad round line '{meta}'")));
            }
            let round: usize = parts[1]
                .parse()
                .map_err(|_| Error::Model(format!("bad round index '{}'", parts[1])))?;
            let epsilon: f64 = parts[3]
                .parse()
                .map_err(|_| Error::Model(format!("bad epsilon '{}'", parts[3])))?;
            let beta: f64 = parts[5]
                .parse()
                .map_err(|_| Error::Model(format!("bad beta '{}'", parts[5])))?;
            let model_line = lines
                .next()
                .ok_or_else(|| Error::Model("missing model line".into()))?;
            hypotheses.push(WeakHypothesis {
                model: WeakModel::parse(model_line)?,
                epsilon,
                beta,
                round,
            });
        }
        if hypotheses.is_empty() {
            return Err(Error::Model("model holds no hypotheses".into()));
        }
        Ok(BoostedModel {
            hypotheses,
            decision_threshold,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ColumnKind;
    use crate::gp::Node;

    fn mk(rows: Vec<(Vec<f64>, Label)>) -> Dataset {
        let kinds = vec![ColumnKind::Real; rows[0].0.len()];
        let (features, labels): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        Dataset::from_rows("fixture", features, labels, kinds).unwrap()
    }

    fn quick_gp(seed: u64) -> GpConfig {
        GpConfig {
            population_size: 40,
            generations: 6,
            subpopulations: 4,
            seed,
            ..GpConfig::default()
        }
    }

    #[test]
    fn weighted_error_all_correct_is_zero() {
        let preds = vec![Label::Positive, Label::Negative];
        let truth = preds.clone();
        assert_eq!(weighted_error_from_labels(&preds, &truth, &[0.5, 0.5]), 0.0);
    }

    #[test]
    fn weighted_error_uniform_one_wrong() {
        let preds = vec![Label::Positive, Label::Positive, Label::Negative, Label::Negative];
        let truth = vec![Label::Negative, Label::Positive, Label::Negative, Label::Negative];
        let e = weighted_error_from_labels(&preds, &truth, &[0.25; 4]);
        assert_eq!(e, 0.25);
    }

    #[test]
    fn weighted_error_respects_weights() {
        let preds = vec![Label::Positive, Label::Positive, Label::Negative, Label::Negative];
        let truth = vec![Label::Negative, Label::Positive, Label::Negative, Label::Negative];
        let e = weighted_error_from_labels(&preds, &truth, &[0.7, 0.1, 0.1, 0.1]);
        // Brute force: only sample 0 is wrong, so the error is its weight.
        assert!((e - 0.7).abs() < 1e-15);
    }

    #[test]
    fn beta_of_unit_values() {
        assert_eq!(beta_of(0.25).unwrap(), 1.0 / 3.0);
        assert_eq!(beta_of(0.0).unwrap(), 0.0);
        assert_eq!(beta_of(0.5).unwrap(), 1.0);
        assert!(beta_of(1.0).is_err());
    }

    #[test]
    fn stump_fit_minimizes_weighted_error() {
        let d = mk(vec![
            (vec![0.0], Label::Negative),
            (vec![1.0], Label::Negative),
            (vec![2.0], Label::Positive),
            (vec![3.0], Label::Positive),
        ]);
        let s = Stump::fit(&d, &[0.25; 4]).unwrap();
        assert_eq!(weighted_error(&WeakModel::Stump(s), &d, &[0.25; 4]), 0.0);
    }

    #[test]
    fn adaboost_separable_stops_after_one_perfect_round() {
        let d = mk(vec![
            (vec![0.0], Label::Negative),
            (vec![1.0], Label::Negative),
            (vec![2.0], Label::Positive),
            (vec![3.0], Label::Positive),
        ]);
        let m = adaboost_m1_train(&d, 5, 0).unwrap();
        assert_eq!(m.hypotheses.len(), 1);
        assert_eq!(m.hypotheses[0].epsilon, 0.0);
        assert_eq!(m.hypotheses[0].beta, 0.0);
        for (i, r) in d.rows().iter().enumerate() {
            assert_eq!(adaboost_predict(&m, r), d.label(i));
        }
    }

    #[test]
    fn adaboost_jittered_xor_records_only_good_rounds() {
        let d = mk(vec![
            (vec![0.05, 0.1], Label::Negative),
            (vec![0.02, 0.98], Label::Positive),
            (vec![1.03, 0.04], Label::Positive),
            (vec![0.97, 1.01], Label::Negative),
        ]);
        let m = adaboost_m1_train(&d, 6, 0).unwrap();
        assert!(m.hypotheses.len() > 1);
        for h in &m.hypotheses {
            assert!(h.epsilon < 0.5);
        }
    }

    #[test]
    fn adaboost_single_class_is_error() {
        let d = mk(vec![(vec![0.0], Label::Positive), (vec![1.0], Label::Positive)]);
        assert!(adaboost_m1_train(&d, 3, 0).is_err());
    }

    #[test]
    fn adaboost_predict_single_hypothesis() {
        let m = BoostedModel {
            hypotheses: vec![WeakHypothesis {
                model: WeakModel::Stump(Stump {
                    feature: 0,
                    threshold: 0.5,
                    positive_above: true,
                }),
                epsilon: 0.2,
                beta: 0.25,
                round: 1,
            }],
            decision_threshold: 0.5,
        };
        assert_eq!(adaboost_predict(&m, &[1.0]), Label::Positive);
        assert_eq!(adaboost_predict(&m, &[0.0]), Label::Negative);
    }

    #[test]
    fn adaboost_predict_low_beta_outvotes_high_beta() {
        // Disagreeing stumps: log(1/0.1) > log(1/0.4), so the first wins.
        let m = BoostedModel {
            hypotheses: vec![
                WeakHypothesis {
                    model: WeakModel::Stump(Stump {
                        feature: 0,
                        threshold: 0.5,
                        positive_above: true,
                    }),
                    epsilon: 0.09,
                    beta: 0.1,
                    round: 1,
                },
                WeakHypothesis {
                    model: WeakModel::Stump(Stump {
                        feature: 0,
                        threshold: 0.5,
                        positive_above: false,
                    }),
                    epsilon: 0.28,
                    beta: 0.4,
                    round: 2,
                },
            ],
            decision_threshold: 0.5,
        };
        assert_eq!(adaboost_predict(&m, &[1.0]), Label::Positive);
        assert_eq!(adaboost_predict(&m, &[0.0]), Label::Negative);
    }

    #[test]
    fn round_loss_matches_hand_computation() {
        // Predictions (0.2, 0.9) against targets (0, 1): residuals
        // (0.2, 0.1), max 0.2, losses (1.0, 0.5), uniform mean 0.75.
        let d = mk(vec![(vec![0.2], Label::Negative), (vec![0.9], Label::Positive)]);
        let identity = Program::new(Node::Feature(0));
        let loss = round_loss(&identity, &d, &[0.5, 0.5]);
        assert_eq!(loss.per_sample[0], 1.0);
        assert!((loss.per_sample[1] - 0.5).abs() < 1e-15);
        assert!((loss.mean - 0.75).abs() < 1e-15);
    }

    #[test]
    fn round_loss_perfect_predictions_are_zero() {
        let d = mk(vec![(vec![0.0], Label::Negative), (vec![1.0], Label::Positive)]);
        let identity = Program::new(Node::Feature(0));
        let loss = round_loss(&identity, &d, &[0.5, 0.5]);
        assert_eq!(loss.per_sample, vec![0.0, 0.0]);
        assert_eq!(loss.mean, 0.0);
    }

    #[test]
    fn round_loss_normalizes_to_unit_max() {
        let d = mk(vec![
            (vec![0.3], Label::Negative),
            (vec![0.8], Label::Positive),
            (vec![0.5], Label::Negative),
        ]);
        let identity = Program::new(Node::Feature(0));
        let loss = round_loss(&identity, &d, &[1.0 / 3.0; 3]);
        let max = loss.per_sample.iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        for l in &loss.per_sample {
            assert!((0.0..=1.0).contains(l));
        }
    }

    #[test]
    fn update_weights_raises_relative_weight_of_hard_samples() {
        let mut w = vec![0.5, 0.5];
        update_weights(&mut w, &[1.0, 0.0], 0.25);
        // L = 1 keeps its weight (beta^0), L = 0 shrinks by beta.
        assert_eq!(w[0], 0.5);
        assert_eq!(w[1], 0.125);
        assert!(w[0] / w[1] > 1.0);
    }

    #[test]
    fn weighted_median_equal_betas_is_plain_median() {
        let hyp = |c: f64, round| WeakHypothesis {
            model: WeakModel::Program(Program::new(Node::Const(c))),
            epsilon: 0.25,
            beta: 1.0 / 3.0,
            round,
        };
        let m = BoostedModel {
            hypotheses: vec![hyp(0.0, 1), hyp(1.0, 2), hyp(1.0, 3)],
            decision_threshold: 0.5,
        };
        let (score, label) = weighted_median_predict(&m, &[0.0]);
        assert_eq!(score, 1.0);
        assert_eq!(label, Label::Positive);
    }

    #[test]
    fn weighted_median_single_hypothesis_is_verbatim() {
        let m = BoostedModel {
            hypotheses: vec![WeakHypothesis {
                model: WeakModel::Program(Program::new(Node::Const(0.37))),
                epsilon: 0.1,
                beta: 0.1 / 0.9,
                round: 1,
            }],
            decision_threshold: 0.5,
        };
        let (score, label) = weighted_median_predict(&m, &[]);
        assert_eq!(score, 0.37);
        assert_eq!(label, Label::Negative);
    }

    #[test]
    fn weighted_median_cumulative_condition_by_hand() {
        // Outputs (0.2, 0.8) with masses (3, 1): the first output already
        // holds 3 >= 2 = half of 4, so the score is 0.2 -> negative.
        let hyp = |c: f64, mass: f64, round| WeakHypothesis {
            model: WeakModel::Program(Program::new(Node::Const(c))),
            epsilon: 0.0,
            beta: (-mass).exp(),
            round,
        };
        let m = BoostedModel {
            hypotheses: vec![hyp(0.2, 3.0, 1), hyp(0.8, 1.0, 2)],
            decision_threshold: 0.5,
        };
        let (score, label) = weighted_median_predict(&m, &[]);
        assert_eq!(score, 0.2);
        assert_eq!(label, Label::Negative);
    }

    #[test]
    fn weighted_median_falls_back_to_best_round() {
        let m = BoostedModel {
            hypotheses: vec![WeakHypothesis {
                model: WeakModel::Program(Program::new(Node::Const(0.9))),
                epsilon: 0.0,
                beta: 0.0,
                round: 1,
            }],
            decision_threshold: 0.5,
        };
        let (score, label) = weighted_median_predict(&m, &[]);
        assert_eq!(score, 0.9);
        assert_eq!(label, Label::Positive);
    }

    #[test]
    fn weighted_median_matches_prefix_scan_oracle() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(31);
        for _ in 0..1000 {
            let count = rng.random_range(1..=12);
            let hyps: Vec<WeakHypothesis> = (0..count)
                .map(|i| {
                    let raw: f64 = rng.random();
                    // Force ties at the clamp boundaries now and then.
                    let out = if rng.random::<f64>() < 0.2 { raw.round() } else { raw };
                    let beta: f64 = rng.random_range(0.01..0.99);
                    WeakHypothesis {
                        model: WeakModel::Program(Program::new(Node::Const(out))),
                        epsilon: beta / (1.0 + beta),
                        beta,
                        round: i + 1,
                    }
                })
                .collect();
            let m = BoostedModel {
                hypotheses: hyps,
                decision_threshold: 0.5,
            };
            let (got, _) = weighted_median_predict(&m, &[]);

            // Oracle: for every candidate output, rescan the full set and
            // take the smallest satisfying the cumulative condition.
            let outputs: Vec<(f64, f64)> = m
                .hypotheses
                .iter()
                .map(|h| (h.model.score(&[]), vote_mass(h.beta)))
                .collect();
            let half = 0.5 * outputs.iter().map(|(_, m)| m).sum::<f64>();
            let mut candidates: Vec<f64> = outputs.iter().map(|(v, _)| *v).collect();
            candidates.sort_by(f64::total_cmp);
            let mut expected = candidates[candidates.len() - 1];
            for &c in &candidates {
                let mass: f64 = outputs.iter().filter(|(v, _)| *v <= c).map(|(_, m)| m).sum();
                if mass >= half {
                    expected = c;
                    break;
                }
            }
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn gpboost_single_round_is_thresholded_hypothesis() {
        let d = mk(vec![
            (vec![0.0, 0.3], Label::Negative),
            (vec![0.1, 0.2], Label::Negative),
            (vec![0.9, 0.8], Label::Positive),
            (vec![1.0, 0.7], Label::Positive),
        ]);
        let m = gpboost_train(&d, 1, &quick_gp(3), 17).unwrap();
        assert_eq!(m.hypotheses.len(), 1);
        for r in d.rows() {
            let (score, label) = weighted_median_predict(&m, r);
            assert_eq!(score, m.hypotheses[0].model.score(r));
            assert_eq!(label == Label::Positive, score >= 0.5);
        }
    }

    #[test]
    fn gpboost_recorded_rounds_have_low_loss() {
        let d = mk(vec![
            (vec![0.1, 0.9], Label::Negative),
            (vec![0.4, 0.6], Label::Negative),
            (vec![0.2, 0.3], Label::Negative),
            (vec![0.8, 0.9], Label::Positive),
            (vec![0.7, 0.6], Label::Positive),
            (vec![0.9, 0.5], Label::Positive),
        ]);
        let m = gpboost_train(&d, 5, &quick_gp(5), 23).unwrap();
        for (i, h) in m.hypotheses.iter().enumerate() {
            if i + 1 < m.hypotheses.len() {
                assert!(h.epsilon < 0.5 && h.epsilon > 0.0);
            } else {
                assert!(h.epsilon < 0.5);
            }
            assert_eq!(h.round, i + 1);
        }
    }

    #[test]
    fn gpboost_more_rounds_do_not_hurt_training_accuracy() {
        let mut rows = Vec::new();
        for i in 0..10 {
            let v = i as f64 / 10.0;
            rows.push((vec![v, v * 0.5], Label::Negative));
            rows.push((vec![v + 1.5, v * 0.5 + 1.0], Label::Positive));
        }
        let d = mk(rows);
        for seed in 0..5u64 {
            let single = gpboost_train(&d, 1, &quick_gp(seed), seed).unwrap();
            let multi = gpboost_train(&d, 10, &quick_gp(seed), seed).unwrap();
            let acc = |m: &BoostedModel| {
                d.rows()
                    .iter()
                    .zip(d.labels())
                    .filter(|(r, y)| weighted_median_predict(m, r).1 == **y)
                    .count()
            };
            assert!(acc(&multi) >= acc(&single), "seed {seed}");
        }
    }

    #[test]
    fn gpboost_is_deterministic() {
        let d = mk(vec![
            (vec![0.0, 0.5], Label::Negative),
            (vec![0.2, 0.1], Label::Negative),
            (vec![0.8, 0.9], Label::Positive),
            (vec![0.9, 0.6], Label::Positive),
        ]);
        let a = gpboost_train(&d, 3, &quick_gp(9), 41).unwrap();
        let b = gpboost_train(&d, 3, &quick_gp(9), 41).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn model_text_round_trip_is_exact() {
        let d = mk(vec![
            (vec![0.0, 0.5], Label::Negative),
            (vec![0.2, 0.1], Label::Negative),
            (vec![0.8, 0.9], Label::Positive),
            (vec![0.9, 0.6], Label::Positive),
        ]);
        let m = gpboost_train(&d, 3, &quick_gp(2), 51).unwrap();
        let text = m.to_text();
        let back = BoostedModel::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);

        let stump_model = BoostedModel {
            hypotheses: vec![WeakHypothesis {
                model: WeakModel::Stump(Stump {
                    feature: 3,
                    threshold: 0.123456789,
                    positive_above: false,
                }),
                epsilon: 1.0 / 3.0,
                beta: 0.5,
                round: 1,
            }],
            decision_threshold: 0.5,
        };
        let text = stump_model.to_text();
        assert_eq!(BoostedModel::from_text(&text).unwrap(), stump_model);
    }

    #[test]
    fn model_text_rejects_corruption() {
        assert!(BoostedModel::from_text("not a model").is_err());
        assert!(BoostedModel::from_text("gpbag-model v1\nthreshold 0.5\nrounds 1\n").is_err());
    }
}
