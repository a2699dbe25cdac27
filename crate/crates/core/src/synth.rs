//! Synthetic imbalanced datasets for demos and smoke tests.

use rand::Rng;

use crate::dataset::{ColumnKind, Dataset, Label};
use crate::rng;

/// Two Gaussian blobs: positives centered at `separation` on every axis,
/// negatives at the origin, unit variance.
pub fn gaussian_imbalanced(
    n_positive: usize,
    n_negative: usize,
    n_features: usize,
    separation: f64,
    seed: u64,
) -> Dataset {
    assert!(n_features >= 1);
    let mut rng = rng::sub_rng(seed, "synth", 0);
    let mut normal = move || {
        // Box-Muller transform.
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let mut features = Vec::with_capacity(n_positive + n_negative);
    let mut labels = Vec::with_capacity(n_positive + n_negative);
    for _ in 0..n_positive {
        features.push((0..n_features).map(|_| separation + normal()).collect());
        labels.push(Label::Positive);
    }
    for _ in 0..n_negative {
        features.push((0..n_features).map(|_| normal()).collect());
        labels.push(Label::Negative);
    }
    Dataset::from_rows(
        "synthetic-gaussian",
        features,
        labels,
        vec![ColumnKind::Real; n_features],
    )
    .expect("generated rows are well-formed")
}
