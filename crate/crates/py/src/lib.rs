//! Python bindings for the gpbag library: dataset handling, ensemble
//! training, prediction, evaluation and model persistence.

use std::path::Path;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gpbag::dataset::{self, ColumnKind, ColumnSelector, Label, SplitSpec};
use gpbag::ensemble;
use gpbag::evaluation;
use gpbag::gp::GpConfig;
use gpbag::resampling::{Oversampler, ResamplingPlan, Undersampler};
use gpbag::synth;

fn err(e: gpbag::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn label_to_int(l: Label) -> i64 {
    match l {
        Label::Positive => 1,
        Label::Negative => 0,
    }
}

/// Two-class tabular dataset; labels are 1 (positive/minority) and 0.
#[pyclass(frozen)]
pub struct Dataset {
    inner: dataset::Dataset,
}

#[pymethods]
impl Dataset {
    /// Load a CSV with a header row; rows whose label cell equals
    /// `positive_label` become positive.
    #[staticmethod]
    #[pyo3(signature = (path, label_column = "label", positive_label = "1"))]
    fn load_csv(path: &str, label_column: &str, positive_label: &str) -> PyResult<Self> {
        let d = dataset::load_csv(
            Path::new(path),
            &ColumnSelector::parse(label_column),
            positive_label,
        )
        .map_err(err)?;
        Ok(Dataset { inner: d })
    }

    /// Build a dataset from rows and 0/1 labels.
    #[staticmethod]
    #[pyo3(signature = (features, labels, name = "dataset"))]
    fn from_rows(features: Vec<Vec<f64>>, labels: Vec<i64>, name: &str) -> PyResult<Self> {
        let n_features = features.first().map(Vec::len).unwrap_or(0);
        let labels = labels
            .into_iter()
            .map(|v| match v {
                1 => Ok(Label::Positive),
                0 => Ok(Label::Negative),
                other => Err(PyValueError::new_err(format!(
                    "labels must be 0 or 1, got {other}"
                ))),
            })
            .collect::<PyResult<Vec<Label>>>()?;
        let d = dataset::Dataset::from_rows(
            name,
            features,
            labels,
            vec![ColumnKind::Real; n_features],
        )
        .map_err(err)?;
        Ok(Dataset { inner: d })
    }

    /// Synthetic two-blob imbalanced dataset for experiments.
    #[staticmethod]
    #[pyo3(signature = (n_positive, n_negative, n_features = 4, separation = 2.0, seed = 0))]
    fn gaussian(
        n_positive: usize,
        n_negative: usize,
        n_features: usize,
        separation: f64,
        seed: u64,
    ) -> Self {
        Dataset {
            inner: synth::gaussian_imbalanced(n_positive, n_negative, n_features, separation, seed),
        }
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn labels(&self) -> Vec<i64> {
        self.inner.labels().iter().map(|l| label_to_int(*l)).collect()
    }

    fn row(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.n_rows() {
            return Err(PyValueError::new_err(format!("row {i} out of range")));
        }
        Ok(self.inner.row(i).to_vec())
    }

    /// Totals, minority share and the majority/minority imbalance ratio.
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = self.inner.summarize().map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("total", s.total)?;
        d.set_item("minority_count", s.minority_count)?;
        d.set_item("minority_fraction", s.minority_fraction)?;
        d.set_item("imbalance_ratio", s.imbalance_ratio)?;
        d.set_item("feature_count", s.feature_count)?;
        Ok(d)
    }

    /// Stratified train/test split, deterministic given the seed.
    #[pyo3(signature = (train_fraction, seed, stratified = true))]
    fn split(&self, train_fraction: f64, seed: u64, stratified: bool) -> PyResult<(Dataset, Dataset)> {
        let spec = SplitSpec {
            train_fraction,
            stratified,
            seed,
        };
        let (train, test) = self.inner.stratified_split(&spec).map_err(err)?;
        Ok((Dataset { inner: train }, Dataset { inner: test }))
    }

    /// Split into (positives, negatives), row order preserved.
    fn partition(&self) -> PyResult<(Dataset, Dataset)> {
        let (pos, neg) = self.inner.class_partition().map_err(err)?;
        Ok((Dataset { inner: pos }, Dataset { inner: neg }))
    }

    /// Copy with labels flipped if positives outnumber negatives, so the
    /// minority class is positive. Returns (dataset, flipped).
    fn canonicalized(&self) -> (Dataset, bool) {
        let mut d = self.inner.clone();
        let flipped = d.canonicalize_labels();
        (Dataset { inner: d }, flipped)
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(name='{}', rows={}, features={}, positives={})",
            self.inner.name(),
            self.inner.n_rows(),
            self.inner.n_features(),
            self.inner.positive_count()
        )
    }
}

/// Training configuration; defaults follow the reference parameter set.
#[pyclass(skip_from_py_object)]
#[derive(Clone)]
pub struct EnsembleConfig {
    inner: ensemble::EnsembleConfig,
}

#[pymethods]
impl EnsembleConfig {
    #[new]
    #[pyo3(signature = (
        bag_count = 40,
        boost_rounds = 10,
        population_size = 200,
        generations = 30,
        subpopulations = 40,
        islands = true,
        tournament_k = 6,
        oversampler = "smote",
        undersampler = "random",
        target_ratio = 1.0,
        smote_k = 5,
        ncl_k = 3,
        vote = "majority",
        seed = 42,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        bag_count: usize,
        boost_rounds: usize,
        population_size: usize,
        generations: usize,
        subpopulations: usize,
        islands: bool,
        tournament_k: usize,
        oversampler: &str,
        undersampler: &str,
        target_ratio: f64,
        smote_k: usize,
        ncl_k: usize,
        vote: &str,
        seed: u64,
    ) -> PyResult<Self> {
        let oversampler = match oversampler {
            "none" => Oversampler::None,
            "random" => Oversampler::Random,
            "smote" => Oversampler::Smote,
            other => {
                return Err(PyValueError::new_err(format!(
                    "oversampler must be none|random|smote, got '{other}'"
                )))
            }
        };
        let undersampler = match undersampler {
            "none" => Undersampler::None,
            "random" => Undersampler::Random,
            "ncl" => Undersampler::Ncl,
            other => {
                return Err(PyValueError::new_err(format!(
                    "undersampler must be none|random|ncl, got '{other}'"
                )))
            }
        };
        let vote = match vote {
            "majority" => ensemble::VoteRule::MajorityLabel,
            "mean_score" => ensemble::VoteRule::MeanScore,
            other => {
                return Err(PyValueError::new_err(format!(
                    "vote must be majority|mean_score, got '{other}'"
                )))
            }
        };
        let cfg = ensemble::EnsembleConfig {
            bag_count,
            boost_rounds,
            plan: ResamplingPlan {
                oversampler,
                undersampler,
                target_ratio,
                smote_k,
                ncl_k,
                ..ResamplingPlan::default()
            },
            gp: GpConfig {
                population_size,
                generations,
                subpopulations,
                islands,
                tournament_k,
                ..GpConfig::default()
            },
            vote,
            seed,
            ..ensemble::EnsembleConfig::default()
        };
        cfg.validate().map_err(err)?;
        Ok(EnsembleConfig { inner: cfg })
    }

    /// Reduced desk-scale budget (NOT the reference configuration).
    #[staticmethod]
    #[pyo3(signature = (seed = 42))]
    fn quick(seed: u64) -> PyResult<Self> {
        EnsembleConfig::new(
            10, 10, 100, 10, 40, true, 6, "smote", "random", 1.0, 5, 3, "majority", seed,
        )
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn __repr__(&self) -> String {
        format!(
            "EnsembleConfig(bag_count={}, boost_rounds={}, population_size={}, generations={}, seed={})",
            self.inner.bag_count,
            self.inner.boost_rounds,
            self.inner.gp.population_size,
            self.inner.gp.generations,
            self.inner.seed
        )
    }
}

/// A trained ensemble of boosted GP models.
#[pyclass(frozen)]
pub struct EnsembleModel {
    inner: ensemble::EnsembleModel,
}

#[pymethods]
impl EnsembleModel {
    /// Vote score in [0, 1] and the 0/1 label for one feature vector.
    fn predict(&self, x: Vec<f64>) -> PyResult<(f64, i64)> {
        let (score, label) = ensemble::predict(&self.inner, &x).map_err(err)?;
        Ok((score, label_to_int(label)))
    }

    fn predict_batch(&self, data: &Dataset) -> PyResult<Vec<(f64, i64)>> {
        let out = ensemble::predict_batch(&self.inner, &data.inner).map_err(err)?;
        Ok(out.into_iter().map(|(s, l)| (s, label_to_int(l))).collect())
    }

    /// Persist to a directory of member model files plus a manifest.
    fn save(&self, dir: &str) -> PyResult<()> {
        self.inner.save(Path::new(dir)).map_err(err)
    }

    #[staticmethod]
    fn load(dir: &str) -> PyResult<Self> {
        Ok(EnsembleModel {
            inner: ensemble::EnsembleModel::load(Path::new(dir)).map_err(err)?,
        })
    }

    #[getter]
    fn member_count(&self) -> usize {
        self.inner.members.len()
    }

    #[getter]
    fn feature_count(&self) -> usize {
        self.inner.feature_count
    }

    fn __repr__(&self) -> String {
        format!(
            "EnsembleModel(members={}, feature_count={})",
            self.inner.members.len(),
            self.inner.feature_count
        )
    }
}

/// Train one boosted GP model per balanced bag.
#[pyfunction]
fn train_ensemble(data: &Dataset, config: &EnsembleConfig) -> PyResult<EnsembleModel> {
    Ok(EnsembleModel {
        inner: ensemble::train_ensemble(&data.inner, &config.inner).map_err(err)?,
    })
}

/// Evaluate a model: confusion counts, per-class accuracy and AUC.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, model: &EnsembleModel, data: &Dataset) -> PyResult<Bound<'py, PyDict>> {
    let r = evaluation::evaluate(&model.inner, &data.inner).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("tp", r.confusion.true_positives)?;
    d.set_item("fn", r.confusion.false_negatives)?;
    d.set_item("fp", r.confusion.false_positives)?;
    d.set_item("tn", r.confusion.true_negatives)?;
    d.set_item("minority_accuracy", r.minority_accuracy)?;
    d.set_item("majority_accuracy", r.majority_accuracy)?;
    d.set_item("overall_accuracy", r.overall_accuracy)?;
    d.set_item("auc", r.auc)?;
    d.set_item("error_count", r.error_count)?;
    Ok(d)
}

/// Rank-based AUC of scores against 0/1 labels, ties counting half.
#[pyfunction]
fn auc(scores: Vec<f64>, labels: Vec<i64>) -> PyResult<f64> {
    let truth: Vec<Label> = labels
        .into_iter()
        .map(|v| if v == 1 { Label::Positive } else { Label::Negative })
        .collect();
    evaluation::auc(&scores, &truth).map_err(err)
}

#[pymodule]
fn gpbag_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<EnsembleConfig>()?;
    m.add_class::<EnsembleModel>()?;
    m.add_function(wrap_pyfunction!(train_ensemble, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(auc, m)?)?;
    Ok(())
}
