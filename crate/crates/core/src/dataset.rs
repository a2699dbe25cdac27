//! Two-class tabular datasets: loading, validation, summaries, splits
//! and index-level resampling.

use std::fmt;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Class label. The minority class is the positive one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    /// Numeric target used by the learners: positive -> 1.0, negative -> 0.0.
    pub fn target(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => 0.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Positive => write!(f, "positive"),
            Label::Negative => write!(f, "negative"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Real,
    Integer,
}

/// Label column selector: by header name or zero-based index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Name(String),
    Index(usize),
}

impl ColumnSelector {
    /// Numeric strings select by index, anything else by name.
    pub fn parse(s: &str) -> ColumnSelector {
        match s.trim().parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.trim().to_string()),
        }
    }
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Name(n) => write!(f, "{n}"),
            ColumnSelector::Index(i) => write!(f, "{i}"),
        }
    }
}

/// Immutable feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Vec<Vec<f64>>,
    labels: Vec<Label>,
    column_kinds: Vec<ColumnKind>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSummary {
    pub total: usize,
    pub minority_count: usize,
    pub minority_fraction: f64,
    pub imbalance_ratio: f64,
    pub feature_count: usize,
}

/// Train/test split request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> SplitSpec {
        SplitSpec {
            train_fraction,
            stratified: true,
            seed,
        }
    }
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

impl Dataset {
    /// Build a dataset from rows. Row lengths must match `column_kinds`.
    pub fn from_rows(
        name: impl Into<String>,
        features: Vec<Vec<f64>>,
        labels: Vec<Label>,
        column_kinds: Vec<ColumnKind>,
    ) -> Result<Dataset> {
        if features.len() != labels.len() {
            return Err(Error::Data(format!(
                "feature rows ({}) and labels ({}) differ in length",
                features.len(),
                labels.len()
            )));
        }
        if column_kinds.is_empty() {
            return Err(Error::Data("dataset needs at least one feature column".into()));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != column_kinds.len() {
                return Err(Error::Data(format!(
                    "row {} has {} values, expected {}",
                    i,
                    row.len(),
                    column_kinds.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!(
                    "row {i} column {j} is not a finite number"
                )));
            }
        }
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
            column_kinds,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.column_kinds.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn column_kinds(&self) -> &[ColumnKind] {
        &self.column_kinds
    }

    pub fn positive_count(&self) -> usize {
        self.labels.iter().filter(|l| **l == Label::Positive).count()
    }

    pub fn negative_count(&self) -> usize {
        self.n_rows() - self.positive_count()
    }

    pub fn has_both_classes(&self) -> bool {
        self.positive_count() > 0 && self.negative_count() > 0
    }

    /// New dataset holding the given source rows, in the given order.
    pub fn take_rows(&self, indices: &[usize], name: impl Into<String>) -> Dataset {
        Dataset {
            name: name.into(),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            column_kinds: self.column_kinds.clone(),
        }
    }

    /// Append rows from `other` (same schema).
    pub fn concat(&self, other: &Dataset) -> Result<Dataset> {
        if other.column_kinds != self.column_kinds {
            return Err(Error::Data("cannot concat datasets with different schemas".into()));
        }
        let mut features = self.features.clone();
        features.extend(other.features.iter().cloned());
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        Ok(Dataset {
            name: self.name.clone(),
            features,
            labels,
            column_kinds: self.column_kinds.clone(),
        })
    }

    /// Flip labels if positives outnumber negatives, so the minority class
    /// is always the positive one. Returns whether a flip happened.
    pub fn canonicalize_labels(&mut self) -> bool {
        if self.positive_count() > self.negative_count() {
            for l in &mut self.labels {
                *l = match l {
                    Label::Positive => Label::Negative,
                    Label::Negative => Label::Positive,
                };
            }
            true
        } else {
            false
        }
    }

    pub fn summarize(&self) -> Result<DatasetSummary> {
        let total = self.n_rows();
        if total == 0 {
            return Err(Error::Data("cannot summarize an empty dataset".into()));
        }
        let minority_count = self.positive_count();
        if minority_count == 0 {
            return Err(Error::Data("no minority class".into()));
        }
        let majority = total - minority_count;
        Ok(DatasetSummary {
            total,
            minority_count,
            minority_fraction: minority_count as f64 / total as f64,
            imbalance_ratio: majority as f64 / minority_count as f64,
            feature_count: self.n_features(),
        })
    }

    /// Split into (train, test). Stratified splits keep
    /// `round(train_fraction * class_count)` rows of each class in train,
    /// rounding half up for the positive class so the minority is never
    /// starved; the remainder of the overall train quota goes to the
    /// negative class.
    pub fn stratified_split(&self, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
        if !(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must be in (0, 1], got {}",
                spec.train_fraction
            )));
        }
        let n = self.n_rows();
        if n == 0 {
            return Err(Error::Data("cannot split an empty dataset".into()));
        }
        let mut rng = rng::sub_rng(spec.seed, "split", 0);
        let (train_idx, test_idx) = if spec.stratified {
            if !self.has_both_classes() {
                return Err(Error::Data("stratified split needs both classes present".into()));
            }
            let mut pos: Vec<usize> = (0..n).filter(|&i| self.labels[i] == Label::Positive).collect();
            let mut neg: Vec<usize> = (0..n).filter(|&i| self.labels[i] == Label::Negative).collect();
            let total_train = round_half_up(spec.train_fraction * n as f64);
            let n_pos = round_half_up(spec.train_fraction * pos.len() as f64).min(pos.len());
            let n_neg = total_train.saturating_sub(n_pos).min(neg.len());
            if spec.train_fraction < 1.0 && (n_pos == 0 || n_neg == 0) {
                return Err(Error::Data(format!(
                    "train_fraction {} would leave a class with no training rows",
                    spec.train_fraction
                )));
            }
            pos.shuffle(&mut rng);
            neg.shuffle(&mut rng);
            let mut train: Vec<usize> = pos[..n_pos].to_vec();
            train.extend_from_slice(&neg[..n_neg]);
            let mut test: Vec<usize> = pos[n_pos..].to_vec();
            test.extend_from_slice(&neg[n_neg..]);
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        } else {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(&mut rng);
            let total_train = round_half_up(spec.train_fraction * n as f64).min(n);
            let mut train = all[..total_train].to_vec();
            let mut test = all[total_train..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        };
        Ok((
            self.take_rows(&train_idx, self.name.clone()),
            self.take_rows(&test_idx, self.name.clone()),
        ))
    }

    /// Partition into (positives, negatives), row order preserved.
    pub fn class_partition(&self) -> Result<(Dataset, Dataset)> {
        if !self.has_both_classes() {
            return Err(Error::Data("class partition needs both classes present".into()));
        }
        let pos: Vec<usize> = (0..self.n_rows())
            .filter(|&i| self.labels[i] == Label::Positive)
            .collect();
        let neg: Vec<usize> = (0..self.n_rows())
            .filter(|&i| self.labels[i] == Label::Negative)
            .collect();
        Ok((
            self.take_rows(&pos, self.name.clone()),
            self.take_rows(&neg, self.name.clone()),
        ))
    }

    /// Draw `n` rows with replacement. Uniform when `weights` is `None`,
    /// otherwise row `i` is drawn with probability `w_i / sum(w)`.
    pub fn bootstrap(&self, n: usize, weights: Option<&[f64]>, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Config("bootstrap needs n >= 1".into()));
        }
        if self.n_rows() == 0 {
            return Err(Error::Data("cannot bootstrap an empty dataset".into()));
        }
        let mut rng = rng::sub_rng(seed, "bootstrap", 0);
        let indices: Vec<usize> = match weights {
            None => (0..n).map(|_| rng.random_range(0..self.n_rows())).collect(),
            Some(w) => {
                if w.len() != self.n_rows() {
                    return Err(Error::Data(format!(
                        "weight vector length {} does not match row count {}",
                        w.len(),
                        self.n_rows()
                    )));
                }
                if w.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                    return Err(Error::Data("bootstrap weights must be non-negative and finite".into()));
                }
                let dist = WeightedIndex::new(w)
                    .map_err(|_| Error::Data("bootstrap weights must have a positive sum".into()))?;
                (0..n).map(|_| dist.sample(&mut rng)).collect()
            }
        };
        Ok(self.take_rows(&indices, self.name.clone()))
    }
}

/// Load a two-class dataset from a CSV file with a header row.
///
/// Rows whose label cell equals `positive_label` become positive, all
/// others negative. Every non-label cell must parse as a number. Column
/// kinds are inferred: a column whose values are all integral is tagged
/// integer, anything else real.
pub fn load_csv(path: &Path, label_column: &ColumnSelector, positive_label: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::Data(e.to_string()),
        })?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: cannot read header row: {e}", path.display())))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }

    let label_idx = match label_column {
        ColumnSelector::Index(i) => {
            if *i >= headers.len() {
                return Err(Error::Data(format!(
                    "{}: label column index {} out of range (file has {} columns)",
                    path.display(),
                    i,
                    headers.len()
                )));
            }
            *i
        }
        ColumnSelector::Name(name) => headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| {
                Error::Data(format!(
                    "{}: label column '{}' not found in header",
                    path.display(),
                    name
                ))
            })?,
    };

    let feature_count = headers.len() - 1;
    if feature_count == 0 {
        return Err(Error::Data(format!(
            "{}: file has no feature columns besides the label",
            path.display()
        )));
    }

    let mut features: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut raw_labels_seen: Vec<String> = Vec::new();
    for (rec_i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        let data_row = rec_i + 2; // 1-based, after the header line
        if record.len() != headers.len() {
            return Err(Error::Parse {
                path: path.into(),
                row: data_row,
                column: "-".into(),
                message: format!("expected {} cells, found {}", headers.len(), record.len()),
            });
        }
        let mut row = Vec::with_capacity(feature_count);
        for (col_i, cell) in record.iter().enumerate() {
            if col_i == label_idx {
                let raw = cell.trim().to_string();
                labels.push(if raw == positive_label {
                    Label::Positive
                } else {
                    Label::Negative
                });
                if !raw_labels_seen.contains(&raw) {
                    raw_labels_seen.push(raw);
                }
            } else {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                    path: path.into(),
                    row: data_row,
                    column: headers[col_i].clone(),
                    message: format!("cannot parse '{}' as a number", cell.trim()),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        path: path.into(),
                        row: data_row,
                        column: headers[col_i].clone(),
                        message: "value is not finite".into(),
                    });
                }
                row.push(v);
            }
        }
        features.push(row);
    }

    if features.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    if raw_labels_seen.len() < 2 {
        return Err(Error::Data(format!(
            "{}: fewer than two distinct labels (saw only '{}')",
            path.display(),
            raw_labels_seen.first().map(String::as_str).unwrap_or("")
        )));
    }
    if !labels.contains(&Label::Positive) {
        return Err(Error::Data(format!(
            "{}: positive label '{}' matches no row",
            path.display(),
            positive_label
        )));
    }

    let column_kinds: Vec<ColumnKind> = (0..feature_count)
        .map(|j| {
            if features.iter().all(|r| r[j].fract() == 0.0) {
                ColumnKind::Integer
            } else {
                ColumnKind::Real
            }
        })
        .collect();

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::from_rows(name, features, labels, column_kinds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn toy(n_pos: usize, n_neg: usize) -> Dataset {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n_pos {
            features.push(vec![i as f64, 1.0]);
            labels.push(Label::Positive);
        }
        for i in 0..n_neg {
            features.push(vec![i as f64, -1.0]);
            labels.push(Label::Negative);
        }
        Dataset::from_rows("toy", features, labels, vec![ColumnKind::Real, ColumnKind::Real]).unwrap()
    }

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn load_csv_maps_labels_and_kinds() {
        let f = write_csv("a,b,label\n1.5,2,yes\n2.5,3,no\n3.5,4,no\n");
        let d = load_csv(f.path(), &ColumnSelector::Name("label".into()), "yes").unwrap();
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.label(0), Label::Positive);
        assert_eq!(d.label(1), Label::Negative);
        assert_eq!(d.column_kinds(), &[ColumnKind::Real, ColumnKind::Integer]);
        assert_eq!(d.row(0), &[1.5, 2.0]);
    }

    #[test]
    fn load_csv_label_by_index() {
        let f = write_csv("label,a\npos,1\nneg,2\n");
        let d = load_csv(f.path(), &ColumnSelector::Index(0), "pos").unwrap();
        assert_eq!(d.positive_count(), 1);
        assert_eq!(d.row(0), &[1.0]);
    }

    #[test]
    fn load_csv_empty_file_is_no_data_rows() {
        let f = write_csv("");
        let err = load_csv(f.path(), &ColumnSelector::Index(0), "x").unwrap_err();
        assert!(err.to_string().contains("no data rows"), "{err}");
        let f2 = write_csv("a,label\n");
        let err2 = load_csv(f2.path(), &ColumnSelector::Name("label".into()), "x").unwrap_err();
        assert!(err2.to_string().contains("no data rows"), "{err2}");
    }

    #[test]
    fn load_csv_bad_cell_reports_row_and_column() {
        let f = write_csv("a,b,label\n1,2,yes\n1,oops,no\n");
        let err = load_csv(f.path(), &ColumnSelector::Name("label".into()), "yes").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 3"), "{msg}");
        assert!(msg.contains("column b"), "{msg}");
    }

    #[test]
    fn load_csv_missing_label_column() {
        let f = write_csv("a,b\n1,2\n");
        let err = load_csv(f.path(), &ColumnSelector::Name("label".into()), "yes").unwrap_err();
        assert!(err.to_string().contains("not found"), "{err}");
    }

    #[test]
    fn load_csv_single_label_value_rejected() {
        let f = write_csv("a,label\n1,same\n2,same\n");
        let err = load_csv(f.path(), &ColumnSelector::Name("label".into()), "same").unwrap_err();
        assert!(err.to_string().contains("fewer than two distinct labels"), "{err}");
    }

    #[test]
    fn load_csv_missing_file() {
        let err = load_csv(
            Path::new("/definitely/not/here.csv"),
            &ColumnSelector::Index(0),
            "x",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn summarize_balanced_toy() {
        let d = toy(10, 10);
        let s = d.summarize().unwrap();
        assert_eq!(s.total, 20);
        assert_eq!(s.minority_count, 10);
        assert_eq!(s.imbalance_ratio, 1.0);
    }

    #[test]
    fn summarize_3_pos_12_neg() {
        let s = toy(3, 12).summarize().unwrap();
        assert_eq!(s.imbalance_ratio, 4.0);
        assert_eq!(s.minority_fraction, 0.2);
        assert_eq!(s.feature_count, 2);
    }

    #[test]
    fn summarize_no_minority_is_error() {
        let d = Dataset::from_rows(
            "neg-only",
            vec![vec![0.0], vec![1.0]],
            vec![Label::Negative, Label::Negative],
            vec![ColumnKind::Real],
        )
        .unwrap();
        let err = d.summarize().unwrap_err();
        assert!(err.to_string().contains("no minority class"), "{err}");
    }

    #[test]
    fn split_fraction_one_gives_empty_test() {
        let d = toy(3, 5);
        let (train, test) = d.stratified_split(&SplitSpec::new(1.0, 7)).unwrap();
        assert_eq!(train.n_rows(), 8);
        assert_eq!(test.n_rows(), 0);
    }

    #[test]
    fn split_positive_count_is_exact_across_seeds() {
        // 20 positives of 100 at fraction 0.3: train must hold exactly 6 positives.
        let d = toy(20, 80);
        for seed in 0..50u64 {
            let (train, test) = d.stratified_split(&SplitSpec::new(0.3, seed)).unwrap();
            assert_eq!(train.positive_count(), 6, "seed {seed}");
            assert_eq!(train.n_rows(), 30);
            assert_eq!(train.n_rows() + test.n_rows(), 100);
        }
    }

    #[test]
    fn split_is_a_partition() {
        let d = toy(9, 23);
        let (train, test) = d.stratified_split(&SplitSpec::new(0.4, 3)).unwrap();
        // Rows are unique in the toy fixture, so multiset equality reduces to set checks.
        let mut seen: Vec<&[f64]> = train.rows().iter().map(|r| r.as_slice()).collect();
        seen.extend(test.rows().iter().map(|r| r.as_slice()));
        assert_eq!(seen.len(), d.n_rows());
        for r in d.rows() {
            assert!(seen.contains(&r.as_slice()));
        }
    }

    #[test]
    fn split_same_seed_is_identical() {
        let d = toy(11, 31);
        let a = d.stratified_split(&SplitSpec::new(0.5, 99)).unwrap();
        let b = d.stratified_split(&SplitSpec::new(0.5, 99)).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn split_starving_a_class_is_an_error() {
        let d = toy(1, 50);
        let err = d.stratified_split(&SplitSpec::new(0.2, 1)).unwrap_err();
        assert!(err.to_string().contains("no training rows"), "{err}");
    }

    #[test]
    fn partition_preserves_order_and_counts() {
        let d = toy(2, 2);
        let (pos, neg) = d.class_partition().unwrap();
        assert_eq!(pos.n_rows(), 2);
        assert_eq!(neg.n_rows(), 2);
        assert_eq!(pos.row(0), &[0.0, 1.0]);
        assert_eq!(pos.row(1), &[1.0, 1.0]);
        assert!(pos.labels().iter().all(|&l| l == Label::Positive));
    }

    #[test]
    fn partition_single_class_is_error() {
        let d = Dataset::from_rows(
            "pos-only",
            vec![vec![0.0], vec![1.0]],
            vec![Label::Positive, Label::Positive],
            vec![ColumnKind::Real],
        )
        .unwrap();
        assert!(d.class_partition().is_err());
    }

    #[test]
    fn bootstrap_point_mass_weight_returns_one_row() {
        let d = toy(2, 1);
        let out = d.bootstrap(5, Some(&[1.0, 0.0, 0.0]), 11).unwrap();
        assert_eq!(out.n_rows(), 5);
        for i in 0..5 {
            assert_eq!(out.row(i), d.row(0));
            assert_eq!(out.label(i), d.label(0));
        }
    }

    #[test]
    fn bootstrap_uniform_frequencies_within_3_sigma() {
        let d = toy(1, 1);
        let out = d.bootstrap(10_000, None, 5).unwrap();
        let first = (0..out.n_rows()).filter(|&i| out.label(i) == Label::Positive).count();
        // Binomial(10000, 0.5): sigma = 50.
        assert!((first as f64 - 5000.0).abs() <= 150.0, "count {first}");
    }

    #[test]
    fn bootstrap_weighted_frequencies_within_3_sigma() {
        let d = toy(1, 1);
        let out = d.bootstrap(10_000, Some(&[3.0, 1.0]), 17).unwrap();
        let first = (0..out.n_rows()).filter(|&i| out.label(i) == Label::Positive).count();
        // Binomial(10000, 0.75): sigma ~= 43.3.
        assert!((first as f64 - 7500.0).abs() <= 130.0, "count {first}");
    }

    #[test]
    fn bootstrap_zero_weights_rejected() {
        let d = toy(1, 1);
        assert!(d.bootstrap(3, Some(&[0.0, 0.0]), 1).is_err());
        assert!(d.bootstrap(0, None, 1).is_err());
    }

    #[test]
    fn bootstrap_same_seed_is_identical() {
        let d = toy(4, 9);
        assert_eq!(d.bootstrap(40, None, 3).unwrap(), d.bootstrap(40, None, 3).unwrap());
    }

    #[test]
    fn canonicalize_flips_when_positives_dominate() {
        let mut d = toy(12, 3);
        assert!(d.canonicalize_labels());
        assert_eq!(d.positive_count(), 3);
        let mut ok = toy(3, 12);
        assert!(!ok.canonicalize_labels());
        assert_eq!(ok.positive_count(), 3);
    }
}
