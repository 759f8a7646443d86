//! All-subsets wrapper labeling: train and test the SVM on every feature-type
//! subset and mark the subsets whose test accuracy is above the mean.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::metrics::{ConfusionCounts, Metrics};
use super::svm::{train_svm, SvmParams};
use crate::dataio::{project, split_by_partition, FeatureSubset, SparseDataset, SparseRow};
use crate::enumeration::{enumerate_subsets, ClassPartition};
use crate::error::{Error, Result};
use crate::format::fmt10;
use crate::selector::SelectionReport;
use crate::stats::zscores;

pub const MIN_CLASS_ROWS: usize = 4;
pub const TEST_FRACTION: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetLabel {
    pub subset: FeatureSubset,
    pub test_accuracy: f64,
    pub z_accuracy: f64,
    pub optimal: bool,
}

/// Stratified train/test split of row indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Holds out `round(0.3 * n)` rows of each class (at least one, never all),
/// shuffled by `seed`. Index lists come back sorted.
pub fn stratified_split(classes: &[&[usize]], seed: u64) -> Split {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in classes {
        let mut idx = class.to_vec();
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64 * TEST_FRACTION).round() as usize).clamp(1, idx.len().saturating_sub(1));
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Split { train, test }
}

/// Test accuracy of the SVM trained on one projected dataset.
pub fn subset_accuracy(projected: &SparseDataset, targets: &[f64], split: &Split, params: SvmParams) -> Result<f64> {
    let pick = |idx: &[usize]| -> (Vec<SparseRow>, Vec<f64>) {
        idx.iter().map(|&i| (projected.rows()[i].clone(), targets[i])).unzip()
    };
    let (train_x, train_y) = pick(&split.train);
    let (test_x, test_y) = pick(&split.test);
    let model = train_svm(&train_x, &train_y, projected.n_columns(), params)?;
    Ok(model.accuracy(&test_x, &test_y))
}

pub fn wrapper_label(
    ds: &SparseDataset,
    part: &ClassPartition,
    params: SvmParams,
    split_seed: u64,
) -> Result<Vec<SubsetLabel>> {
    params.validate()?;
    let (pos, neg) = split_by_partition(ds, part)?;
    for (rows, side) in [(&pos, part.positive()), (&neg, part.negative())] {
        if rows.len() < MIN_CLASS_ROWS {
            let names: Vec<&str> = side.iter().map(String::as_str).collect();
            return Err(Error::ClassTooSmall {
                class: names.join(","),
                rows: rows.len(),
                needed: MIN_CLASS_ROWS,
            });
        }
    }
    let mut targets = vec![-1.0; ds.n_rows()];
    for &i in &pos {
        targets[i] = 1.0;
    }
    let split = stratified_split(&[&pos, &neg], split_seed);
    let subsets = enumerate_subsets(ds.layout())?;
    let accuracies = subsets
        .par_iter()
        .map(|s| subset_accuracy(&project(ds, s)?, &targets, &split, params))
        .collect::<Result<Vec<f64>>>()?;
    let z = zscores(&accuracies);
    Ok(subsets
        .into_iter()
        .zip(accuracies)
        .zip(z)
        .map(|((subset, test_accuracy), z_accuracy)| SubsetLabel {
            subset,
            test_accuracy,
            z_accuracy,
            optimal: z_accuracy > 0.0,
        })
        .collect())
}

/// One line of a labels file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRecord {
    pub partition: String,
    pub subset: String,
    pub test_accuracy: f64,
    pub z_accuracy: f64,
    pub optimal: bool,
}

impl LabelRecord {
    pub fn from_label(partition: &ClassPartition, label: &SubsetLabel) -> Self {
        Self {
            partition: partition.canonical_name(),
            subset: label.subset.to_string(),
            test_accuracy: label.test_accuracy,
            z_accuracy: label.z_accuracy,
            optimal: label.optimal,
        }
    }
}

fn verdict_word(optimal: bool) -> &'static str {
    if optimal {
        "optimal"
    } else {
        "suboptimal"
    }
}

pub(crate) fn parse_verdict_word(s: &str) -> Option<bool> {
    match s {
        "optimal" => Some(true),
        "suboptimal" => Some(false),
        _ => None,
    }
}

pub fn write_labels(records: &[LabelRecord], mut w: impl Write) -> std::io::Result<()> {
    for r in records {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            r.partition,
            r.subset,
            fmt10(r.test_accuracy),
            fmt10(r.z_accuracy),
            verdict_word(r.optimal)
        )?;
    }
    Ok(())
}

pub fn parse_labels(reader: impl BufRead) -> Result<Vec<LabelRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: lineno, msg };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(bad(format!("expected 5 tab-separated fields, found {}", f.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("invalid number `{s}`")));
        out.push(LabelRecord {
            partition: f[0].to_string(),
            subset: f[1].to_string(),
            test_accuracy: num(f[2])?,
            z_accuracy: num(f[3])?,
            optimal: parse_verdict_word(f[4]).ok_or_else(|| bad(format!("invalid verdict `{}`", f[4])))?,
        });
    }
    Ok(out)
}

/// Confusion counts of selector verdicts (predictions) against oracle
/// labels (truth), overall and per partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionQuality {
    pub overall: ConfusionCounts,
    pub per_partition: BTreeMap<String, ConfusionCounts>,
}

impl SelectionQuality {
    pub fn metrics(&self) -> Result<Metrics> {
        self.overall.metrics()
    }
}

/// Predicted verdicts keyed by (partition name, subset).
pub type PredictionKey = (String, String);

pub fn predictions_of(report: &SelectionReport) -> BTreeMap<PredictionKey, bool> {
    report
        .partitions
        .iter()
        .flat_map(|p| {
            let name = p.partition.canonical_name();
            p.results
                .iter()
                .map(move |r| ((name.clone(), r.subset.to_string()), r.verdict.optimal))
        })
        .collect()
}

pub fn compare_predictions(
    predicted: &BTreeMap<PredictionKey, bool>,
    truth: &[LabelRecord],
) -> Result<SelectionQuality> {
    let mut truth_map = BTreeMap::new();
    for r in truth {
        if truth_map
            .insert((r.partition.clone(), r.subset.clone()), r.optimal)
            .is_some()
        {
            return Err(Error::KeyMismatch(format!(
                "duplicate label for {} / {}",
                r.partition, r.subset
            )));
        }
    }
    if let Some((p, s)) = predicted.keys().find(|k| !truth_map.contains_key(*k)) {
        return Err(Error::KeyMismatch(format!("no label for {p} / {s}")));
    }
    if let Some((p, s)) = truth_map.keys().find(|k| !predicted.contains_key(*k)) {
        return Err(Error::KeyMismatch(format!("no prediction for {p} / {s}")));
    }
    let mut overall = ConfusionCounts::default();
    let mut per_partition: BTreeMap<String, ConfusionCounts> = BTreeMap::new();
    for (key, &pred) in predicted {
        let actual = truth_map[key];
        overall.record(pred, actual);
        per_partition.entry(key.0.clone()).or_default().record(pred, actual);
    }
    Ok(SelectionQuality { overall, per_partition })
}

pub fn selection_quality(predicted: &SelectionReport, truth: &[LabelRecord]) -> Result<SelectionQuality> {
    compare_predictions(&predictions_of(predicted), truth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_stratified_and_seeded() {
        let a: Vec<usize> = (0..10).collect();
        let b: Vec<usize> = (10..14).collect();
        let s = stratified_split(&[&a, &b], 5);
        assert_eq!(s.test.iter().filter(|&&i| i < 10).count(), 3);
        assert_eq!(s.test.iter().filter(|&&i| i >= 10).count(), 1);
        assert_eq!(s.train.len() + s.test.len(), 14);
        assert_eq!(s, stratified_split(&[&a, &b], 5));
    }

    #[test]
    fn labels_file_round_trip() {
        let records = vec![
            LabelRecord {
                partition: "pos=B".into(),
                subset: "t1,t2".into(),
                test_accuracy: 0.9,
                z_accuracy: 1.0,
                optimal: true,
            },
            LabelRecord {
                partition: "pos=B".into(),
                subset: "t1".into(),
                test_accuracy: 0.5,
                z_accuracy: -1.0,
                optimal: false,
            },
        ];
        let mut buf = Vec::new();
        write_labels(&records, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "pos=B\tt1,t2\t0.9\t1\toptimal\npos=B\tt1\t0.5\t-1\tsuboptimal\n"
        );
        assert_eq!(parse_labels(buf.as_slice()).unwrap(), records);
        assert!(parse_labels("pos=B\tt1\t0.5\t-1\tmaybe\n".as_bytes()).is_err());
    }

    fn key(p: &str, s: &str) -> PredictionKey {
        (p.to_string(), s.to_string())
    }

    fn rec(p: &str, s: &str, optimal: bool) -> LabelRecord {
        LabelRecord {
            partition: p.into(),
            subset: s.into(),
            test_accuracy: 0.0,
            z_accuracy: 0.0,
            optimal,
        }
    }

    #[test]
    fn comparison_counts() {
        let predicted = BTreeMap::from([
            (key("pos=B", "a"), true),
            (key("pos=B", "b"), false),
            (key("pos=C", "a"), false),
        ]);
        let truth = vec![
            rec("pos=B", "a", true),
            rec("pos=B", "b", true),
            rec("pos=C", "a", false),
        ];
        let q = compare_predictions(&predicted, &truth).unwrap();
        assert_eq!(q.overall, ConfusionCounts::new(1, 0, 1, 1));
        assert_eq!(q.per_partition["pos=B"], ConfusionCounts::new(1, 0, 0, 1));
        let m = q.metrics().unwrap();
        assert_eq!(m.precision, 1.0);
        assert_eq!(m.recall, 0.5);
    }

    #[test]
    fn all_suboptimal_predictions_have_zero_recall() {
        let predicted = BTreeMap::from([(key("p", "a"), false), (key("p", "b"), false)]);
        let truth = vec![rec("p", "a", true), rec("p", "b", false)];
        assert_eq!(
            compare_predictions(&predicted, &truth)
                .unwrap()
                .metrics()
                .unwrap()
                .recall,
            0.0
        );
    }

    #[test]
    fn mismatched_keys() {
        let predicted = BTreeMap::from([(key("p", "a"), false)]);
        assert!(matches!(
            compare_predictions(&predicted, &[rec("p", "b", true)]),
            Err(Error::KeyMismatch(_))
        ));
        assert!(matches!(
            compare_predictions(&predicted, &[rec("p", "a", true), rec("p", "a", true)]),
            Err(Error::KeyMismatch(_))
        ));
    }
}
