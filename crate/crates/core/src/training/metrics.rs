use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    /// Sign agreement over samples with a non-zero label.
    pub acc2: f64,
    /// Agreement after clamping to `[-3, 3]` and rounding.
    pub acc7: f64,
    /// Binary F1 with positive sentiment as the positive class.
    pub f1: f64,
    pub mae: f64,
    pub corr: f64,
    /// False when predictions or labels have zero variance; `corr` is then 0.
    pub corr_defined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilabelMetrics {
    pub f1: Vec<f64>,
    pub accuracy: Vec<f64>,
    pub mean_f1: f64,
    pub mean_accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum TaskMetrics {
    Regression(RegressionMetrics),
    Multilabel(MultilabelMetrics),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub split: String,
    pub samples: usize,
    #[serde(flatten)]
    pub scores: TaskMetrics,
}

impl Metrics {
    pub fn regression(&self) -> Option<&RegressionMetrics> {
        match &self.scores {
            TaskMetrics::Regression(r) => Some(r),
            TaskMetrics::Multilabel(_) => None,
        }
    }

    pub fn multilabel(&self) -> Option<&MultilabelMetrics> {
        match &self.scores {
            TaskMetrics::Multilabel(m) => Some(m),
            TaskMetrics::Regression(_) => None,
        }
    }
}

/// `2·TP / (2·TP + FP + FN)`, 0 when there are no positives at all.
pub fn f1_score(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Seven-way bin of a sentiment score.
pub fn acc7_bin(x: f64) -> i32 {
    x.clamp(-3.0, 3.0).round() as i32
}

/// Pearson correlation, or `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn regression_metrics(preds: &[f64], labels: &[f64]) -> Result<RegressionMetrics> {
    if preds.is_empty() || preds.len() != labels.len() {
        return Err(Error::InvalidDataset(format!(
            "{} predictions for {} labels",
            preds.len(),
            labels.len()
        )));
    }
    let n = preds.len() as f64;
    let (mut agree, mut nonzero) = (0usize, 0usize);
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &y) in preds.iter().zip(labels) {
        if y == 0.0 {
            continue;
        }
        nonzero += 1;
        let (pp, yp) = (p > 0.0, y > 0.0);
        agree += (pp == yp) as usize;
        match (pp, yp) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let acc2 = if nonzero == 0 {
        0.0
    } else {
        agree as f64 / nonzero as f64
    };
    let acc7 = preds
        .iter()
        .zip(labels)
        .filter(|(p, y)| acc7_bin(**p) == acc7_bin(**y))
        .count() as f64
        / n;
    let mae = preds.iter().zip(labels).map(|(p, y)| (p - y).abs()).sum::<f64>() / n;
    let corr = pearson(preds, labels);
    if corr.is_none() {
        log::warn!("correlation undefined for constant predictions or labels; reporting 0");
    }
    Ok(RegressionMetrics {
        acc2,
        acc7,
        f1: f1_score(tp, fp, fn_),
        mae,
        corr: corr.unwrap_or(0.0),
        corr_defined: corr.is_some(),
    })
}

/// Per-class scores from logits thresholded at 0.
pub fn multilabel_metrics(logits: &[Vec<f64>], labels: &[Vec<u8>]) -> Result<MultilabelMetrics> {
    if logits.is_empty() || logits.len() != labels.len() {
        return Err(Error::InvalidDataset(format!(
            "{} predictions for {} labels",
            logits.len(),
            labels.len()
        )));
    }
    let k = labels[0].len();
    let mut f1 = Vec::with_capacity(k);
    let mut accuracy = Vec::with_capacity(k);
    for c in 0..k {
        let (mut tp, mut fp, mut fn_, mut correct) = (0, 0, 0, 0);
        for (z, y) in logits.iter().zip(labels) {
            let (p, t) = (z[c] > 0.0, y[c] == 1);
            correct += (p == t) as usize;
            match (p, t) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        f1.push(f1_score(tp, fp, fn_));
        accuracy.push(correct as f64 / logits.len() as f64);
    }
    Ok(MultilabelMetrics {
        mean_f1: f1.iter().sum::<f64>() / k as f64,
        mean_accuracy: accuracy.iter().sum::<f64>() / k as f64,
        f1,
        accuracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn perfect_predictions() {
        let y = [2.0, -2.0, 1.0, -0.4, 3.0];
        let m = regression_metrics(&y, &y).unwrap();
        assert_eq!((m.acc2, m.acc7, m.f1, m.mae), (1.0, 1.0, 1.0, 0.0));
        assert_abs_diff_eq!(m.corr, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn offset_predictions_keep_signs() {
        let y = [2.0, -2.0, 2.0, -2.0];
        let p: Vec<f64> = y.iter().map(|v| v + 0.4).collect();
        let m = regression_metrics(&p, &y).unwrap();
        assert_eq!(m.acc2, 1.0);
        assert_abs_diff_eq!(m.mae, 0.4, epsilon = 1e-12);
    }

    #[test]
    fn f1_from_confusion_counts() {
        assert_abs_diff_eq!(f1_score(2, 1, 1), 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(f1_score(0, 0, 0), 0.0);
        // TP=2, FP=1, FN=1 through the regression path
        let p = [1.0, 1.0, 1.0, -1.0];
        let y = [1.0, 1.0, -1.0, 1.0];
        assert_abs_diff_eq!(regression_metrics(&p, &y).unwrap().f1, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_labels_are_left_out_of_acc2() {
        let m = regression_metrics(&[1.0, -1.0, 5.0], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.acc2, 1.0);
    }

    #[test]
    fn constant_predictions_have_undefined_corr() {
        let m = regression_metrics(&[0.5, 0.5, 0.5], &[1.0, -1.0, 2.0]).unwrap();
        assert_eq!(m.corr, 0.0);
        assert!(!m.corr_defined);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(regression_metrics(&[], &[]).is_err());
        assert!(multilabel_metrics(&[], &[]).is_err());
    }

    #[test]
    fn multilabel_per_class() {
        let logits = vec![vec![1.0, -1.0], vec![2.0, 1.0], vec![-1.0, -3.0]];
        let labels = vec![vec![1, 0], vec![0, 1], vec![0, 1]];
        let m = multilabel_metrics(&logits, &labels).unwrap();
        assert_abs_diff_eq!(m.accuracy[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.f1[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.accuracy[1], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.f1[1], 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn acc7_bins_split_at_half_integers() {
        assert_eq!(acc7_bin(-100.0), -3);
        assert_eq!(acc7_bin(0.49), 0);
        assert_eq!(acc7_bin(0.51), 1);
        assert_eq!(acc7_bin(2.5), 3);
        assert_eq!(acc7_bin(f64::INFINITY), 3);
    }

    proptest! {
        #![proptest_config(ProptestConfig {
            cases: 64,
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
            ..ProptestConfig::default()
        })]

        #[test]
        fn acc7_is_total(x in -1e6f64..1e6) {
            prop_assert!((-3..=3).contains(&acc7_bin(x)));
        }

        #[test]
        fn corr_is_affine_invariant(
            pairs in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..30),
            scale in 0.01f64..100.0,
            shift in -50.0f64..50.0,
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let base = pearson(&x, &y);
            let moved: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
            match (base, pearson(&moved, &y)) {
                (Some(a), Some(b)) => prop_assert!((a - b).abs() < 1e-9),
                (None, None) => {}
                other => prop_assert!(false, "{other:?}"),
            }
        }
    }
}
