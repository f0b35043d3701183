//! Scaled confusion fractions, precision/recall/F1/accuracy and P@K.
//!
//! Each confusion cell is divided by twice the size of its truth class, so
//! the positive cells sum to 0.5 and the negative cells sum to 0.5
//! regardless of class balance.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledConfusion {
    pub tp: f64,
    pub tn: f64,
    pub fp: f64,
    pub fn_: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
}

/// `(predicted, truth)` pairs to scaled confusion fractions.
pub fn scaled_confusion(predictions: &[(bool, bool)]) -> Result<ScaledConfusion> {
    let (mut tp, mut tn, mut fp, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for &(pred, truth) in predictions {
        match (pred, truth) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
        }
    }
    let positives = tp + fn_;
    let negatives = tn + fp;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass { positives, negatives });
    }
    let p2 = 2.0 * positives as f64;
    let n2 = 2.0 * negatives as f64;
    Ok(ScaledConfusion {
        tp: tp as f64 / p2,
        tn: tn as f64 / n2,
        fp: fp as f64 / n2,
        fn_: fn_ as f64 / p2,
    })
}

/// Precision, recall, F1 and accuracy from scaled cells. Undefined ratios
/// (zero denominators) come out as 0.
pub fn prf_metrics(c: &ScaledConfusion) -> PrfMetrics {
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    PrfMetrics {
        precision,
        recall,
        f1,
        accuracy: c.tp + c.tn,
    }
}

/// Fraction of mentions whose gold entity is among the first `k` ranked
/// candidates. Mentions without a gold link are ignored; a gold mention
/// with no ranking counts as a miss.
pub fn precision_at_k(ranked: &HashMap<String, Vec<String>>, gold: &HashMap<String, String>, k: usize) -> f64 {
    if gold.is_empty() {
        return 0.0;
    }
    let hits = gold
        .iter()
        .filter(|(mention, entity)| {
            ranked
                .get(*mention)
                .is_some_and(|r| r.iter().take(k).any(|e| e == *entity))
        })
        .count();
    hits as f64 / gold.len() as f64
}

/// Rounds to 4 decimals for reports.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

/// One row of a metrics report.
#[derive(Debug, Clone)]
pub struct MetricsRow {
    pub method: String,
    pub confusion: ScaledConfusion,
    pub metrics: PrfMetrics,
}

impl MetricsRow {
    pub fn new(method: impl Into<String>, confusion: ScaledConfusion) -> Self {
        Self {
            method: method.into(),
            metrics: prf_metrics(&confusion),
            confusion,
        }
    }
}

/// Tab-separated table with the columns method, TP, TN, FP, FN, precision,
/// recall, F1 and accuracy, values rounded to 4 decimals.
pub fn format_metrics_table(rows: &[MetricsRow]) -> String {
    let mut out = String::from("method\ttp\ttn\tfp\tfn\tprecision\trecall\tf1\taccuracy\n");
    for r in rows {
        let c = &r.confusion;
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.method,
            round4(c.tp),
            round4(c.tn),
            round4(c.fp),
            round4(c.fn_),
            round4(m.precision),
            round4(m.recall),
            round4(m.f1),
            round4(m.accuracy)
        );
    }
    out
}

/// Tab-separated `k<TAB>p_at_k` block.
pub fn format_precision_at_k(method: &str, values: &[(usize, f64)]) -> String {
    let mut out = String::from("method\tk\tp_at_k\n");
    for (k, p) in values {
        let _ = writeln!(out, "{method}\t{k}\t{}", round4(*p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preds(tp: usize, fn_: usize, tn: usize, fp: usize) -> Vec<(bool, bool)> {
        let mut v = Vec::new();
        v.extend(std::iter::repeat_n((true, true), tp));
        v.extend(std::iter::repeat_n((false, true), fn_));
        v.extend(std::iter::repeat_n((false, false), tn));
        v.extend(std::iter::repeat_n((true, false), fp));
        v
    }

    #[test]
    fn perfect_and_all_positive() {
        let c = scaled_confusion(&preds(10, 0, 7, 0)).unwrap();
        assert_eq!((c.tp, c.tn, c.fp, c.fn_), (0.5, 0.5, 0.0, 0.0));
        let m = prf_metrics(&c);
        assert_eq!((m.precision, m.recall, m.f1, m.accuracy), (1.0, 1.0, 1.0, 1.0));

        let c = scaled_confusion(&preds(10, 0, 0, 7)).unwrap();
        assert_eq!((c.tp, c.tn, c.fp, c.fn_), (0.5, 0.0, 0.5, 0.0));
    }

    #[test]
    fn hand_evaluated_counts() {
        let c = scaled_confusion(&preds(99, 1, 98, 2)).unwrap();
        assert!((c.tp - 0.495).abs() < 1e-12);
        assert!((c.tn - 0.49).abs() < 1e-12);
        assert!((c.fp - 0.01).abs() < 1e-12);
        assert!((c.fn_ - 0.005).abs() < 1e-12);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(matches!(
            scaled_confusion(&preds(3, 1, 0, 0)),
            Err(Error::SingleClass {
                positives: 4,
                negatives: 0
            })
        ));
    }

    #[test]
    fn balanced_accuracy_is_conventional_accuracy() {
        let c = scaled_confusion(&preds(40, 10, 45, 5)).unwrap();
        let conventional = (40.0 + 45.0) / 100.0;
        assert!((prf_metrics(&c).accuracy - conventional).abs() < 1e-12);
    }

    #[test]
    fn precision_at_k_cases() {
        let gold: HashMap<String, String> = (0..10).map(|i| (format!("m{i}"), "gold".to_string())).collect();
        let at = |rank: usize| -> Vec<String> {
            let mut v: Vec<String> = (0..5).map(|j| format!("x{j}")).collect();
            v.insert(rank - 1, "gold".to_string());
            v
        };
        let first: HashMap<_, _> = gold.keys().map(|m| (m.clone(), at(1))).collect();
        assert_eq!(precision_at_k(&first, &gold, 1), 1.0);

        let third: HashMap<_, _> = gold.keys().map(|m| (m.clone(), at(3))).collect();
        assert_eq!(precision_at_k(&third, &gold, 1), 0.0);
        assert_eq!(precision_at_k(&third, &gold, 5), 1.0);

        let mixed: HashMap<_, _> = gold
            .keys()
            .map(|m| {
                let i: usize = m[1..].parse().unwrap();
                (m.clone(), if i < 7 { at(1) } else { at(2) })
            })
            .collect();
        assert!((precision_at_k(&mixed, &gold, 1) - 0.7).abs() < 1e-12);
        let mut prev = 0.0;
        for k in 1..8 {
            let p = precision_at_k(&mixed, &gold, k);
            assert!(p >= prev && (0.0..=1.0).contains(&p));
            prev = p;
        }
    }

    #[test]
    fn report_rounds_to_four_places() {
        let row = MetricsRow::new(
            "jel",
            ScaledConfusion {
                tp: 0.5,
                tn: 0.4991,
                fp: 0.0009,
                fn_: 0.0,
            },
        );
        let table = format_metrics_table(&[row]);
        assert!(
            table.contains("jel\t0.5\t0.4991\t0.0009\t0\t0.9982\t1\t0.9991\t0.9991"),
            "{table}"
        );
    }
}
