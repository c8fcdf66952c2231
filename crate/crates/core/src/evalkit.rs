//! Binary-classification scoring and multi-seed aggregation.
//!
//! The positive class is label 1 (a sentence with a semantic error); all
//! metrics are percentages. Zero-denominator precision or recall is reported
//! as 0 with a flag instead of NaN so degenerate slices stay displayable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataops::ErrorType;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction/gold length mismatch: {preds} vs {golds}")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("item {index}: value {value} outside {{0,1}}")]
    BadValue { index: usize, value: u8 },
    #[error("item {index}: error_type on a gold-negative item")]
    TypeOnNegative { index: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Binary confusion counts; positive class = label 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }
}

/// Counts prediction/gold agreement per the usual definitions.
pub fn confusion(preds: &[u8], golds: &[u8]) -> Result<Confusion, EvalError> {
    if preds.len() != golds.len() {
        return Err(EvalError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    let mut c = Confusion {
        true_pos: 0,
        false_pos: 0,
        false_neg: 0,
        true_neg: 0,
    };
    for (i, (&p, &g)) in preds.iter().zip(golds).enumerate() {
        for v in [p, g] {
            if v > 1 {
                return Err(EvalError::BadValue { index: i, value: v });
            }
        }
        match (p, g) {
            (1, 1) => c.true_pos += 1,
            (1, 0) => c.false_pos += 1,
            (0, 1) => c.false_neg += 1,
            _ => c.true_neg += 1,
        }
    }
    Ok(c)
}

/// Scores for one evaluation run, as percentages in [0, 100].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_type_recall: BTreeMap<ErrorType, f64>,
    pub n: usize,
    /// Set when a zero denominator forced precision or recall to 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<String>,
}

/// Precision, recall, F1 and accuracy from confusion counts.
pub fn prf_acc(c: &Confusion) -> Result<EvalReport, EvalError> {
    let n = c.total();
    if n == 0 {
        return Err(EvalError::Invalid("no scored items".into()));
    }
    let mut degenerate = Vec::new();
    let precision = match c.true_pos + c.false_pos {
        0 => {
            degenerate.push("precision".to_string());
            0.0
        }
        d => 100.0 * c.true_pos as f64 / d as f64,
    };
    let recall = match c.true_pos + c.false_neg {
        0 => {
            degenerate.push("recall".to_string());
            0.0
        }
        d => 100.0 * c.true_pos as f64 / d as f64,
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    let accuracy = 100.0 * (c.true_pos + c.true_neg) as f64 / n as f64;
    Ok(EvalReport {
        precision,
        recall,
        f1,
        accuracy,
        per_type_recall: BTreeMap::new(),
        n,
        degenerate,
    })
}

/// Recall per error type: of the gold-positive items of type `t`, the share
/// flagged positive. Types with no gold items are omitted.
pub fn per_type_recall(
    preds: &[u8],
    golds: &[u8],
    types: &[Option<ErrorType>],
) -> Result<BTreeMap<ErrorType, f64>, EvalError> {
    if preds.len() != golds.len() || golds.len() != types.len() {
        return Err(EvalError::LengthMismatch {
            preds: preds.len(),
            golds: golds.len().min(types.len()),
        });
    }
    let mut gold_count: BTreeMap<ErrorType, usize> = BTreeMap::new();
    let mut hit_count: BTreeMap<ErrorType, usize> = BTreeMap::new();
    for (i, ((&p, &g), t)) in preds.iter().zip(golds).zip(types).enumerate() {
        match (g, t) {
            (0, Some(_)) => return Err(EvalError::TypeOnNegative { index: i }),
            (1, Some(t)) => {
                *gold_count.entry(*t).or_insert(0) += 1;
                if p == 1 {
                    *hit_count.entry(*t).or_insert(0) += 1;
                }
            }
            _ => {}
        }
    }
    Ok(gold_count
        .into_iter()
        .map(|(t, total)| {
            let hits = hit_count.get(&t).copied().unwrap_or(0);
            (t, 100.0 * hits as f64 / total as f64)
        })
        .collect())
}

/// Scores a run end to end; fills per-type recall when types are provided.
pub fn evaluate(
    preds: &[u8],
    golds: &[u8],
    types: Option<&[Option<ErrorType>]>,
) -> Result<EvalReport, EvalError> {
    let c = confusion(preds, golds)?;
    let mut report = prf_acc(&c)?;
    if let Some(types) = types {
        report.per_type_recall = per_type_recall(preds, golds, types)?;
    }
    Ok(report)
}

/// Mean and sample standard deviation of one metric over runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Table-style rendering, one decimal each: `73.0±1.4`.
    pub fn display(&self) -> String {
        format!("{:.1}\u{b1}{:.1}", self.mean, self.std)
    }
}

/// Per-metric aggregate over independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregate {
    pub precision: MeanStd,
    pub recall: MeanStd,
    pub f1: MeanStd,
    pub accuracy: MeanStd,
    pub runs: usize,
    /// Set when only one run was supplied and std is reported as 0.
    pub single_run: bool,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        var.sqrt()
    };
    MeanStd { mean, std }
}

/// Aggregates reports from runs with different seeds: per-metric mean and
/// sample (n-1) standard deviation.
pub fn aggregate_runs(reports: &[EvalReport]) -> Result<RunAggregate, EvalError> {
    if reports.is_empty() {
        return Err(EvalError::Invalid("no reports to aggregate".into()));
    }
    let collect = |f: fn(&EvalReport) -> f64| -> Vec<f64> { reports.iter().map(f).collect() };
    Ok(RunAggregate {
        precision: mean_std(&collect(|r| r.precision)),
        recall: mean_std(&collect(|r| r.recall)),
        f1: mean_std(&collect(|r| r.f1)),
        accuracy: mean_std(&collect(|r| r.accuracy)),
        runs: reports.len(),
        single_run: reports.len() == 1,
    })
}

/// Renders an aggregate as one table row: `P R F1 ACC`, each `mean±std`.
pub fn format_table_row(model: &str, agg: &RunAggregate) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}",
        model,
        agg.precision.display(),
        agg.recall.display(),
        agg.f1.display(),
        agg.accuracy.display()
    )
}
