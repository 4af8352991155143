//! Retrieval metrics, ROC analysis and k-fold cross-validation.
//!
//! The positive ("depressed") class is the retrieved/relevant class for every
//! metric here.

mod cv;
mod report;
mod roc;

use thiserror::Error;

use crate::corpus::{CorpusError, Label};
use crate::models::ModelError;

pub use cv::{
    cross_validate, fold_vocabulary, row_name, CvOptions, CvOutcome, FeatureSpec, FoldOutcome,
};
pub use report::{ClassificationReport, ReportRow};
pub use roc::{auc, roc_curve, AucEstimate, RocCurve, RocPoint};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{predictions} predictions but {truth} ground-truth labels")]
    LengthMismatch { predictions: usize, truth: usize },
    #[error("no documents to evaluate")]
    Empty,
    #[error("ROC is undefined: every document is {0}")]
    SingleClass(Label),
    #[error("score {0} is not a finite number")]
    NonFiniteScore(f64),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Confusion matrix with the positive class as the retrieved class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn record(&mut self, predicted: Label, truth: Label) {
        match (predicted, truth) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Positive, Label::Negative) => self.fp += 1,
            (Label::Negative, Label::Positive) => self.fn_ += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
        }
    }
}

pub fn confusion(predictions: &[Label], truth: &[Label]) -> Result<ConfusionCounts, EvalError> {
    if predictions.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        c.record(p, t);
    }
    Ok(c)
}

/// A ratio metric together with whether its denominator was zero (in which
/// case `value` is 0 by convention).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub value: f64,
    pub degenerate: bool,
}

fn ratio(num: u64, den: u64) -> Metric {
    if den == 0 {
        Metric {
            value: 0.0,
            degenerate: true,
        }
    } else {
        Metric {
            value: num as f64 / den as f64,
            degenerate: false,
        }
    }
}

/// Fraction of retrieved documents that are relevant: `tp / (tp + fp)`.
pub fn precision(c: &ConfusionCounts) -> Metric {
    ratio(c.tp, c.tp + c.fp)
}

/// Fraction of relevant documents that are retrieved: `tp / (tp + fn)`.
pub fn recall(c: &ConfusionCounts) -> Metric {
    ratio(c.tp, c.tp + c.fn_)
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else if precision == recall {
        // exact, where 2pp/(2p) can round
        precision
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// F1 straight from the counts, `2tp / (2tp + fp + fn)`, rounded once.
/// Equal to [`f1`] of the exact precision and recall.
pub fn f1_score(c: &ConfusionCounts) -> Metric {
    ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_)
}

pub fn accuracy(c: &ConfusionCounts) -> Result<f64, EvalError> {
    if c.total() == 0 {
        return Err(EvalError::Empty);
    }
    Ok((c.tp + c.tn) as f64 / c.total() as f64)
}
