use std::io::Write;

use super::EvalError;
use crate::corpus::Label;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Documents scoring `>= threshold` are called positive; `+inf` for the
    /// origin.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
    pub tp: u64,
    pub fp: u64,
}

/// Empirical ROC curve over every distinct score, from (0,0) to (1,1).
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub n_pos: u64,
    pub n_neg: u64,
}

/// Area under the ROC curve computed two ways: trapezoidal integration of
/// the curve, and the pairwise probability that a random positive outscores
/// a random negative (ties count one half).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucEstimate {
    pub trapezoid: f64,
    pub pairwise: f64,
}

fn check(scores: &[f64], truth: &[Label]) -> Result<(u64, u64), EvalError> {
    if scores.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            predictions: scores.len(),
            truth: truth.len(),
        });
    }
    if let Some(&s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(s));
    }
    let n_pos = truth.iter().filter(|l| l.is_positive()).count() as u64;
    let n_neg = truth.len() as u64 - n_pos;
    match (n_pos, n_neg) {
        (0, 0) => Err(EvalError::Empty),
        (0, _) => Err(EvalError::SingleClass(Label::Negative)),
        (_, 0) => Err(EvalError::SingleClass(Label::Positive)),
        counts => Ok(counts),
    }
}

pub fn roc_curve(scores: &[f64], truth: &[Label]) -> Result<RocCurve, EvalError> {
    let (n_pos, n_neg) = check(scores, truth)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
        tp: 0,
        fp: 0,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    for run in order.chunk_by(|&a, &b| scores[a] == scores[b]) {
        for &i in run {
            if truth[i].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        points.push(RocPoint {
            threshold: scores[run[0]],
            fpr: fp as f64 / n_neg as f64,
            tpr: tp as f64 / n_pos as f64,
            tp,
            fp,
        });
    }
    // The lowest threshold labels everything positive, so the curve already
    // ends at (1,1).
    Ok(RocCurve {
        points,
        n_pos,
        n_neg,
    })
}

/// Both AUC estimates; `curve` must be the ROC of `scores` / `truth`.
pub fn auc(curve: &RocCurve, scores: &[f64], truth: &[Label]) -> Result<AucEstimate, EvalError> {
    let (n_pos, n_neg) = check(scores, truth)?;
    let denom = 2 * n_pos as u128 * n_neg as u128;

    // Each segment contributes width * mean height; scaled by 2 * n_pos * n_neg
    // that is dfp * (tp_prev + tp), an integer.
    let doubled_area: u128 = curve
        .points
        .windows(2)
        .map(|w| (w[1].fp - w[0].fp) as u128 * (w[0].tp + w[1].tp) as u128)
        .sum();

    // Pairwise: for each positive, count negatives strictly below and equal.
    let mut negatives: Vec<f64> = scores
        .iter()
        .zip(truth)
        .filter(|(_, l)| !l.is_positive())
        .map(|(&s, _)| s)
        .collect();
    negatives.sort_by(f64::total_cmp);
    let mut doubled_wins: u128 = 0;
    for (&s, _) in scores.iter().zip(truth).filter(|(_, l)| l.is_positive()) {
        let below = negatives.partition_point(|&n| n < s);
        let not_above = negatives.partition_point(|&n| n <= s);
        doubled_wins += 2 * below as u128 + (not_above - below) as u128;
    }

    Ok(AucEstimate {
        trapezoid: doubled_area as f64 / denom as f64,
        pairwise: doubled_wins as f64 / denom as f64,
    })
}

impl RocCurve {
    /// CSV `threshold,fpr,tpr` with the AUC pair as a trailing comment line.
    pub fn write_csv<W: Write>(&self, mut w: W, auc: &AucEstimate) -> std::io::Result<()> {
        writeln!(w, "threshold,fpr,tpr")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
        }
        writeln!(
            w,
            "# auc_trapezoid={},auc_pairwise={}",
            auc.trapezoid, auc.pairwise
        )
    }
}
