//! Multinomial naive Bayes with additive smoothing.
//!
//! For class `k` and feature `i`, `p_ki = (alpha + N_ki) / (alpha * D + N_k)`
//! where `N_ki` is the total count of feature `i` over class-`k` documents and
//! `N_k` the total count of all features in class `k`. Priors are document
//! fractions. Scoring works in log space; the multinomial coefficient is the
//! same for both classes and cancels in the posterior, so it is never formed.

use std::cmp::Ordering;

use num_bigint::BigUint;

use super::{check_training_set, sigmoid, Classifier, ModelError};
use crate::corpus::Label;
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct NbParams {
    /// Additive smoothing; 1 is Laplace smoothing.
    pub alpha: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams { alpha: 1.0 }
    }
}

/// The model keeps its integer sufficient statistics next to the derived
/// log-probabilities so that near-tied decisions can be settled exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub(crate) alpha: f64,
    pub(crate) docs: [u64; 2],
    pub(crate) count_pos: Vec<u64>,
    pub(crate) count_neg: Vec<u64>,
    pub(crate) log_prior_pos: f64,
    pub(crate) log_prior_neg: f64,
    pub(crate) log_prob_pos: Vec<f64>,
    pub(crate) log_prob_neg: Vec<f64>,
}

pub fn train(
    xs: &[SparseVector],
    ys: &[Label],
    params: &NbParams,
) -> Result<NaiveBayesModel, ModelError> {
    let dim = check_training_set(xs, ys, true)?;
    let mut count_pos = vec![0u64; dim];
    let mut count_neg = vec![0u64; dim];
    let mut docs_pos = 0u64;
    for (x, y) in xs.iter().zip(ys) {
        let target = if y.is_positive() {
            docs_pos += 1;
            &mut count_pos
        } else {
            &mut count_neg
        };
        for (i, c) in x.iter() {
            target[i] += c as u64;
        }
    }
    NaiveBayesModel::from_counts(
        params.alpha,
        [docs_pos, xs.len() as u64 - docs_pos],
        count_pos,
        count_neg,
    )
}

impl NaiveBayesModel {
    /// Builds the model from per-class document counts `[pos, neg]` and
    /// per-class feature totals.
    pub fn from_counts(
        alpha: f64,
        docs: [u64; 2],
        count_pos: Vec<u64>,
        count_neg: Vec<u64>,
    ) -> Result<Self, ModelError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ModelError::InvalidHyperparameter(format!(
                "alpha must be > 0, got {alpha}"
            )));
        }
        if docs[0] == 0 || docs[1] == 0 {
            let missing = if docs[0] == 0 {
                Label::Positive
            } else {
                Label::Negative
            };
            return Err(ModelError::Malformed(format!("no {missing} documents")));
        }
        if count_pos.len() != count_neg.len() {
            return Err(ModelError::Malformed(
                "class count vectors differ in length".into(),
            ));
        }
        let dim = count_pos.len();
        let log_probs = |counts: &[u64]| -> Vec<f64> {
            let total: u64 = counts.iter().sum();
            let denom = (alpha * dim as f64 + total as f64).ln();
            counts
                .iter()
                .map(|&c| (alpha + c as f64).ln() - denom)
                .collect()
        };
        let n = (docs[0] + docs[1]) as f64;
        Ok(NaiveBayesModel {
            alpha,
            docs,
            log_prior_pos: (docs[0] as f64 / n).ln(),
            log_prior_neg: (docs[1] as f64 / n).ln(),
            log_prob_pos: log_probs(&count_pos),
            log_prob_neg: log_probs(&count_neg),
            count_pos,
            count_neg,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn log_priors(&self) -> (f64, f64) {
        (self.log_prior_pos, self.log_prior_neg)
    }

    /// Per-feature log-probabilities for `label`.
    pub fn feature_log_probs(&self, label: Label) -> &[f64] {
        match label {
            Label::Positive => &self.log_prob_pos,
            Label::Negative => &self.log_prob_neg,
        }
    }

    /// Unnormalised log joint `log p(C_k) + sum_i x_i log p_ki` for (pos, neg).
    pub fn log_joint(&self, x: &SparseVector) -> (f64, f64) {
        debug_assert_eq!(x.dim(), self.log_prob_pos.len());
        let mut pos = self.log_prior_pos;
        let mut neg = self.log_prior_neg;
        for (i, c) in x.iter() {
            pos += c as f64 * self.log_prob_pos[i];
            neg += c as f64 * self.log_prob_neg[i];
        }
        (pos, neg)
    }

    /// Posterior log-odds `log p(pos|x) - log p(neg|x)`.
    pub fn log_odds(&self, x: &SparseVector) -> f64 {
        let (pos, neg) = self.log_joint(x);
        pos - neg
    }

    /// Posterior probabilities `(p(pos|x), p(neg|x))`, normalised by the evidence.
    pub fn posteriors(&self, x: &SparseVector) -> (f64, f64) {
        let (pos, neg) = self.log_joint(x);
        let m = pos.max(neg);
        let (ep, en) = ((pos - m).exp(), (neg - m).exp());
        (ep / (ep + en), en / (ep + en))
    }

    pub fn posterior(&self, x: &SparseVector) -> f64 {
        sigmoid(self.log_odds(x))
    }
}

impl NaiveBayesModel {
    /// Compares the two joint probabilities in exact rational arithmetic.
    ///
    /// With `alpha = m / 2^k`, every factor `alpha + c` is `(m + c 2^k) / 2^k`
    /// and both sides carry the same power of `2^k`, so the comparison is
    /// `N_pos prod (m + c_pos 2^k)^x (m D + T_neg 2^k)^X` against the same
    /// expression with the classes swapped, where `X` is the total count.
    fn exact_compare(&self, x: &SparseVector) -> Ordering {
        let (m, k) = dyadic(self.alpha);
        let scale = BigUint::from(1u8) << k;
        let lift = |c: u64| &m + BigUint::from(c) * &scale;
        let dim = self.count_pos.len() as u64;
        let total_count: u64 = x.total();
        let side = |docs: u64, own: &[u64], other: &[u64]| -> BigUint {
            let mut v = BigUint::from(docs);
            for (i, c) in x.iter() {
                v *= lift(own[i]).pow(c);
            }
            let other_total: u64 = other.iter().sum();
            let denom = &m * BigUint::from(dim) + BigUint::from(other_total) * &scale;
            // a document's total count fits the exponent type in practice
            v * denom.pow(u32::try_from(total_count).expect("document token count exceeds u32"))
        };
        let pos = side(self.docs[0], &self.count_pos, &self.count_neg);
        let neg = side(self.docs[1], &self.count_neg, &self.count_pos);
        pos.cmp(&neg)
    }
}

/// `v = m / 2^k` with integer `m` and `k >= 0`, for finite positive `v`.
fn dyadic(v: f64) -> (BigUint, u32) {
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1 << 52) - 1);
    let (mantissa, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp - 1075)
    };
    if e >= 0 {
        (BigUint::from(mantissa) << e as u32, 0)
    } else {
        (BigUint::from(mantissa), (-e) as u32)
    }
}

impl Classifier for NaiveBayesModel {
    fn dimension(&self) -> usize {
        self.log_prob_pos.len()
    }

    fn score(&self, x: &SparseVector) -> f64 {
        self.posterior(x)
    }

    fn ranking_score(&self, x: &SparseVector) -> f64 {
        self.log_odds(x)
    }

    fn classify(&self, x: &SparseVector) -> Label {
        let (pos, neg) = self.log_joint(x);
        // Each summand carries a few ulps of error from ln and the product;
        // outside this bound the sign of pos - neg is certain.
        let magnitude = self.log_prior_pos.abs()
            + self.log_prior_neg.abs()
            + x.iter()
                .map(|(i, c)| c as f64 * (self.log_prob_pos[i].abs() + self.log_prob_neg[i].abs()))
                .sum::<f64>();
        let bound = 8.0 * (x.nnz() as f64 + 2.0) * f64::EPSILON * magnitude;
        let positive = if (pos - neg).abs() > bound {
            pos > neg
        } else {
            self.exact_compare(x) == Ordering::Greater
        };
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(d: &[u32]) -> SparseVector {
        SparseVector::from_dense(d)
    }

    #[test]
    fn laplace_by_hand() {
        // pos = {a:1}, neg = {b:1}, D = 2, alpha = 1:
        // p(a|pos) = (1+1)/(2+1) = 2/3, p(b|pos) = (1+0)/(2+1) = 1/3.
        let m = train(
            &[v(&[1, 0]), v(&[0, 1])],
            &[Label::Positive, Label::Negative],
            &NbParams::default(),
        )
        .unwrap();
        let lp = m.feature_log_probs(Label::Positive);
        assert!((lp[0].exp() - 2.0 / 3.0).abs() < 1e-15);
        assert!((lp[1].exp() - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.log_priors().0.exp() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identical_classes_identical_parameters() {
        let xs = [v(&[2, 1, 0]), v(&[2, 1, 0])];
        let m = train(
            &xs,
            &[Label::Positive, Label::Negative],
            &NbParams::default(),
        )
        .unwrap();
        assert_eq!(
            m.feature_log_probs(Label::Positive),
            m.feature_log_probs(Label::Negative)
        );
    }

    #[test]
    fn heavy_smoothing_flattens() {
        let xs = [v(&[9, 0, 0, 1]), v(&[0, 5, 3, 0])];
        let m = train(
            &xs,
            &[Label::Positive, Label::Negative],
            &NbParams { alpha: 1e6 },
        )
        .unwrap();
        for label in [Label::Positive, Label::Negative] {
            for lp in m.feature_log_probs(label) {
                assert!((lp.exp() - 0.25).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn distributions_normalised() {
        let xs = [
            v(&[3, 0, 1, 0, 7]),
            v(&[0, 2, 0, 4, 0]),
            v(&[1, 1, 1, 1, 1]),
        ];
        let ys = [Label::Positive, Label::Negative, Label::Negative];
        let m = train(&xs, &ys, &NbParams { alpha: 0.5 }).unwrap();
        for label in [Label::Positive, Label::Negative] {
            let s: f64 = m.feature_log_probs(label).iter().map(|l| l.exp()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        let (a, b) = m.log_priors();
        assert!((a.exp() + b.exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vector_gives_priors() {
        let xs = [v(&[1, 0]), v(&[0, 1]), v(&[0, 1])];
        let m = train(
            &xs,
            &[Label::Positive, Label::Negative, Label::Negative],
            &NbParams::default(),
        )
        .unwrap();
        let (p, n) = m.posteriors(&SparseVector::zeros(2));
        assert!((p - 1.0 / 3.0).abs() < 1e-15 && (n - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.classify(&SparseVector::zeros(2)), Label::Negative);
    }

    #[test]
    fn bayes_rule_two_to_one() {
        // Hand-set parameters: equal priors, p(t|pos) = 2 p(t|neg).
        // posterior(pos | {t:1}) = 0.5*0.4 / (0.5*0.4 + 0.5*0.2) = 2/3.
        // counts pos [1, 2] and neg [0, 3] give (2/5, 3/5) and (1/5, 4/5).
        let m = NaiveBayesModel::from_counts(1.0, [1, 1], vec![1, 2], vec![0, 3]).unwrap();
        assert!((m.posterior(&v(&[1, 0])) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tie_goes_negative() {
        let xs = [v(&[1, 0]), v(&[0, 1])];
        let m = train(
            &xs,
            &[Label::Positive, Label::Negative],
            &NbParams::default(),
        )
        .unwrap();
        assert_eq!(m.classify(&v(&[1, 1])), Label::Negative);
        assert_eq!(m.classify(&v(&[2, 1])), Label::Positive);
    }

    #[test]
    fn exact_ties_broken_exactly() {
        // Mirror-image classes: any palindromic x is an exact tie, which the
        // log sums need not reproduce bit for bit.
        let xs = [v(&[3, 0, 1, 0, 0, 1, 0]), v(&[0, 1, 0, 0, 1, 0, 3])];
        let m = train(
            &xs,
            &[Label::Positive, Label::Negative],
            &NbParams::default(),
        )
        .unwrap();
        for x in [
            [0, 1, 0, 1, 0, 1, 0],
            [1, 1, 0, 5, 0, 1, 1],
            [2, 0, 3, 0, 3, 0, 2],
        ] {
            assert_eq!(m.exact_compare(&v(&x)), Ordering::Equal);
            assert_eq!(m.classify(&v(&x)), Label::Negative);
        }
        assert_eq!(m.classify(&v(&[1, 0, 0, 0, 0, 0, 0])), Label::Positive);
        assert_eq!(
            m.exact_compare(&v(&[1, 0, 0, 0, 0, 0, 0])),
            Ordering::Greater
        );
    }

    #[test]
    fn dyadic_decomposition() {
        assert_eq!(dyadic(1.0), (BigUint::from(1u64 << 52), 52));
        assert_eq!(dyadic(0.5), (BigUint::from(1u64 << 52), 53));
        assert_eq!(
            dyadic(2f64.powi(60)),
            (BigUint::from(1u64 << 52) << 8u32, 0)
        );
        let (m, k) = dyadic(0.1);
        assert_eq!(
            m.to_string().parse::<f64>().unwrap() / 2f64.powi(k as i32),
            0.1
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            train(&[v(&[1])], &[Label::Positive], &NbParams::default()),
            Err(ModelError::SingleClass(_))
        ));
        assert!(train(
            &[v(&[1]), v(&[1])],
            &[Label::Positive, Label::Negative],
            &NbParams { alpha: 0.0 }
        )
        .is_err());
    }
}
