//! L2-regularised logistic regression trained by full-batch gradient descent
//! with a backtracking (Armijo) line search.
//!
//! Objective: `(1/n) sum_i [softplus(z_i) - y_i z_i] + (lambda/2) ||w||^2`,
//! `z_i = b + w.x_i`, `y_i in {0, 1}`. The bias is not regularised.

use super::{canonical_order, check_training_set, sigmoid, Classifier, FitInfo, ModelError};
use crate::corpus::Label;
use crate::features::SparseVector;

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticParams {
    pub lambda: f64,
    pub max_iter: usize,
    /// Stop once the gradient's Euclidean norm falls to this value.
    pub tol: f64,
    /// Decision threshold on F(x); F(x) == threshold classifies as negative.
    pub threshold: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            lambda: 1.0,
            max_iter: 500,
            tol: 1e-6,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: f64,
    pub(crate) lambda: f64,
    pub(crate) threshold: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Regularised average log-loss over a fixed training set.
pub struct LogisticObjective<'a> {
    xs: &'a [SparseVector],
    targets: Vec<f64>,
    order: Vec<usize>,
    lambda: f64,
    dim: usize,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(xs: &'a [SparseVector], ys: &[Label], lambda: f64) -> Result<Self, ModelError> {
        let dim = check_training_set(xs, ys, false)?;
        Ok(LogisticObjective {
            xs,
            targets: ys
                .iter()
                .map(|y| if y.is_positive() { 1.0 } else { 0.0 })
                .collect(),
            order: canonical_order(xs, ys),
            lambda,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, weights: &[f64], bias: f64) -> f64 {
        let n = self.xs.len() as f64;
        let loss: f64 = self
            .order
            .iter()
            .map(|&i| {
                let z = bias + self.xs[i].dot(weights);
                softplus(z) - self.targets[i] * z
            })
            .sum();
        let reg: f64 = weights.iter().map(|w| w * w).sum();
        loss / n + 0.5 * self.lambda * reg
    }

    /// Analytic gradient `(dL/dw, dL/db)`.
    pub fn gradient(&self, weights: &[f64], bias: f64) -> (Vec<f64>, f64) {
        let n = self.xs.len() as f64;
        let mut grad = vec![0.0; self.dim];
        let mut grad_b = 0.0;
        for &i in &self.order {
            let x = &self.xs[i];
            let residual = sigmoid(bias + x.dot(weights)) - self.targets[i];
            x.add_scaled_to(&mut grad, residual / n);
            grad_b += residual;
        }
        for (g, w) in grad.iter_mut().zip(weights) {
            *g += self.lambda * w;
        }
        (grad, grad_b / n)
    }
}

pub fn train(
    xs: &[SparseVector],
    ys: &[Label],
    params: &LogisticParams,
) -> Result<(LogisticModel, FitInfo), ModelError> {
    check_training_set(xs, ys, true)?;
    if !(params.lambda.is_finite() && params.lambda >= 0.0) {
        return Err(ModelError::InvalidHyperparameter(format!(
            "lambda must be >= 0, got {}",
            params.lambda
        )));
    }
    if !(params.threshold > 0.0 && params.threshold < 1.0) {
        return Err(ModelError::InvalidHyperparameter(format!(
            "threshold must lie in (0, 1), got {}",
            params.threshold
        )));
    }
    let objective = LogisticObjective::new(xs, ys, params.lambda)?;
    let mut w = vec![0.0; objective.dim()];
    let mut b = 0.0;
    let mut f = objective.value(&w, b);
    let mut history = vec![f];
    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < params.max_iter {
        let (gw, gb) = objective.gradient(&w, b);
        let grad_sq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        if grad_sq.sqrt() <= params.tol {
            converged = true;
            break;
        }
        // Backtracking line search, starting from twice the last accepted step.
        step *= 2.0;
        let mut accepted = None;
        while step >= MIN_STEP {
            let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - step * gi).collect();
            let cand_b = b - step * gb;
            let cand_f = objective.value(&cand_w, cand_b);
            if cand_f <= f - ARMIJO_C * step * grad_sq {
                accepted = Some((cand_w, cand_b, cand_f));
                break;
            }
            step *= 0.5;
        }
        let Some((nw, nb, nf)) = accepted else {
            break;
        };
        w = nw;
        b = nb;
        f = nf;
        history.push(f);
        iterations += 1;
    }
    if !converged && iterations == params.max_iter {
        let (gw, gb) = objective.gradient(&w, b);
        let norm = (gw.iter().map(|g| g * g).sum::<f64>() + gb * gb).sqrt();
        converged = norm <= params.tol;
    }
    Ok((
        LogisticModel {
            weights: w,
            bias: b,
            lambda: params.lambda,
            threshold: params.threshold,
        },
        FitInfo {
            iterations,
            converged,
            objective: f,
            history,
        },
    ))
}

impl LogisticModel {
    pub fn new(weights: Vec<f64>, bias: f64, lambda: f64, threshold: f64) -> Self {
        LogisticModel {
            weights,
            bias,
            lambda,
            threshold,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    /// Linear predictor `b + w.x`.
    pub fn linear(&self, x: &SparseVector) -> f64 {
        self.bias + x.dot(&self.weights)
    }

    /// F(x) = 1 / (1 + exp(-(b + w.x))), kept strictly inside (0, 1).
    pub fn probability(&self, x: &SparseVector) -> f64 {
        sigmoid(self.linear(x)).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
    }
}

impl Classifier for LogisticModel {
    fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn score(&self, x: &SparseVector) -> f64 {
        self.probability(x)
    }

    fn ranking_score(&self, x: &SparseVector) -> f64 {
        self.linear(x)
    }

    fn classify(&self, x: &SparseVector) -> Label {
        if self.probability(x) > self.threshold {
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
    fn zero_model_scores_half() {
        let m = LogisticModel::new(vec![0.0; 3], 0.0, 1.0, 0.5);
        assert_eq!(m.probability(&v(&[4, 0, 9])), 0.5);
        // F(x) == threshold is a tie: negative.
        assert_eq!(m.classify(&v(&[4, 0, 9])), Label::Negative);
    }

    #[test]
    fn saturation_without_overflow() {
        let m = LogisticModel::new(vec![1.0], 0.0, 1.0, 0.5);
        let p = m.probability(&v(&[40]));
        assert!((1.0 - 1e-12..1.0).contains(&p));
        let m = LogisticModel::new(vec![1.0], -1000.0, 1.0, 0.5);
        let p = m.probability(&SparseVector::zeros(1));
        assert!(p > 0.0 && p.is_finite());
        let m = LogisticModel::new(vec![1.0], 1000.0, 1.0, 0.5);
        assert!(m.probability(&SparseVector::zeros(1)) < 1.0);
    }

    #[test]
    fn one_active_feature() {
        // b = -1, w = 2, count 1: sigma(1) = 1 / (1 + e^-1) = 0.7310585786300049
        let m = LogisticModel::new(vec![2.0, 5.0], -1.0, 1.0, 0.5);
        assert!((m.probability(&v(&[1, 0])) - 0.731_058_578_630_004_9).abs() < 1e-15);
    }

    #[test]
    fn threshold_sweep_is_monotone() {
        let m = LogisticModel::new(vec![0.3, -0.2], 0.1, 1.0, 0.5);
        let xs: Vec<SparseVector> = (0..20).map(|i| v(&[i % 7, i % 5])).collect();
        let mut prev = usize::MAX;
        for t in 1..100 {
            let m = m.clone().with_threshold(t as f64 / 100.0);
            let positives = xs.iter().filter(|x| m.classify(x).is_positive()).count();
            assert!(positives <= prev);
            prev = positives;
        }
    }

    #[test]
    fn confident_score_is_positive() {
        // b = ln 9 gives F = 0.9
        let m = LogisticModel::new(vec![0.0], 9f64.ln(), 1.0, 0.5);
        assert!((m.probability(&SparseVector::zeros(1)) - 0.9).abs() < 1e-15);
        assert_eq!(m.classify(&SparseVector::zeros(1)), Label::Positive);
    }

    #[test]
    fn separable_with_regularisation() {
        let xs = [v(&[1]), v(&[2]), v(&[0]), v(&[0])];
        let ys = [
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Negative,
        ];
        let (m, info) = train(
            &xs,
            &ys,
            &LogisticParams {
                lambda: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.weights()[0].is_finite() && m.bias().is_finite());
        assert!(info.converged);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(m.classify(x), *y);
        }
    }

    #[test]
    fn label_flip_negates_parameters() {
        let xs = [
            v(&[1, 0, 2]),
            v(&[0, 1, 1]),
            v(&[2, 1, 0]),
            v(&[0, 0, 3]),
            v(&[1, 1, 1]),
        ];
        let ys = [
            Label::Positive,
            Label::Negative,
            Label::Positive,
            Label::Negative,
            Label::Negative,
        ];
        let flipped: Vec<Label> = ys.iter().map(|y| y.flip()).collect();
        let params = LogisticParams {
            lambda: 0.5,
            ..Default::default()
        };
        let (a, ia) = train(&xs, &ys, &params).unwrap();
        let (b, ib) = train(&xs, &flipped, &params).unwrap();
        assert!(ia.converged && ib.converged);
        for (wa, wb) in a.weights().iter().zip(b.weights()) {
            assert!((wa + wb).abs() < 1e-6, "{wa} vs {wb}");
        }
        assert!((a.bias() + b.bias()).abs() < 1e-6);
    }

    /// Minimiser of a convex function on [lo, hi] by golden-section search.
    fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let (a, b) = (hi - r * (hi - lo), lo + r * (hi - lo));
            if f(a) <= f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn single_feature_matches_golden_section() {
        // feature present only in the two positives; lambda = 1
        let xs = [v(&[1]), v(&[1]), v(&[0]), v(&[0])];
        let ys = [
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Negative,
        ];
        let softplus = |t: f64| {
            if t > 0.0 {
                t + (-t).exp().ln_1p()
            } else {
                t.exp().ln_1p()
            }
        };
        // average log-loss + (1/2) w^2, written out for these four points
        let loss = |w: f64, b: f64| 0.5 * (softplus(-(w + b)) + softplus(b)) + 0.5 * w * w;
        let profile = |w: f64| loss(w, golden(-20.0, 20.0, |b| loss(w, b)));
        let w_star = golden(-20.0, 20.0, profile);
        let b_star = golden(-20.0, 20.0, |b| loss(w_star, b));
        let (m, info) = train(&xs, &ys, &LogisticParams::default()).unwrap();
        assert!(info.converged);
        assert!(
            (m.weights()[0] - w_star).abs() <= 1e-4,
            "{} vs {w_star}",
            m.weights()[0]
        );
        assert!(
            (m.bias() - b_star).abs() <= 1e-4,
            "{} vs {b_star}",
            m.bias()
        );
    }

    #[test]
    fn max_iter_one_is_not_converged() {
        let xs = [v(&[1]), v(&[0])];
        let ys = [Label::Positive, Label::Negative];
        let (_, info) = train(
            &xs,
            &ys,
            &LogisticParams {
                max_iter: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!info.converged);
        assert_eq!(info.iterations, 1);
    }

    #[test]
    fn objective_never_increases() {
        let xs: Vec<SparseVector> = (0..30).map(|i| v(&[i % 3, (i * 7) % 4, i % 2])).collect();
        let ys: Vec<Label> = (0..30)
            .map(|i| {
                if (i * 5) % 3 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let (_, info) = train(
            &xs,
            &ys,
            &LogisticParams {
                lambda: 0.01,
                ..Default::default()
            },
        )
        .unwrap();
        for pair in info.history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn invalid_hyperparameters() {
        let xs = [v(&[1]), v(&[0])];
        let ys = [Label::Positive, Label::Negative];
        assert!(train(
            &xs,
            &ys,
            &LogisticParams {
                lambda: -1.0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(train(
            &xs,
            &ys,
            &LogisticParams {
                threshold: 1.0,
                ..Default::default()
            }
        )
        .is_err());
    }
}
