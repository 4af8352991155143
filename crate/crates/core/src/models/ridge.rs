//! Ridge classifier: least squares onto {-1, +1} targets with an L2 penalty
//! on the weights (the bias is unpenalised).
//!
//! Solves the normal equations
//!
//! ```text
//! [X'X + lambda I   X'1] [w]   [X'y]
//! [1'X              n  ] [b] = [1'y]
//! ```
//!
//! with conjugate gradients, using only sparse products with X.

use super::{canonical_order, check_training_set, Classifier, FitInfo, ModelError};
use crate::corpus::Label;
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeParams {
    pub lambda: f64,
    pub max_iter: usize,
    /// Relative residual `||r|| / ||rhs||` at which CG stops.
    pub tol: f64,
}

impl Default for RidgeParams {
    fn default() -> Self {
        RidgeParams {
            lambda: 1.0,
            max_iter: 10_000,
            tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub(crate) weights: Vec<f64>,
    pub(crate) bias: f64,
    pub(crate) lambda: f64,
}

struct NormalEquations<'a> {
    xs: &'a [SparseVector],
    order: Vec<usize>,
    lambda: f64,
    dim: usize,
}

impl NormalEquations<'_> {
    /// `A z` for `z = [w; b]`.
    fn apply(&self, z: &[f64]) -> Vec<f64> {
        let (w, b) = z.split_at(self.dim);
        let mut out = vec![0.0; self.dim + 1];
        for &i in &self.order {
            let x = &self.xs[i];
            let pred = x.dot(w) + b[0];
            x.add_scaled_to(&mut out[..self.dim], pred);
            out[self.dim] += pred;
        }
        for (o, wi) in out.iter_mut().zip(w) {
            *o += self.lambda * wi;
        }
        out
    }

    fn objective(&self, z: &[f64], targets: &[f64]) -> f64 {
        let (w, b) = z.split_at(self.dim);
        let sse: f64 = self
            .order
            .iter()
            .map(|&i| {
                let r = self.xs[i].dot(w) + b[0] - targets[i];
                r * r
            })
            .sum();
        sse + self.lambda * w.iter().map(|x| x * x).sum::<f64>()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train(
    xs: &[SparseVector],
    ys: &[Label],
    params: &RidgeParams,
) -> Result<(RidgeModel, FitInfo), ModelError> {
    let dim = check_training_set(xs, ys, true)?;
    if !(params.lambda.is_finite() && params.lambda > 0.0) {
        return Err(ModelError::InvalidHyperparameter(format!(
            "lambda must be > 0, got {}",
            params.lambda
        )));
    }
    let system = NormalEquations {
        xs,
        order: canonical_order(xs, ys),
        lambda: params.lambda,
        dim,
    };
    let targets: Vec<f64> = ys.iter().map(|y| y.sign()).collect();

    let mut rhs = vec![0.0; dim + 1];
    for &i in &system.order {
        xs[i].add_scaled_to(&mut rhs[..dim], targets[i]);
        rhs[dim] += targets[i];
    }
    let rhs_norm = dot(&rhs, &rhs).sqrt();

    let mut z = vec![0.0; dim + 1];
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut history = vec![system.objective(&z, &targets)];
    let mut converged = rr.sqrt() <= params.tol * rhs_norm;
    let mut iterations = 0;

    while !converged && iterations < params.max_iter {
        let ap = system.apply(&p);
        let curvature = dot(&p, &ap);
        if curvature <= 0.0 {
            break;
        }
        let alpha = rr / curvature;
        for (zi, pi) in z.iter_mut().zip(&p) {
            *zi += alpha * pi;
        }
        for (ri, api) in r.iter_mut().zip(&ap) {
            *ri -= alpha * api;
        }
        let rr_next = dot(&r, &r);
        iterations += 1;
        history.push(system.objective(&z, &targets));
        if rr_next.sqrt() <= params.tol * rhs_norm {
            converged = true;
            break;
        }
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_next;
    }

    let bias = z[dim];
    z.truncate(dim);
    Ok((
        RidgeModel {
            weights: z,
            bias,
            lambda: params.lambda,
        },
        FitInfo {
            iterations,
            converged,
            objective: *history.last().unwrap(),
            history,
        },
    ))
}

impl RidgeModel {
    pub fn new(weights: Vec<f64>, bias: f64, lambda: f64) -> Self {
        RidgeModel {
            weights,
            bias,
            lambda,
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

    /// `w.x + b`.
    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }
}

impl Classifier for RidgeModel {
    fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn score(&self, x: &SparseVector) -> f64 {
        self.decision(x)
    }

    fn classify(&self, x: &SparseVector) -> Label {
        if self.decision(x) > 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}
