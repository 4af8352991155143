//! Linear SVM, `min (1/2)||w||^2 + C sum_i max(0, 1 - y_i (w.x_i - b))`.
//!
//! The offset is unregularised, so the problem is split in two. For a fixed
//! `b` the weights come from dual coordinate descent over seeded permutations
//! of the training set: each sample's dual variable `0 <= a_i <= C` is
//! minimised exactly in turn while `w = sum_i a_i y_i x_i` is kept up to date.
//! The optimal value as a function of `b` is convex with subgradient
//! `sum_i a_i y_i`, so `b` is found by bracketing and bisecting on its sign.
//! The returned iterate is the best primal point seen, so the recorded
//! objective never increases.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{canonical_order, check_training_set, Classifier, FitInfo, ModelError};
use crate::corpus::Label;
use crate::features::SparseVector;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    /// Cap on dual coordinate-descent epochs for each offset tried; the
    /// dual variables carry over from one offset to the next.
    pub max_epochs: usize,
    /// Largest spread of projected dual gradients (in margin units) at which
    /// the weights for a given offset count as solved.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            max_epochs: 100,
            tol: 1e-3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub(crate) weights: Vec<f64>,
    pub(crate) offset: f64,
    pub(crate) c: f64,
}

fn objective(
    xs: &[SparseVector],
    signs: &[f64],
    order: &[usize],
    weights: &[f64],
    offset: f64,
    c: f64,
) -> f64 {
    let hinge: f64 = order
        .iter()
        .map(|&i| (1.0 - signs[i] * (xs[i].dot(weights) - offset)).max(0.0))
        .sum();
    0.5 * weights.iter().map(|w| w * w).sum::<f64>() + c * hinge
}

struct Dual<'a> {
    xs: &'a [SparseVector],
    signs: Vec<f64>,
    order: Vec<usize>,
    sq_norms: Vec<f64>,
    c: f64,
    alpha: Vec<f64>,
    w: Vec<f64>,
    rng: ChaCha8Rng,
    perm: Vec<usize>,
}

impl Dual<'_> {
    /// Coordinate descent for a fixed offset; true if the projected-gradient
    /// gap fell below `tol` within `max_epochs`.
    fn solve(&mut self, offset: f64, tol: f64, max_epochs: usize) -> bool {
        for _ in 0..max_epochs {
            self.perm.copy_from_slice(&self.order);
            self.perm.shuffle(&mut self.rng);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.perm {
                let y = self.signs[i];
                // gradient of the negated dual in a_i; the target margin is 1 + y b
                let g = y * self.xs[i].dot(&self.w) - (1.0 + y * offset);
                let a = self.alpha[i];
                let pg = if a <= 0.0 {
                    g.min(0.0)
                } else if a >= self.c {
                    g.max(0.0)
                } else {
                    g
                };
                lo = lo.min(pg);
                hi = hi.max(pg);
                if pg == 0.0 {
                    continue;
                }
                let next = if self.sq_norms[i] > 0.0 {
                    (a - g / self.sq_norms[i]).clamp(0.0, self.c)
                } else if g < 0.0 {
                    self.c
                } else {
                    0.0
                };
                if next != a {
                    self.xs[i].add_scaled_to(&mut self.w, (next - a) * y);
                    self.alpha[i] = next;
                }
            }
            if hi - lo <= tol {
                return true;
            }
        }
        false
    }

    /// Subgradient of the optimal value in the offset.
    fn slope(&self) -> f64 {
        self.order
            .iter()
            .map(|&i| self.alpha[i] * self.signs[i])
            .sum()
    }
}

/// Relative width at which the offset bracket stops shrinking.
const OFFSET_TOL: f64 = 1e-10;
const MAX_OFFSET_STEPS: usize = 200;

/// Best primal point over the offsets tried so far.
struct Search<'a> {
    dual: Dual<'a>,
    params: &'a SvmParams,
    best: (Vec<f64>, f64),
    value: f64,
    history: Vec<f64>,
    all_solved: bool,
}

impl Search<'_> {
    /// Solves for the weights at offset `b` and returns the slope there.
    fn probe(&mut self, b: f64) -> f64 {
        let d = &mut self.dual;
        self.all_solved &= d.solve(b, self.params.tol, self.params.max_epochs);
        let v = objective(d.xs, &d.signs, &d.order, &d.w, b, d.c);
        if v < self.value {
            self.value = v;
            self.best = (d.w.clone(), b);
        }
        self.history.push(self.value);
        d.slope()
    }

    /// Runs the offset search; true if it closed in on a root of the slope.
    fn run(&mut self) -> bool {
        // bracket first: slope > 0 means the optimum lies at smaller b
        let s0 = self.probe(0.0);
        if s0 == 0.0 {
            return true;
        }
        let dir = if s0 > 0.0 { -1.0 } else { 1.0 };
        let (mut b, mut s, mut step) = (0.0, s0, 1.0);
        let ((mut lo, mut s_lo), (mut hi, mut s_hi)) = loop {
            if step > 1e300 {
                return false;
            }
            let next = b + dir * step;
            let sn = self.probe(next);
            if sn == 0.0 {
                return true;
            }
            if (sn > 0.0) != (s0 > 0.0) {
                break if dir > 0.0 {
                    ((b, s), (next, sn))
                } else {
                    ((next, sn), (b, s))
                };
            }
            (b, s) = (next, sn);
            step *= 2.0;
        };
        // Illinois regula falsi on the slope, which increases with b
        let mut last_side = 0;
        for _ in 0..MAX_OFFSET_STEPS {
            if hi - lo <= OFFSET_TOL * (1.0 + lo.abs().max(hi.abs())) {
                return true;
            }
            let mut mid = lo - s_lo * (hi - lo) / (s_hi - s_lo);
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let s = self.probe(mid);
            if s == 0.0 {
                return true;
            }
            if s < 0.0 {
                (lo, s_lo) = (mid, s);
                if last_side == -1 {
                    s_hi *= 0.5;
                }
                last_side = -1;
            } else {
                (hi, s_hi) = (mid, s);
                if last_side == 1 {
                    s_lo *= 0.5;
                }
                last_side = 1;
            }
        }
        false
    }
}

pub fn train(
    xs: &[SparseVector],
    ys: &[Label],
    params: &SvmParams,
) -> Result<(SvmModel, FitInfo), ModelError> {
    let dim = check_training_set(xs, ys, true)?;
    let c = params.c;
    if !(c.is_finite() && c > 0.0) {
        return Err(ModelError::InvalidHyperparameter(format!(
            "C must be > 0, got {c}"
        )));
    }
    if !(params.tol.is_finite() && params.tol > 0.0) {
        return Err(ModelError::InvalidHyperparameter(format!(
            "tol must be > 0, got {}",
            params.tol
        )));
    }
    let order = canonical_order(xs, ys);
    let signs: Vec<f64> = ys.iter().map(|y| y.sign()).collect();
    let start = objective(xs, &signs, &order, &vec![0.0; dim], 0.0, c);
    let mut search = Search {
        dual: Dual {
            xs,
            sq_norms: xs.iter().map(|x| x.squared_norm()).collect(),
            signs,
            perm: order.clone(),
            order,
            c,
            alpha: vec![0.0; xs.len()],
            w: vec![0.0; dim],
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        },
        params,
        best: (vec![0.0; dim], 0.0),
        value: start,
        history: vec![start],
        all_solved: true,
    };
    let closed = search.run();
    let (weights, offset) = search.best;

    Ok((
        SvmModel { weights, offset, c },
        FitInfo {
            iterations: search.history.len() - 1,
            converged: closed && search.all_solved,
            objective: search.value,
            history: search.history,
        },
    ))
}

impl SvmModel {
    pub fn new(weights: Vec<f64>, offset: f64, c: f64) -> Self {
        SvmModel { weights, offset, c }
    }

    /// Normal vector `w` of the separating hyperplane `w.x - b = 0`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Offset `b` of the hyperplane `w.x - b = 0`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Decision value `w.x - b`.
    pub fn decision(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) - self.offset
    }
}

impl Classifier for SvmModel {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn v(d: &[u32]) -> SparseVector {
        SparseVector::from_dense(d)
    }

    #[test]
    fn zero_normal_scores_minus_offset() {
        let m = SvmModel::new(vec![0.0, 0.0], 0.75, 1.0);
        assert_eq!(m.score(&v(&[3, 1])), -0.75);
        assert_eq!(m.score(&SparseVector::zeros(2)), -0.75);
    }

    #[test]
    fn on_hyperplane_is_negative() {
        let m = SvmModel::new(vec![1.0, -1.0], 0.0, 1.0);
        assert_eq!(m.score(&v(&[2, 2])), 0.0);
        assert_eq!(m.classify(&v(&[2, 2])), Label::Negative);
        assert_eq!(m.classify(&v(&[3, 2])), Label::Positive);
    }

    #[test]
    fn linear_in_counts() {
        let m = SvmModel::new(vec![0.5, 2.0], 0.0, 1.0);
        assert_eq!(m.score(&v(&[0, 2])), 2.0 * m.score(&v(&[0, 1])));
    }

    #[test]
    fn objective_descends() {
        let xs: Vec<SparseVector> = (0..40).map(|i| v(&[i % 3, (i * 7) % 5, i % 2])).collect();
        let ys: Vec<Label> = (0..40)
            .map(|i| {
                if (i * 5) % 3 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let (_, info) = train(&xs, &ys, &SvmParams::default()).unwrap();
        assert!(info.history.windows(2).all(|p| p[1] <= p[0]));
        assert_eq!(info.objective, *info.history.last().unwrap());
    }

    #[test]
    fn two_point_max_margin() {
        // neg at e1, pos at e2: the hard-margin solution is w = (-1, 1), b = 0
        let xs = [v(&[1, 0]), v(&[0, 1])];
        let ys = [Label::Negative, Label::Positive];
        let (m, _) = train(
            &xs,
            &ys,
            &SvmParams {
                c: 1e3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            m.weights()[1] > 0.0 && m.weights()[0] < 0.0,
            "{:?}",
            m.weights()
        );
        assert!((m.weights()[1] - 1.0).abs() < 1e-3 && (m.weights()[0] + 1.0).abs() < 1e-3);
        assert!(m.offset().abs() <= 1e-3, "b = {}", m.offset());
    }

    #[test]
    fn mirrored_classes_have_zero_offset() {
        // every positive [a, b] has a negative twin [b, a]
        let pos = [[3, 0], [2, 1], [4, 1], [1, 0], [5, 2]];
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for [a, b] in pos {
            xs.extend([v(&[a, b]), v(&[b, a])]);
            ys.extend([Label::Positive, Label::Negative]);
        }
        // large C: the hard-margin problem, whose offset is unique
        let (m, info) = train(
            &xs,
            &ys,
            &SvmParams {
                c: 1e3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(
            m.offset().abs() <= 1e-3,
            "b = {} w = {:?} {info:?}",
            m.offset(),
            m.weights()
        );
        assert!((m.weights()[0] + m.weights()[1]).abs() <= 1e-3);
    }

    #[test]
    fn doubling_inputs_keeps_predictions() {
        let rows: Vec<[u32; 3]> = (0..30).map(|i| [i % 4, (i * 3) % 5, (i / 7) % 3]).collect();
        let ys: Vec<Label> = rows
            .iter()
            .map(|r| {
                if r[0] + 2 * r[2] > r[1] + 2 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let xs: Vec<SparseVector> = rows.iter().map(|r| v(r)).collect();
        let doubled: Vec<SparseVector> = rows.iter().map(|r| v(&r.map(|c| 2 * c))).collect();
        let p = SvmParams {
            c: 100.0,
            ..Default::default()
        };
        let (m1, _) = train(&xs, &ys, &p).unwrap();
        let (m2, _) = train(&doubled, &ys, &p).unwrap();
        let a: Vec<Label> = xs.iter().map(|x| m1.classify(x)).collect();
        let b: Vec<Label> = doubled.iter().map(|x| m2.classify(x)).collect();
        assert_eq!(a, b);
        assert_eq!(a, ys);
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
    fn matches_brute_force_on_one_feature() {
        // overlapping classes, so the soft-margin optimum is interior
        let counts = [
            (0, Label::Negative),
            (1, Label::Negative),
            (2, Label::Negative),
            (3, Label::Positive),
            (2, Label::Positive),
            (4, Label::Positive),
            (1, Label::Positive),
            (3, Label::Negative),
        ];
        let xs: Vec<SparseVector> = counts.iter().map(|&(c, _)| v(&[c])).collect();
        let ys: Vec<Label> = counts.iter().map(|&(_, y)| y).collect();
        let c = 0.7;
        let primal = |w: f64, b: f64| {
            0.5 * w * w
                + c * counts
                    .iter()
                    .map(|&(x, y)| (1.0 - y.sign() * (w * x as f64 - b)).max(0.0))
                    .sum::<f64>()
        };
        let inner = |w: f64| primal(w, golden(-50.0, 50.0, |b| primal(w, b)));
        let w_star = golden(-50.0, 50.0, inner);
        let oracle = inner(w_star);
        let (m, info) = train(
            &xs,
            &ys,
            &SvmParams {
                c,
                tol: 1e-9,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(info.converged);
        assert!(
            (info.objective - oracle).abs() <= 1e-6,
            "{} vs {oracle}",
            info.objective
        );
        assert!((primal(m.weights()[0], m.offset()) - info.objective).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_c() {
        let xs = [v(&[1]), v(&[0])];
        let ys = [Label::Positive, Label::Negative];
        assert!(train(
            &xs,
            &ys,
            &SvmParams {
                c: 0.0,
                ..Default::default()
            }
        )
        .is_err());
    }
}
