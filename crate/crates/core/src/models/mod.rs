//! Binary classifiers over sparse count vectors.
//!
//! Every model exposes the same [`Classifier`] surface. Ties always resolve
//! to [`Label::Negative`] (the control class).

pub mod logistic;
pub mod naive_bayes;
mod persist;
pub mod ridge;
pub mod svm;
pub mod tree;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::corpus::Label;
use crate::features::SparseVector;

pub use logistic::{LogisticModel, LogisticObjective, LogisticParams};
pub use naive_bayes::{NaiveBayesModel, NbParams};
pub use ridge::{RidgeModel, RidgeParams};
pub use svm::{SvmModel, SvmParams};
pub use tree::{DecisionTreeModel, TreeNode, TreeParams};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training set is empty")]
    Empty,
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("training set contains only {0} documents; both classes are required")]
    SingleClass(Label),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("not a model file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown model kind tag {0:?}")]
    UnknownKind(String),
    #[error("model file is truncated")]
    Truncated,
    #[error("model file checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    Checksum { stored: u32, computed: u32 },
    #[error("malformed model file: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Uniform scoring interface shared by all trained models.
pub trait Classifier {
    /// Feature-space dimension the model was trained on.
    fn dimension(&self) -> usize;

    /// Model-native score: posterior probability for naive Bayes and logistic
    /// regression, signed margin for SVM and ridge, leaf positive fraction for
    /// the tree.
    fn score(&self, x: &SparseVector) -> f64;

    /// Unbounded score, monotone in [`Classifier::score`], used for ranking
    /// (ROC). Probabilistic models return log-odds here so that saturated
    /// probabilities do not collapse into ties.
    fn ranking_score(&self, x: &SparseVector) -> f64 {
        self.score(x)
    }

    fn classify(&self, x: &SparseVector) -> Label;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    NaiveBayes,
    Logistic,
    Svm,
    Ridge,
    Tree,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::NaiveBayes,
        ModelKind::Logistic,
        ModelKind::Svm,
        ModelKind::Ridge,
        ModelKind::Tree,
    ];

    /// Short name used on the command line.
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "nb",
            ModelKind::Logistic => "logreg",
            ModelKind::Svm => "svm",
            ModelKind::Ridge => "ridge",
            ModelKind::Tree => "tree",
        }
    }

    /// Name used in classification reports.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "Naive Bayes",
            ModelKind::Logistic => "Logistic Regression",
            ModelKind::Svm => "Linear Support Vector Classifier",
            ModelKind::Ridge => "Ridge Classifier",
            ModelKind::Tree => "Decision Trees",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| ModelError::UnknownKind(s.to_string()))
    }
}

/// Optimizer outcome reported alongside a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitInfo {
    pub iterations: usize,
    pub converged: bool,
    /// Final training objective (0 for models without one).
    pub objective: f64,
    /// Objective after initialisation and after every accepted iteration.
    pub history: Vec<f64>,
}

impl FitInfo {
    pub(crate) fn closed_form() -> Self {
        FitInfo {
            iterations: 0,
            converged: true,
            objective: 0.0,
            history: Vec::new(),
        }
    }
}

/// Hyperparameters for one model kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    NaiveBayes(NbParams),
    Logistic(LogisticParams),
    Svm(SvmParams),
    Ridge(RidgeParams),
    Tree(TreeParams),
}

impl ModelConfig {
    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::NaiveBayes => ModelConfig::NaiveBayes(NbParams::default()),
            ModelKind::Logistic => ModelConfig::Logistic(LogisticParams::default()),
            ModelKind::Svm => ModelConfig::Svm(SvmParams::default()),
            ModelKind::Ridge => ModelConfig::Ridge(RidgeParams::default()),
            ModelKind::Tree => ModelConfig::Tree(TreeParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::NaiveBayes(_) => ModelKind::NaiveBayes,
            ModelConfig::Logistic(_) => ModelKind::Logistic,
            ModelConfig::Svm(_) => ModelKind::Svm,
            ModelConfig::Ridge(_) => ModelKind::Ridge,
            ModelConfig::Tree(_) => ModelKind::Tree,
        }
    }

    pub fn train(
        &self,
        xs: &[SparseVector],
        ys: &[Label],
    ) -> Result<(TrainedModel, FitInfo), ModelError> {
        Ok(match self {
            ModelConfig::NaiveBayes(p) => (
                TrainedModel::NaiveBayes(naive_bayes::train(xs, ys, p)?),
                FitInfo::closed_form(),
            ),
            ModelConfig::Logistic(p) => {
                let (m, info) = logistic::train(xs, ys, p)?;
                (TrainedModel::Logistic(m), info)
            }
            ModelConfig::Svm(p) => {
                let (m, info) = svm::train(xs, ys, p)?;
                (TrainedModel::Svm(m), info)
            }
            ModelConfig::Ridge(p) => {
                let (m, info) = ridge::train(xs, ys, p)?;
                (TrainedModel::Ridge(m), info)
            }
            ModelConfig::Tree(p) => {
                let (m, _) = tree::train(xs, ys, p)?;
                (TrainedModel::Tree(m), FitInfo::closed_form())
            }
        })
    }
}

/// Any of the five trained models.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    NaiveBayes(NaiveBayesModel),
    Logistic(LogisticModel),
    Svm(SvmModel),
    Ridge(RidgeModel),
    Tree(DecisionTreeModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::NaiveBayes(_) => ModelKind::NaiveBayes,
            TrainedModel::Logistic(_) => ModelKind::Logistic,
            TrainedModel::Svm(_) => ModelKind::Svm,
            TrainedModel::Ridge(_) => ModelKind::Ridge,
            TrainedModel::Tree(_) => ModelKind::Tree,
        }
    }

    fn inner(&self) -> &dyn Classifier {
        match self {
            TrainedModel::NaiveBayes(m) => m,
            TrainedModel::Logistic(m) => m,
            TrainedModel::Svm(m) => m,
            TrainedModel::Ridge(m) => m,
            TrainedModel::Tree(m) => m,
        }
    }

    pub fn check_dimension(&self, x: &SparseVector) -> Result<(), ModelError> {
        if x.dim() != self.dimension() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dimension(),
                found: x.dim(),
            });
        }
        Ok(())
    }
}

impl Classifier for TrainedModel {
    fn dimension(&self) -> usize {
        self.inner().dimension()
    }

    fn score(&self, x: &SparseVector) -> f64 {
        self.inner().score(x)
    }

    fn ranking_score(&self, x: &SparseVector) -> f64 {
        self.inner().ranking_score(x)
    }

    fn classify(&self, x: &SparseVector) -> Label {
        self.inner().classify(x)
    }
}

/// Validates a training set and returns its dimension.
pub(crate) fn check_training_set(
    xs: &[SparseVector],
    ys: &[Label],
    need_both_classes: bool,
) -> Result<usize, ModelError> {
    if xs.len() != ys.len() {
        return Err(ModelError::LengthMismatch {
            features: xs.len(),
            labels: ys.len(),
        });
    }
    let Some(first) = xs.first() else {
        return Err(ModelError::Empty);
    };
    let dim = first.dim();
    if let Some(bad) = xs.iter().find(|x| x.dim() != dim) {
        return Err(ModelError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    if need_both_classes {
        let positives = ys.iter().filter(|l| l.is_positive()).count();
        if positives == 0 {
            return Err(ModelError::SingleClass(Label::Negative));
        }
        if positives == ys.len() {
            return Err(ModelError::SingleClass(Label::Positive));
        }
    }
    Ok(dim)
}

/// Training-set positions sorted by content, so that optimizers visiting
/// samples in this order produce identical results for any permutation of
/// the same training set.
pub(crate) fn canonical_order(xs: &[SparseVector], ys: &[Label]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| ys[a].cmp(&ys[b]).then_with(|| xs[a].cmp(&xs[b])));
    order
}

/// Logistic function, evaluated without overflow for any finite input.
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
