//! Bag-of-words text classification for document-level screening.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] ingests labeled documents (JSONL / CSV), plans stratified
//!   cross-validation folds and synthesizes corpora from known multinomials.
//! * [`features`] tokenizes text and turns documents into sparse n-gram
//!   count vectors over a canonically ordered vocabulary.
//! * [`models`] trains and applies five binary classifiers (multinomial naive
//!   Bayes, logistic regression, linear SVM, ridge, decision tree) and
//!   persists them in a checksummed binary format.
//! * [`eval`] computes precision / recall / F1 / accuracy, ROC curves, AUC
//!   (trapezoid and pairwise) and runs k-fold cross-validation.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod models;

pub use corpus::{Corpus, CorpusError, Document, FoldPlan, Label};
pub use eval::{cross_validate, AucEstimate, ClassificationReport, ConfusionCounts, RocCurve};
pub use features::{NgramRange, SparseVector, TokenRule, Vocabulary};
pub use models::{Classifier, ModelConfig, ModelKind, TrainedModel};
