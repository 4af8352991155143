//! Labeled documents, ingestion, fold planning and synthetic corpora.

mod folds;
mod io;
pub mod synth;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use folds::{kfold, stratified_kfold, FoldPlan};
pub use io::{load_csv, load_jsonl, read_csv, read_jsonl, write_csv, write_jsonl};
pub use synth::{synthesize, BayesAccuracy, LengthModel, SynthSpec};

/// Binary class of a document. `Positive` is the screened-for ("depressed")
/// class, `Negative` the control class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub const POSITIVE_NAME: &'static str = "depressed";
    pub const NEGATIVE_NAME: &'static str = "control";

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Positive => Self::POSITIVE_NAME,
            Label::Negative => Self::NEGATIVE_NAME,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    /// `+1.0` for positive, `-1.0` for negative.
    pub fn sign(self) -> f64 {
        if self.is_positive() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown label {0:?} (expected \"depressed\" or \"control\")")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            Self::POSITIVE_NAME => Ok(Label::Positive),
            Self::NEGATIVE_NAME => Ok(Label::Negative),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Label,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub positive: usize,
    pub negative: usize,
}

impl ClassCounts {
    pub fn from_labels<'a>(labels: impl IntoIterator<Item = &'a Label>) -> Self {
        let mut counts = ClassCounts::default();
        for label in labels {
            match label {
                Label::Positive => counts.positive += 1,
                Label::Negative => counts.negative += 1,
            }
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative
    }

    pub fn get(&self, label: Label) -> usize {
        match label {
            Label::Positive => self.positive,
            Label::Negative => self.negative,
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Label {
        line: usize,
        #[source]
        source: UnknownLabel,
    },
    #[error("duplicate document id {id:?} (line {line})")]
    DuplicateId { id: String, line: usize },
    #[error("CSV schema error: {0}")]
    Schema(String),
    #[error("invalid fold request: {0}")]
    InvalidFolds(String),
    #[error("infeasible stratification: class {label} has {available} documents but k = {k}")]
    InfeasibleStratification {
        label: Label,
        available: usize,
        k: usize,
    },
    #[error("invalid synthesis spec: {0}")]
    InvalidSpec(String),
}

/// An ordered, immutable collection of documents with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    documents: Vec<Document>,
    counts: ClassCounts,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids. Line numbers in errors are
    /// 1-based document positions.
    pub fn new(documents: Vec<Document>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for (i, doc) in documents.iter().enumerate() {
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId {
                    id: doc.id.clone(),
                    line: i + 1,
                });
            }
        }
        let counts = ClassCounts::from_labels(documents.iter().map(|d| &d.label));
        Ok(Corpus { documents, counts })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn class_counts(&self) -> ClassCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.documents.iter().map(|d| d.label).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    /// Documents at the given positions, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        let documents: Vec<Document> = indices.iter().map(|&i| self.documents[i].clone()).collect();
        let counts = ClassCounts::from_labels(documents.iter().map(|d| &d.label));
        Corpus { documents, counts }
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.documents.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_round_trip() {
        assert_eq!("depressed".parse::<Label>().unwrap(), Label::Positive);
        assert_eq!("control".parse::<Label>().unwrap(), Label::Negative);
        assert!("ptsd".parse::<Label>().is_err());
        assert_eq!(Label::Positive.to_string(), "depressed");
    }

    #[test]
    fn counts_track_documents() {
        let corpus = Corpus::new(vec![
            Document::new("a", "x", Label::Positive),
            Document::new("b", "y", Label::Negative),
            Document::new("c", "", Label::Negative),
        ])
        .unwrap();
        let counts = corpus.class_counts();
        assert_eq!((counts.positive, counts.negative), (1, 2));
        assert_eq!(counts.total(), corpus.len());
        assert_eq!(ClassCounts::from_labels(corpus.labels().iter()), counts);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Corpus::new(vec![
            Document::new("a", "x", Label::Positive),
            Document::new("a", "y", Label::Negative),
        ])
        .unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn subset_recounts() {
        let corpus = Corpus::new(vec![
            Document::new("a", "x", Label::Positive),
            Document::new("b", "y", Label::Negative),
        ])
        .unwrap();
        let sub = corpus.subset(&[1]);
        assert_eq!(
            sub.class_counts(),
            ClassCounts {
                positive: 0,
                negative: 1
            }
        );
    }
}
