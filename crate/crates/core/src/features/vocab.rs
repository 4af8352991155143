use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use rayon::prelude::*;

use super::{tokenize, FeatureError, NgramRange, SparseVector, TokenRule};
use crate::corpus::{Corpus, Document};

const HEADER_TAG: &str = "bowclf-vocabulary";
const FORMAT_VERSION: u32 = 1;

/// Bijective map from n-gram to feature index. Indices follow the byte-wise
/// lexicographic order of the n-grams, so a vocabulary depends only on the
/// set of n-grams it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    rule: TokenRule,
    range: NgramRange,
    terms: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    fn from_sorted_terms(rule: TokenRule, range: NgramRange, terms: Vec<String>) -> Self {
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary {
            rule,
            range,
            terms,
            index,
        }
    }

    /// Every n-gram occurring at least once in `texts`.
    pub fn build<'a, I>(texts: I, rule: TokenRule, range: NgramRange) -> Self
    where
        I: IntoParallelIterator<Item = &'a str>,
    {
        let set: BTreeSet<String> = texts
            .into_par_iter()
            .fold(BTreeSet::new, |mut acc, text| {
                acc.extend(range.ngrams(&tokenize(text, rule)));
                acc
            })
            .reduce(BTreeSet::new, |mut a, mut b| {
                if a.len() < b.len() {
                    std::mem::swap(&mut a, &mut b);
                }
                a.extend(b);
                a
            });
        Self::from_sorted_terms(rule, range, set.into_iter().collect())
    }

    pub fn from_corpus(corpus: &Corpus, rule: TokenRule, range: NgramRange) -> Self {
        let texts: Vec<&str> = corpus.iter().map(|d| d.text.as_str()).collect();
        Self::build(texts, rule, range)
    }

    pub fn rule(&self) -> TokenRule {
        self.rule
    }

    pub fn ngram_range(&self) -> NgramRange {
        self.range
    }

    /// Dimension D of the feature space.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, ngram: &str) -> Option<usize> {
        self.index.get(ngram).map(|&i| i as usize)
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Counts of in-vocabulary n-grams of `text`; unknown n-grams are ignored.
    pub fn vectorize_text(&self, text: &str) -> SparseVector {
        let occurrences = self
            .range
            .ngrams(&tokenize(text, self.rule))
            .iter()
            .filter_map(|g| self.index.get(g).copied())
            .collect();
        SparseVector::from_occurrences(self.len(), occurrences)
    }

    pub fn vectorize(&self, doc: &Document) -> SparseVector {
        self.vectorize_text(&doc.text)
    }

    pub fn vectorize_corpus(&self, corpus: &Corpus) -> Vec<SparseVector> {
        corpus
            .documents()
            .par_iter()
            .map(|d| self.vectorize(d))
            .collect()
    }

    /// Writes the versioned text format: a header line followed by one
    /// `index<TAB>ngram` line per entry.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "{HEADER_TAG}\tv{FORMAT_VERSION}\tlowercase={}\tngram_range={}-{}\tdim={}",
            self.rule.lowercase,
            self.range.low(),
            self.range.high(),
            self.len()
        )?;
        for (i, t) in self.terms.iter().enumerate() {
            writeln!(w, "{i}\t{t}")?;
        }
        w.flush()
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self, FeatureError> {
        let err = |line: usize, message: String| FeatureError::Format { line, message };
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| err(1, "empty file".into()))??;
        let fields: Vec<&str> = header.split('\t').collect();
        if fields.len() != 5 || fields[0] != HEADER_TAG {
            return Err(err(1, format!("not a vocabulary header: {header:?}")));
        }
        if fields[1] != format!("v{FORMAT_VERSION}") {
            return Err(err(1, format!("unsupported version {}", fields[1])));
        }
        let value = |field: &str, key: &str| -> Result<String, FeatureError> {
            field
                .strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .map(str::to_string)
                .ok_or_else(|| err(1, format!("expected {key}=...")))
        };
        let lowercase: bool = value(fields[2], "lowercase")?
            .parse()
            .map_err(|_| err(1, "bad lowercase flag".into()))?;
        let range: NgramRange = value(fields[3], "ngram_range")?
            .parse()
            .map_err(|e: FeatureError| err(1, e.to_string()))?;
        let dim: usize = value(fields[4], "dim")?
            .parse()
            .map_err(|_| err(1, "bad dim".into()))?;

        let mut terms = Vec::with_capacity(dim);
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let line = line?;
            let (idx, term) = line
                .split_once('\t')
                .ok_or_else(|| err(line_no, "expected index<TAB>ngram".into()))?;
            if idx.parse::<usize>().ok() != Some(terms.len()) {
                return Err(err(
                    line_no,
                    format!("expected index {}, found {idx:?}", terms.len()),
                ));
            }
            if terms
                .last()
                .is_some_and(|prev: &String| prev.as_str() >= term)
            {
                return Err(err(
                    line_no,
                    "n-grams are not in strictly ascending order".into(),
                ));
            }
            terms.push(term.to_string());
        }
        if terms.len() != dim {
            return Err(err(
                terms.len() + 2,
                format!("header says dim={dim}, found {} entries", terms.len()),
            ));
        }
        Ok(Self::from_sorted_terms(
            TokenRule { lowercase },
            range,
            terms,
        ))
    }
}
