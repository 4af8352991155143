use std::cmp::Ordering;
use std::io::Write;

use super::{tokenize, Vocabulary};
use crate::corpus::{Corpus, Label};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyRow {
    pub ngram: String,
    pub positive: u64,
    pub negative: u64,
}

impl FrequencyRow {
    /// positive / negative; infinite when only the positive class uses the
    /// n-gram and 0 when neither does.
    pub fn ratio(&self) -> f64 {
        match (self.positive, self.negative) {
            (0, 0) => 0.0,
            (_, 0) => f64::INFINITY,
            (p, n) => p as f64 / n as f64,
        }
    }

    /// Exact ratio comparison by cross-multiplication.
    fn cmp_ratio(&self, other: &FrequencyRow) -> Ordering {
        // 0/0 sorts as 0/1
        let denom = |r: &FrequencyRow| {
            if r.positive == 0 && r.negative == 0 {
                1
            } else {
                r.negative
            }
        };
        let (da, db) = (denom(self), denom(other));
        if da == 0 && db == 0 {
            return Ordering::Equal;
        }
        (self.positive as u128 * db as u128).cmp(&(other.positive as u128 * da as u128))
    }
}

/// Per-class n-gram totals, ordered by descending positive/negative ratio with
/// lexicographic tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyReport {
    pub rows: Vec<FrequencyRow>,
}

pub fn class_frequency_report(corpus: &Corpus, vocab: &Vocabulary) -> FrequencyReport {
    let mut pos = vec![0u64; vocab.len()];
    let mut neg = vec![0u64; vocab.len()];
    for doc in corpus {
        let tally = match doc.label {
            Label::Positive => &mut pos,
            Label::Negative => &mut neg,
        };
        for gram in vocab
            .ngram_range()
            .ngrams(&tokenize(&doc.text, vocab.rule()))
        {
            if let Some(i) = vocab.get(&gram) {
                tally[i] += 1;
            }
        }
    }
    let mut rows: Vec<FrequencyRow> = vocab
        .terms()
        .iter()
        .enumerate()
        .map(|(i, t)| FrequencyRow {
            ngram: t.clone(),
            positive: pos[i],
            negative: neg[i],
        })
        .collect();
    rows.sort_by(|a, b| b.cmp_ratio(a).then_with(|| a.ngram.cmp(&b.ngram)));
    FrequencyReport { rows }
}

impl FrequencyReport {
    /// TSV with columns `ngram, count_depressed, count_control, ratio`,
    /// limited to the first `top` rows.
    pub fn write_tsv<W: Write>(&self, mut w: W, top: usize) -> std::io::Result<()> {
        writeln!(w, "ngram\tcount_depressed\tcount_control\tratio")?;
        for row in self.rows.iter().take(top) {
            let ratio = row.ratio();
            let ratio = if ratio.is_infinite() {
                "inf".to_string()
            } else {
                format!("{ratio:.6}")
            };
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                row.ngram, row.positive, row.negative, ratio
            )?;
        }
        w.flush()
    }
}
