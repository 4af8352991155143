//! Bag-of-words features: tokenizer, n-gram vocabulary and sparse count vectors.

mod frequency;
mod sparse;
mod vocab;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use frequency::{class_frequency_report, FrequencyReport, FrequencyRow};
pub use sparse::SparseVector;
pub use vocab::Vocabulary;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("invalid n-gram range {low}-{high} (need 1 <= low <= high <= 2)")]
    InvalidRange { low: usize, high: usize },
    #[error("unrecognised n-gram mode {0:?} (expected 1, 1-2 or 2)")]
    UnknownMode(String),
    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),
    #[error("vocabulary file, line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Tokenization settings. Tokens are maximal runs of at least two
/// alphanumeric or underscore characters; everything else separates tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenRule {
    pub lowercase: bool,
}

impl Default for TokenRule {
    fn default() -> Self {
        TokenRule { lowercase: true }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits `text` into tokens according to `rule`.
pub fn tokenize(text: &str, rule: TokenRule) -> Vec<String> {
    let lowered;
    let text = if rule.lowercase {
        lowered = text.to_lowercase();
        lowered.as_str()
    } else {
        text
    };
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    let mut chars = 0usize;
    for (i, c) in text.char_indices() {
        if is_word_char(c) {
            if start.is_none() {
                start = Some(i);
                chars = 0;
            }
            chars += 1;
        } else if let Some(s) = start.take() {
            if chars >= 2 {
                tokens.push(text[s..i].to_string());
            }
        }
    }
    if let Some(s) = start {
        if chars >= 2 {
            tokens.push(text[s..].to_string());
        }
    }
    tokens
}

/// Inclusive range of n-gram sizes; only unigrams and bigrams are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NgramRange {
    low: usize,
    high: usize,
}

impl NgramRange {
    pub const UNIGRAMS: NgramRange = NgramRange { low: 1, high: 1 };
    pub const UNI_AND_BIGRAMS: NgramRange = NgramRange { low: 1, high: 2 };
    pub const BIGRAMS: NgramRange = NgramRange { low: 2, high: 2 };

    pub fn new(low: usize, high: usize) -> Result<Self, FeatureError> {
        if low < 1 || low > high || high > 2 {
            return Err(FeatureError::InvalidRange { low, high });
        }
        Ok(NgramRange { low, high })
    }

    pub fn low(&self) -> usize {
        self.low
    }

    pub fn high(&self) -> usize {
        self.high
    }

    /// Space-joined n-grams of every size in range, shorter sizes first.
    pub fn ngrams(&self, tokens: &[String]) -> Vec<String> {
        let mut out = Vec::new();
        for n in self.low..=self.high {
            if tokens.len() < n {
                break;
            }
            out.extend(tokens.windows(n).map(|w| w.join(" ")));
        }
        out
    }
}

impl Default for NgramRange {
    fn default() -> Self {
        NgramRange::UNIGRAMS
    }
}

impl fmt::Display for NgramRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.low == self.high {
            write!(f, "{}", self.low)
        } else {
            write!(f, "{}-{}", self.low, self.high)
        }
    }
}

impl FromStr for NgramRange {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| FeatureError::UnknownMode(s.to_string()))
        };
        match s.split_once('-') {
            Some((a, b)) => NgramRange::new(parse(a)?, parse(b)?),
            None => {
                let n = parse(s)?;
                NgramRange::new(n, n)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text, TokenRule::default())
    }

    #[test]
    fn bag_of_words_sentence() {
        assert_eq!(
            toks("the dog is on the table"),
            ["the", "dog", "is", "on", "the", "table"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(toks("").is_empty());
    }

    #[test]
    fn single_characters_dropped() {
        // "I" and "X" are one character long.
        assert_eq!(
            toks("I was diagnosed with X today"),
            ["was", "diagnosed", "with", "today"]
        );
    }

    #[test]
    fn punctuation_and_unicode() {
        assert_eq!(
            toks("Can't STOP! #sad_day @me café, naïve 2017"),
            ["can", "stop", "sad_day", "me", "café", "naïve", "2017"]
        );
        let rule = TokenRule { lowercase: false };
        assert_eq!(tokenize("Hello World", rule), ["Hello", "World"]);
    }

    #[test]
    fn ngram_modes() {
        assert_eq!("1".parse::<NgramRange>().unwrap(), NgramRange::UNIGRAMS);
        assert_eq!(
            "1-2".parse::<NgramRange>().unwrap(),
            NgramRange::UNI_AND_BIGRAMS
        );
        assert_eq!("2".parse::<NgramRange>().unwrap(), NgramRange::BIGRAMS);
        assert!("3".parse::<NgramRange>().is_err());
        assert!("2-1".parse::<NgramRange>().is_err());
        assert!("x".parse::<NgramRange>().is_err());
        let t = toks("a bb cc dd");
        assert_eq!(
            NgramRange::UNI_AND_BIGRAMS.ngrams(&t),
            ["bb", "cc", "dd", "bb cc", "cc dd"]
        );
        assert_eq!(
            NgramRange::BIGRAMS.ngrams(&toks("alone")),
            Vec::<String>::new()
        );
    }

    proptest! {
        #[test]
        fn tokens_have_at_least_two_chars(text in "\\PC{0,60}") {
            for t in toks(&text) {
                prop_assert!(t.chars().count() >= 2);
                prop_assert!(t.chars().all(is_word_char));
            }
        }

        #[test]
        fn lowercasing_is_idempotent(text in "\\PC{0,60}") {
            prop_assert_eq!(toks(&text.to_lowercase()), toks(&text));
        }
    }
}
