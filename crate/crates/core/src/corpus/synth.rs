//! Synthetic corpora drawn from per-class multinomials.
//!
//! The vocabulary is laid out as three blocks: `vocab_shared` tokens named
//! `s0, s1, ...`, `vocab_pos_only` tokens `p0, ...` and `vocab_neg_only`
//! tokens `n0, ...`. The positive class may only put mass on the shared and
//! positive-only blocks, the negative class on the shared and negative-only
//! blocks. Every token is at least two characters long so it survives the
//! default tokenizer unchanged.
//!
//! Config keys (flat `key = value`, `#` comments):
//!
//! | key | meaning |
//! |-----|---------|
//! | `n_positive`, `n_negative` | documents per class |
//! | `vocab_shared`, `vocab_pos_only`, `vocab_neg_only` | block sizes |
//! | `doc_length_mean` | mean tokens per document (>= 1) |
//! | `length_model` | `poisson` (1 + Poisson(mean - 1), default) or `fixed` |
//! | `positive_distribution`, `negative_distribution` | see [`ClassDistribution`] |
//! | `seed` | RNG seed (default 0) |

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;

use super::{Corpus, CorpusError, Document, Label};

const SUM_TOLERANCE: f64 = 1e-12;
const MAX_ENUMERATED_OUTCOMES: f64 = 2.0e6;
const MONTE_CARLO_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthModel {
    /// `1 + Poisson(mean - 1)`: never empty, mean equal to `doc_length_mean`.
    Poisson,
    /// Every document has exactly `doc_length_mean` tokens.
    Fixed,
}

impl fmt::Display for LengthModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LengthModel::Poisson => "poisson",
            LengthModel::Fixed => "fixed",
        })
    }
}

impl FromStr for LengthModel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poisson" => Ok(LengthModel::Poisson),
            "fixed" => Ok(LengthModel::Fixed),
            other => Err(CorpusError::InvalidSpec(format!(
                "unknown length_model {other:?}"
            ))),
        }
    }
}

/// How a class spreads its mass over its support (shared block followed by
/// its own block).
///
/// Textual forms: `uniform`, `zipf:<s>`, `split:<shared_mass>:<s>` (Zipf with
/// exponent `s` inside each block, `shared_mass` on the shared block), or an
/// explicit comma-separated list of weights over the *whole* vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassDistribution {
    Uniform,
    Zipf(f64),
    Split { shared_mass: f64, exponent: f64 },
    Explicit(Vec<f64>),
}

impl fmt::Display for ClassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassDistribution::Uniform => f.write_str("uniform"),
            ClassDistribution::Zipf(s) => write!(f, "zipf:{s}"),
            ClassDistribution::Split {
                shared_mass,
                exponent,
            } => {
                write!(f, "split:{shared_mass}:{exponent}")
            }
            ClassDistribution::Explicit(w) => {
                let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl FromStr for ClassDistribution {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |what: &str| CorpusError::InvalidSpec(format!("bad distribution {s:?}: {what}"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let s = s.trim();
        if s == "uniform" {
            return Ok(ClassDistribution::Uniform);
        }
        if let Some(rest) = s.strip_prefix("zipf:") {
            return Ok(ClassDistribution::Zipf(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("split:") {
            let (mass, exp) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected split:<mass>:<s>"))?;
            return Ok(ClassDistribution::Split {
                shared_mass: num(mass)?,
                exponent: num(exp)?,
            });
        }
        let weights = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
        Ok(ClassDistribution::Explicit(weights))
    }
}

fn zipf(n: usize, exponent: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|r| 1.0 / ((r + 1) as f64).powf(exponent))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_positive: usize,
    pub n_negative: usize,
    pub vocab_shared: usize,
    pub vocab_pos_only: usize,
    pub vocab_neg_only: usize,
    pub doc_length_mean: f64,
    pub length_model: LengthModel,
    pub positive_distribution: ClassDistribution,
    pub negative_distribution: ClassDistribution,
    pub seed: u64,
}

/// Bayes-optimal accuracy of the generating model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BayesAccuracy {
    Exact(f64),
    Estimated {
        value: f64,
        std_error: f64,
        samples: usize,
    },
}

impl BayesAccuracy {
    pub fn value(&self) -> f64 {
        match *self {
            BayesAccuracy::Exact(v) => v,
            BayesAccuracy::Estimated { value, .. } => value,
        }
    }
}

impl fmt::Display for BayesAccuracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BayesAccuracy::Exact(v) => write!(f, "{v:.6} (exact)"),
            BayesAccuracy::Estimated {
                value,
                std_error,
                samples,
            } => {
                write!(
                    f,
                    "{value:.6} (Monte Carlo, {samples} samples, std error {std_error:.6})"
                )
            }
        }
    }
}

pub const PRESET_NAMES: [&str; 3] = ["separable", "clpsych-shape", "bayes-085"];

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// ignored; duplicate keys are rejected.
pub fn parse_flat_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if out.iter().any(|(k, _)| *k == key) {
            return Err(format!("line {}: duplicate key {key:?}", i + 1));
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

impl SynthSpec {
    pub fn vocab_size(&self) -> usize {
        self.vocab_shared + self.vocab_pos_only + self.vocab_neg_only
    }

    /// Token string for vocabulary position `i`.
    pub fn token(&self, i: usize) -> String {
        if i < self.vocab_shared {
            format!("s{i}")
        } else if i < self.vocab_shared + self.vocab_pos_only {
            format!("p{}", i - self.vocab_shared)
        } else {
            format!("n{}", i - self.vocab_shared - self.vocab_pos_only)
        }
    }

    pub fn tokens(&self) -> Vec<String> {
        (0..self.vocab_size()).map(|i| self.token(i)).collect()
    }

    /// Multinomial parameters of `label` over the whole vocabulary.
    pub fn class_weights(&self, label: Label) -> Result<Vec<f64>, CorpusError> {
        let (dist, own_offset, own_len) = match label {
            Label::Positive => (
                &self.positive_distribution,
                self.vocab_shared,
                self.vocab_pos_only,
            ),
            Label::Negative => (
                &self.negative_distribution,
                self.vocab_shared + self.vocab_pos_only,
                self.vocab_neg_only,
            ),
        };
        let v = self.vocab_size();
        let support = self.vocab_shared + own_len;
        let mut weights = vec![0.0; v];
        let place = |weights: &mut Vec<f64>, block: Vec<f64>| {
            for (j, w) in block.into_iter().enumerate() {
                let pos = if j < self.vocab_shared {
                    j
                } else {
                    own_offset + j - self.vocab_shared
                };
                weights[pos] = w;
            }
        };
        match dist {
            ClassDistribution::Uniform => {
                if support == 0 {
                    return Err(CorpusError::InvalidSpec(format!(
                        "{label} class has an empty support"
                    )));
                }
                place(&mut weights, vec![1.0 / support as f64; support]);
            }
            ClassDistribution::Zipf(s) => {
                if support == 0 {
                    return Err(CorpusError::InvalidSpec(format!(
                        "{label} class has an empty support"
                    )));
                }
                place(&mut weights, zipf(support, *s));
            }
            ClassDistribution::Split {
                shared_mass,
                exponent,
            } => {
                if !(0.0..=1.0).contains(shared_mass) {
                    return Err(CorpusError::InvalidSpec(format!(
                        "shared_mass {shared_mass} outside [0,1]"
                    )));
                }
                if (*shared_mass > 0.0 && self.vocab_shared == 0)
                    || (*shared_mass < 1.0 && own_len == 0)
                {
                    return Err(CorpusError::InvalidSpec(format!(
                        "{label} split puts mass on an empty block"
                    )));
                }
                let mut block: Vec<f64> = zipf(self.vocab_shared, *exponent)
                    .into_iter()
                    .map(|w| w * shared_mass)
                    .collect();
                block.extend(
                    zipf(own_len, *exponent)
                        .into_iter()
                        .map(|w| w * (1.0 - shared_mass)),
                );
                place(&mut weights, block);
            }
            ClassDistribution::Explicit(w) => {
                if w.len() != v {
                    return Err(CorpusError::InvalidSpec(format!(
                        "{label} distribution has {} weights, vocabulary has {v}",
                        w.len()
                    )));
                }
                weights.clone_from(w);
            }
        }
        Ok(weights)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |m: String| Err(CorpusError::InvalidSpec(m));
        if self.n_positive == 0 || self.n_negative == 0 {
            return invalid("n_positive and n_negative must be positive".into());
        }
        if self.vocab_size() == 0 {
            return invalid("vocabulary is empty".into());
        }
        if !(self.doc_length_mean.is_finite() && self.doc_length_mean >= 1.0) {
            return invalid(format!(
                "doc_length_mean must be >= 1, got {}",
                self.doc_length_mean
            ));
        }
        if self.length_model == LengthModel::Fixed && self.doc_length_mean.fract() != 0.0 {
            return invalid("fixed length model needs an integer doc_length_mean".into());
        }
        let pos_only = self.vocab_shared..self.vocab_shared + self.vocab_pos_only;
        let neg_only = self.vocab_shared + self.vocab_pos_only..self.vocab_size();
        for (label, forbidden) in [(Label::Positive, neg_only), (Label::Negative, pos_only)] {
            let w = self.class_weights(label)?;
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return invalid(format!("{label} weights must be finite and non-negative"));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return invalid(format!("{label} weights sum to {sum}, expected 1"));
            }
            if forbidden.clone().any(|i| w[i] != 0.0) {
                return invalid(format!(
                    "{label} class puts mass on the other class's own block"
                ));
            }
        }
        Ok(())
    }

    pub fn from_config_str(text: &str) -> Result<Self, CorpusError> {
        let entries = parse_flat_config(text).map_err(CorpusError::InvalidSpec)?;
        let get = |key: &str| {
            entries
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        };
        const KNOWN: [&str; 10] = [
            "n_positive",
            "n_negative",
            "vocab_shared",
            "vocab_pos_only",
            "vocab_neg_only",
            "doc_length_mean",
            "length_model",
            "positive_distribution",
            "negative_distribution",
            "seed",
        ];
        if let Some((k, _)) = entries.iter().find(|(k, _)| !KNOWN.contains(&k.as_str())) {
            return Err(CorpusError::InvalidSpec(format!("unknown key {k:?}")));
        }
        fn parse<T: FromStr>(key: &str, value: Option<&str>) -> Result<T, CorpusError> {
            let value =
                value.ok_or_else(|| CorpusError::InvalidSpec(format!("missing key {key:?}")))?;
            value
                .parse()
                .map_err(|_| CorpusError::InvalidSpec(format!("bad value {value:?} for {key:?}")))
        }
        let spec = SynthSpec {
            n_positive: parse("n_positive", get("n_positive"))?,
            n_negative: parse("n_negative", get("n_negative"))?,
            vocab_shared: parse("vocab_shared", get("vocab_shared"))?,
            vocab_pos_only: parse("vocab_pos_only", get("vocab_pos_only"))?,
            vocab_neg_only: parse("vocab_neg_only", get("vocab_neg_only"))?,
            doc_length_mean: parse("doc_length_mean", get("doc_length_mean"))?,
            length_model: get("length_model").unwrap_or("poisson").parse()?,
            positive_distribution: get("positive_distribution")
                .ok_or_else(|| {
                    CorpusError::InvalidSpec("missing key \"positive_distribution\"".into())
                })?
                .parse()?,
            negative_distribution: get("negative_distribution")
                .ok_or_else(|| {
                    CorpusError::InvalidSpec("missing key \"negative_distribution\"".into())
                })?
                .parse()?,
            seed: get("seed")
                .map(|v| parse("seed", Some(v)))
                .transpose()?
                .unwrap_or(0),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_config_string(&self) -> String {
        format!(
            "n_positive = {}\nn_negative = {}\nvocab_shared = {}\nvocab_pos_only = {}\nvocab_neg_only = {}\n\
             doc_length_mean = {}\nlength_model = {}\npositive_distribution = {}\nnegative_distribution = {}\nseed = {}\n",
            self.n_positive,
            self.n_negative,
            self.vocab_shared,
            self.vocab_pos_only,
            self.vocab_neg_only,
            self.doc_length_mean,
            self.length_model,
            self.positive_distribution,
            self.negative_distribution,
            self.seed
        )
    }

    /// Checked-in presets: `separable`, `clpsych-shape` and `bayes-085`.
    pub fn preset(name: &str) -> Option<SynthSpec> {
        let text = match name {
            "separable" => include_str!("../../presets/separable.conf"),
            "clpsych-shape" => include_str!("../../presets/clpsych-shape.conf"),
            "bayes-085" => include_str!("../../presets/bayes-085.conf"),
            _ => return None,
        };
        Some(SynthSpec::from_config_str(text).expect("checked-in preset is valid"))
    }

    fn log_priors(&self) -> (f64, f64) {
        let n = (self.n_positive + self.n_negative) as f64;
        (
            (self.n_positive as f64 / n).ln(),
            (self.n_negative as f64 / n).ln(),
        )
    }

    fn length_distribution(&self) -> Vec<(usize, f64)> {
        match self.length_model {
            LengthModel::Fixed => vec![(self.doc_length_mean as usize, 1.0)],
            LengthModel::Poisson => {
                let rate = self.doc_length_mean - 1.0;
                if rate == 0.0 {
                    return vec![(1, 1.0)];
                }
                let mut out = Vec::new();
                let mut p = (-rate).exp();
                let mut cumulative = 0.0;
                let mut k = 0usize;
                while cumulative < 1.0 - 1e-13 && k < 10_000 {
                    out.push((k + 1, p));
                    cumulative += p;
                    k += 1;
                    p *= rate / k as f64;
                }
                out
            }
        }
    }

    /// Bayes-optimal accuracy of the generating model: exact enumeration of
    /// count vectors when the outcome space is small, Monte Carlo otherwise.
    pub fn bayes_accuracy(&self) -> Result<BayesAccuracy, CorpusError> {
        self.validate()?;
        let wp = self.class_weights(Label::Positive)?;
        let wn = self.class_weights(Label::Negative)?;
        let (lp_pos, lp_neg) = self.log_priors();
        if wp == wn {
            return Ok(BayesAccuracy::Exact(lp_pos.exp().max(lp_neg.exp())));
        }
        if wp.iter().zip(&wn).all(|(a, b)| *a == 0.0 || *b == 0.0) {
            return Ok(BayesAccuracy::Exact(1.0));
        }
        let relevant: Vec<(f64, f64)> = wp
            .iter()
            .zip(&wn)
            .filter(|(a, b)| **a > 0.0 || **b > 0.0)
            .map(|(a, b)| (*a, *b))
            .collect();
        let lengths = self.length_distribution();
        let outcomes: f64 = lengths
            .iter()
            .map(|&(l, _)| binomial(l + relevant.len() - 1, relevant.len() - 1))
            .sum();
        if outcomes <= MAX_ENUMERATED_OUTCOMES {
            Ok(BayesAccuracy::Exact(enumerate_bayes(
                &relevant, &lengths, lp_pos, lp_neg,
            )))
        } else {
            Ok(self.monte_carlo_bayes(&wp, &wn))
        }
    }

    fn monte_carlo_bayes(&self, wp: &[f64], wn: &[f64]) -> BayesAccuracy {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x5eed_ba7e_5eed_ba7e);
        let (lp_pos, lp_neg) = self.log_priors();
        let prior_pos = lp_pos.exp();
        let sampler_pos = WeightedIndex::new(wp).expect("validated weights");
        let sampler_neg = WeightedIndex::new(wn).expect("validated weights");
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..MONTE_CARLO_SAMPLES {
            let positive = rng.random::<f64>() < prior_pos;
            let len = self.draw_length(&mut rng);
            let (mut llp, mut lln) = (lp_pos, lp_neg);
            for _ in 0..len {
                let t = if positive {
                    sampler_pos.sample(&mut rng)
                } else {
                    sampler_neg.sample(&mut rng)
                };
                llp += wp[t].ln();
                lln += wn[t].ln();
            }
            // max posterior = sigmoid(|log-odds|)
            let confidence = if llp == f64::NEG_INFINITY || lln == f64::NEG_INFINITY {
                1.0
            } else {
                1.0 / (1.0 + (-(llp - lln).abs()).exp())
            };
            sum += confidence;
            sum_sq += confidence * confidence;
        }
        let n = MONTE_CARLO_SAMPLES as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        BayesAccuracy::Estimated {
            value: mean,
            std_error: (var / n).sqrt(),
            samples: MONTE_CARLO_SAMPLES,
        }
    }

    fn draw_length<R: Rng>(&self, rng: &mut R) -> usize {
        match self.length_model {
            LengthModel::Fixed => self.doc_length_mean as usize,
            LengthModel::Poisson => {
                let rate = self.doc_length_mean - 1.0;
                if rate == 0.0 {
                    1
                } else {
                    1 + Poisson::new(rate).expect("positive rate").sample(rng) as usize
                }
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn enumerate_bayes(
    weights: &[(f64, f64)],
    lengths: &[(usize, f64)],
    lp_pos: f64,
    lp_neg: f64,
) -> f64 {
    let max_len = lengths.iter().map(|&(l, _)| l).max().unwrap_or(0);
    let mut ln_fact = vec![0.0f64; max_len + 1];
    for i in 1..=max_len {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let logs: Vec<(f64, f64)> = weights.iter().map(|(a, b)| (a.ln(), b.ln())).collect();

    struct Walk<'a> {
        logs: &'a [(f64, f64)],
        ln_fact: &'a [f64],
        total: f64,
    }
    impl Walk<'_> {
        // Distributes `remaining` tokens over logs[idx..].
        fn go(&mut self, idx: usize, remaining: usize, coef: f64, lpos: f64, lneg: f64) {
            if idx == self.logs.len() - 1 {
                let x = remaining;
                let (a, b) = self.logs[idx];
                let (lpos, lneg) = if x > 0 {
                    (lpos + x as f64 * a, lneg + x as f64 * b)
                } else {
                    (lpos, lneg)
                };
                let coef = coef - self.ln_fact[x];
                self.total += (coef + lpos.max(lneg)).exp();
                return;
            }
            let (a, b) = self.logs[idx];
            for x in 0..=remaining {
                let (np, nn) = if x > 0 {
                    (lpos + x as f64 * a, lneg + x as f64 * b)
                } else {
                    (lpos, lneg)
                };
                if np == f64::NEG_INFINITY && nn == f64::NEG_INFINITY {
                    continue;
                }
                self.go(idx + 1, remaining - x, coef - self.ln_fact[x], np, nn);
            }
        }
    }

    let mut accuracy = 0.0;
    for &(len, p_len) in lengths {
        let mut walk = Walk {
            logs: &logs,
            ln_fact: &ln_fact,
            total: 0.0,
        };
        walk.go(0, len, ln_fact[len], lp_pos, lp_neg);
        accuracy += p_len * walk.total;
    }
    accuracy
}

/// Draws a corpus from `spec`. Documents are generated per class, then the
/// document order is shuffled; ids are `d000000, d000001, ...` in output order.
pub fn synthesize(spec: &SynthSpec) -> Result<Corpus, CorpusError> {
    spec.validate()?;
    let tokens = spec.tokens();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut drafts: Vec<(String, Label)> = Vec::with_capacity(spec.n_positive + spec.n_negative);
    for (label, n) in [
        (Label::Positive, spec.n_positive),
        (Label::Negative, spec.n_negative),
    ] {
        let weights = spec.class_weights(label)?;
        let sampler = WeightedIndex::new(&weights)
            .map_err(|e| CorpusError::InvalidSpec(format!("{label} weights: {e}")))?;
        for _ in 0..n {
            let len = spec.draw_length(&mut rng);
            let words: Vec<&str> = (0..len)
                .map(|_| tokens[sampler.sample(&mut rng)].as_str())
                .collect();
            drafts.push((words.join(" "), label));
        }
    }
    drafts.shuffle(&mut rng);
    let docs = drafts
        .into_iter()
        .enumerate()
        .map(|(i, (text, label))| Document::new(format!("d{i:06}"), text, label))
        .collect();
    Corpus::new(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_token(p: f64) -> SynthSpec {
        SynthSpec {
            n_positive: 100,
            n_negative: 100,
            vocab_shared: 2,
            vocab_pos_only: 0,
            vocab_neg_only: 0,
            doc_length_mean: 1.0,
            length_model: LengthModel::Fixed,
            positive_distribution: ClassDistribution::Explicit(vec![p, 1.0 - p]),
            negative_distribution: ClassDistribution::Explicit(vec![1.0 - p, p]),
            seed: 3,
        }
    }

    #[test]
    fn two_token_bayes_rate() {
        // Outcome space {s0, s1}: argmax picks pos on s0 (0.8 vs 0.2) and neg on s1,
        // so accuracy = 0.5 * 0.8 + 0.5 * 0.8.
        let acc = two_token(0.8).bayes_accuracy().unwrap();
        assert!(matches!(acc, BayesAccuracy::Exact(_)));
        assert!((acc.value() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn disjoint_is_perfect() {
        let spec = SynthSpec::preset("separable").unwrap();
        assert_eq!(spec.bayes_accuracy().unwrap(), BayesAccuracy::Exact(1.0));
    }

    #[test]
    fn identical_is_max_prior() {
        let mut spec = two_token(0.5);
        spec.n_positive = 30;
        spec.n_negative = 70;
        assert!((spec.bayes_accuracy().unwrap().value() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_monte_carlo() {
        let mut spec = two_token(0.7);
        spec.doc_length_mean = 4.0;
        spec.length_model = LengthModel::Poisson;
        let exact = spec.bayes_accuracy().unwrap().value();
        let wp = spec.class_weights(Label::Positive).unwrap();
        let wn = spec.class_weights(Label::Negative).unwrap();
        let mc = spec.monte_carlo_bayes(&wp, &wn);
        let BayesAccuracy::Estimated {
            value, std_error, ..
        } = mc
        else {
            panic!()
        };
        assert!(
            (exact - value).abs() < 5.0 * std_error,
            "{exact} vs {value} ± {std_error}"
        );
    }

    #[test]
    fn synthesize_deterministic() {
        let spec = two_token(0.8);
        let a = synthesize(&spec).unwrap();
        let b = synthesize(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.class_counts().positive, 100);
        assert!(a.iter().all(|d| d.text == "s0" || d.text == "s1"));
    }

    #[test]
    fn config_round_trip() {
        for name in PRESET_NAMES {
            let spec = SynthSpec::preset(name).unwrap();
            let again = SynthSpec::from_config_str(&spec.to_config_string()).unwrap();
            assert_eq!(spec, again, "{name}");
        }
        let spec = two_token(0.8);
        assert_eq!(
            SynthSpec::from_config_str(&spec.to_config_string()).unwrap(),
            spec
        );
    }

    #[test]
    fn config_errors() {
        let base = SynthSpec::preset("separable").unwrap().to_config_string();
        assert!(SynthSpec::from_config_str(&format!("{base}bogus = 1\n")).is_err());
        let missing: String = base
            .lines()
            .filter(|l| !l.starts_with("n_positive"))
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(SynthSpec::from_config_str(&missing).is_err());
        let unnormalized = base.replace(
            "positive_distribution = uniform",
            "positive_distribution = 0.5,0.6",
        );
        assert!(SynthSpec::from_config_str(&unnormalized).is_err());
    }

    #[test]
    fn own_block_violation_rejected() {
        let mut spec = SynthSpec::preset("separable").unwrap();
        let v = spec.vocab_size();
        spec.positive_distribution = ClassDistribution::Explicit(vec![1.0 / v as f64; v]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn poisson_lengths_never_empty() {
        let spec = SynthSpec::preset("separable").unwrap();
        let corpus = synthesize(&spec).unwrap();
        assert!(corpus.iter().all(|d| !d.text.is_empty()));
        let mean = corpus
            .iter()
            .map(|d| d.text.split(' ').count())
            .sum::<usize>() as f64
            / corpus.len() as f64;
        // length is 1 + Poisson(mean - 1); allow five standard errors
        let se = ((spec.doc_length_mean - 1.0) / corpus.len() as f64).sqrt();
        assert!((mean - spec.doc_length_mean).abs() < 5.0 * se, "{mean}");
    }
}
