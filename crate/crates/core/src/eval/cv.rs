use rayon::prelude::*;

use super::{
    accuracy, auc, f1, precision, recall, roc_curve, AucEstimate, ConfusionCounts, EvalError,
    ReportRow, RocCurve,
};
use crate::corpus::{stratified_kfold, Corpus, FoldPlan, Label};
use crate::features::{NgramRange, TokenRule, Vocabulary};
use crate::models::{Classifier, ModelConfig, ModelKind};

/// How documents become feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSpec {
    pub rule: TokenRule,
    pub range: NgramRange,
    /// Build one vocabulary from the whole corpus, test folds included.
    /// Only for comparison against the default per-fold vocabulary.
    pub leakage: bool,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            rule: TokenRule::default(),
            range: NgramRange::UNIGRAMS,
            leakage: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub features: FeatureSpec,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            k: 6,
            seed: 0,
            features: FeatureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub counts: ConfusionCounts,
    pub vocabulary_size: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub row: ReportRow,
    pub roc: RocCurve,
    pub auc: AucEstimate,
    pub plan: FoldPlan,
    pub folds: Vec<FoldOutcome>,
    /// Out-of-fold ranking score and predicted class per corpus position.
    pub scores: Vec<f64>,
    pub predictions: Vec<Label>,
}

/// Report row label, e.g. "Naive Bayes w/ 1-gram".
pub fn row_name(kind: ModelKind, range: NgramRange) -> String {
    let suffix = match (range.low(), range.high()) {
        (1, 1) => "w/ 1-gram".to_string(),
        (1, 2) => "w/ 2-grams".to_string(),
        (2, 2) => "w/ 2-grams only".to_string(),
        (lo, hi) => format!("w/ {lo}-{hi}-grams"),
    };
    if kind == ModelKind::NaiveBayes || range != NgramRange::UNIGRAMS {
        format!("{} {suffix}", kind.display_name())
    } else {
        kind.display_name().to_string()
    }
}

/// Vocabulary used when `fold` is held out: built from the training portion
/// only, unless leakage mode is on.
pub fn fold_vocabulary(
    corpus: &Corpus,
    plan: &FoldPlan,
    fold: usize,
    features: &FeatureSpec,
) -> Vocabulary {
    if features.leakage {
        return Vocabulary::from_corpus(corpus, features.rule, features.range);
    }
    let docs = corpus.documents();
    let texts: Vec<&str> = plan
        .train_indices(fold)
        .into_iter()
        .map(|i| docs[i].text.as_str())
        .collect();
    Vocabulary::build(texts, features.rule, features.range)
}

struct FoldRun {
    test: Vec<usize>,
    scores: Vec<f64>,
    predictions: Vec<Label>,
    outcome: FoldOutcome,
}

fn run_fold(
    corpus: &Corpus,
    plan: &FoldPlan,
    fold: usize,
    config: &ModelConfig,
    features: &FeatureSpec,
    shared_vocab: Option<&Vocabulary>,
) -> Result<FoldRun, EvalError> {
    let docs = corpus.documents();
    let owned;
    let vocab = match shared_vocab {
        Some(v) => v,
        None => {
            owned = fold_vocabulary(corpus, plan, fold, features);
            &owned
        }
    };
    let train = plan.train_indices(fold);
    let test = plan.test_indices(fold);
    let xs: Vec<_> = train.iter().map(|&i| vocab.vectorize(&docs[i])).collect();
    let ys: Vec<Label> = train.iter().map(|&i| docs[i].label).collect();
    let (model, info) = config.train(&xs, &ys)?;

    let mut counts = ConfusionCounts::default();
    let mut scores = Vec::with_capacity(test.len());
    let mut predictions = Vec::with_capacity(test.len());
    for &i in &test {
        let x = vocab.vectorize(&docs[i]);
        let predicted = model.classify(&x);
        counts.record(predicted, docs[i].label);
        scores.push(model.ranking_score(&x));
        predictions.push(predicted);
    }
    Ok(FoldRun {
        test,
        scores,
        predictions,
        outcome: FoldOutcome {
            counts,
            vocabulary_size: vocab.len(),
            converged: info.converged,
        },
    })
}

/// Stratified k-fold cross-validation of one model configuration.
///
/// Fold metrics are averaged with equal weight; F1 is the harmonic mean of the
/// averaged precision and recall. The ROC and AUC pool the out-of-fold ranking
/// scores. Folds run in parallel, but results are combined in fold order so
/// the outcome depends only on the inputs and the seed.
pub fn cross_validate(
    corpus: &Corpus,
    config: &ModelConfig,
    options: &CvOptions,
) -> Result<CvOutcome, EvalError> {
    let plan = stratified_kfold(corpus, options.k, options.seed)?;
    let shared = options
        .features
        .leakage
        .then(|| Vocabulary::from_corpus(corpus, options.features.rule, options.features.range));

    let runs: Vec<FoldRun> = (0..plan.k())
        .into_par_iter()
        .map(|fold| {
            run_fold(
                corpus,
                &plan,
                fold,
                config,
                &options.features,
                shared.as_ref(),
            )
        })
        .collect::<Result<_, _>>()?;

    let n = corpus.len();
    let mut scores = vec![0.0; n];
    let mut predictions = vec![Label::Negative; n];
    let (mut p_sum, mut r_sum, mut a_sum) = (0.0, 0.0, 0.0);
    let mut degenerate = 0;
    for run in &runs {
        for (j, &i) in run.test.iter().enumerate() {
            scores[i] = run.scores[j];
            predictions[i] = run.predictions[j];
        }
        let (p, r) = (precision(&run.outcome.counts), recall(&run.outcome.counts));
        degenerate += (p.degenerate || r.degenerate) as usize;
        p_sum += p.value;
        r_sum += r.value;
        a_sum += accuracy(&run.outcome.counts)?;
    }
    let k = runs.len() as f64;
    let (p, r) = (p_sum / k, r_sum / k);

    let truth = corpus.labels();
    let roc = roc_curve(&scores, &truth)?;
    let auc = auc(&roc, &scores, &truth)?;
    let row = ReportRow {
        classifier: row_name(config.kind(), options.features.range),
        precision: p,
        recall: r,
        f1: f1(p, r),
        accuracy: a_sum / k,
        samples: n,
        degenerate_folds: degenerate,
        auc: Some(auc),
    };
    Ok(CvOutcome {
        row,
        roc,
        auc,
        plan,
        folds: runs.into_iter().map(|r| r.outcome).collect(),
        scores,
        predictions,
    })
}
