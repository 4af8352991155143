use bowclf::corpus::{synthesize, SynthSpec};
use bowclf::models::{naive_bayes, NbParams};
use bowclf::{Classifier, Label, ModelConfig, ModelKind, NgramRange, SparseVector, Vocabulary};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_problem(seed: u64, n: usize, dim: usize) -> (Vec<SparseVector>, Vec<Label>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<SparseVector> = (0..n)
        .map(|_| {
            let row: Vec<u32> = (0..dim)
                .map(|_| {
                    if rng.random_bool(0.3) {
                        rng.random_range(1..5)
                    } else {
                        0
                    }
                })
                .collect();
            SparseVector::from_dense(&row)
        })
        .collect();
    let mut ys: Vec<Label> = xs
        .iter()
        .map(|x| {
            if x.get(0) + x.get(1) > x.get(2) + 1 {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect();
    // label noise, so no model fits exactly
    for y in ys.iter_mut().step_by(7) {
        *y = y.flip();
    }
    (xs, ys)
}

#[test]
fn training_order_does_not_matter() {
    let (xs, ys) = random_problem(21, 80, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for kind in ModelKind::ALL {
        let config = ModelConfig::default_for(kind);
        let (reference, _) = config.train(&xs, &ys).unwrap();
        for _ in 0..3 {
            let mut idx: Vec<usize> = (0..xs.len()).collect();
            idx.shuffle(&mut rng);
            let pxs: Vec<SparseVector> = idx.iter().map(|&i| xs[i].clone()).collect();
            let pys: Vec<Label> = idx.iter().map(|&i| ys[i]).collect();
            let (model, _) = config.train(&pxs, &pys).unwrap();
            assert_eq!(
                model.to_bytes(),
                reference.to_bytes(),
                "{kind} depends on training order"
            );
        }
    }
}

#[test]
fn nb_duplication_keeps_priors() {
    let (xs, ys) = random_problem(8, 40, 5);
    let doubled_xs: Vec<SparseVector> = xs.iter().chain(&xs).cloned().collect();
    let doubled_ys: Vec<Label> = ys.iter().chain(&ys).copied().collect();
    let once = naive_bayes::train(&xs, &ys, &NbParams { alpha: 1.0 }).unwrap();
    let twice = naive_bayes::train(&doubled_xs, &doubled_ys, &NbParams { alpha: 1.0 }).unwrap();
    let (a, b) = (once.log_priors(), twice.log_priors());
    assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    // Doubling the counts is the same as halving the smoothing.
    let half = naive_bayes::train(&xs, &ys, &NbParams { alpha: 0.5 }).unwrap();
    for label in [Label::Positive, Label::Negative] {
        for (p, q) in twice
            .feature_log_probs(label)
            .iter()
            .zip(half.feature_log_probs(label))
        {
            assert!((p - q).abs() < 1e-12);
        }
    }
    // and with vanishing smoothing the estimates coincide
    let tiny = 1e-9;
    let a = naive_bayes::train(&xs, &ys, &NbParams { alpha: tiny }).unwrap();
    let b = naive_bayes::train(&doubled_xs, &doubled_ys, &NbParams { alpha: tiny }).unwrap();
    for label in [Label::Positive, Label::Negative] {
        for (p, q) in a
            .feature_log_probs(label)
            .iter()
            .zip(b.feature_log_probs(label))
        {
            assert!((p.exp() - q.exp()).abs() < 1e-8);
        }
    }
}

#[test]
fn disjoint_vocabulary_fits_train_and_test() {
    let spec = SynthSpec::from_config_str(
        "n_positive = 150\nn_negative = 150\nvocab_shared = 0\nvocab_pos_only = 6\nvocab_neg_only = 6\n\
         doc_length_mean = 20\npositive_distribution = uniform\nnegative_distribution = uniform\nseed = 3\n",
    )
    .unwrap();
    let train = synthesize(&spec).unwrap();
    let test = synthesize(&SynthSpec {
        seed: 4,
        ..spec.clone()
    })
    .unwrap();
    let vocab = Vocabulary::from_corpus(&train, Default::default(), NgramRange::UNIGRAMS);
    let (xs, ys) = (vocab.vectorize_corpus(&train), train.labels());
    let (txs, tys) = (vocab.vectorize_corpus(&test), test.labels());
    for kind in ModelKind::ALL {
        let (model, _) = ModelConfig::default_for(kind).train(&xs, &ys).unwrap();
        for (set, (vs, labels)) in [("train", (&xs, &ys)), ("test", (&txs, &tys))] {
            let wrong = vs
                .iter()
                .zip(labels.iter())
                .filter(|&(x, y)| model.classify(x) != *y)
                .count();
            assert_eq!(wrong, 0, "{kind} misclassifies {wrong} {set} documents");
        }
    }
}
