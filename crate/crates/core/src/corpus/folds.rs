use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Corpus, CorpusError, Label};

/// Assignment of every document to exactly one of `k` test folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignment: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Positions of the documents held out in `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f == fold).then_some(i))
            .collect()
    }

    /// Positions of the documents trained on when `fold` is held out, ascending.
    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, &f)| (f != fold).then_some(i))
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

fn check_k(k: usize) -> Result<(), CorpusError> {
    if k < 2 {
        return Err(CorpusError::InvalidFolds(format!(
            "k must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// Stratified k-fold split: each class is shuffled with a seeded RNG and dealt
/// round-robin, the negative class continuing where the positive class stopped,
/// so both per-class and total fold sizes differ by at most one.
pub fn stratified_kfold(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldPlan, CorpusError> {
    check_k(k)?;
    let counts = corpus.class_counts();
    for label in [Label::Positive, Label::Negative] {
        if counts.get(label) < k {
            return Err(CorpusError::InfeasibleStratification {
                label,
                available: counts.get(label),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![usize::MAX; corpus.len()];
    let mut next = 0usize;
    for label in [Label::Positive, Label::Negative] {
        let mut members: Vec<usize> = corpus
            .iter()
            .enumerate()
            .filter_map(|(i, d)| (d.label == label).then_some(i))
            .collect();
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldPlan { k, assignment })
}

/// Unstratified seeded k-fold split over `n` items; `k == n` gives leave-one-out.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan, CorpusError> {
    check_k(k)?;
    if k > n {
        return Err(CorpusError::InvalidFolds(format!(
            "k = {k} exceeds the number of documents ({n})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignment = vec![0; n];
    for (pos, i) in order.into_iter().enumerate() {
        assignment[i] = pos % k;
    }
    Ok(FoldPlan { k, assignment })
}
