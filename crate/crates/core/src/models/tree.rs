//! CART-style decision tree on count features.
//!
//! Nodes split on `x[feature] <= threshold` with thresholds at midpoints
//! between consecutive distinct counts observed in the node (zeros included).
//! The split with the largest Gini impurity decrease is chosen; a node
//! becomes a leaf when it is pure, too small, at the depth limit, or when no
//! split decreases impurity by a strictly positive amount. Gains are compared
//! in exact integer arithmetic, ties resolved by lowest feature index and then
//! lowest threshold.

use std::cmp::Ordering;

use super::{check_training_set, Classifier, ModelError};
use crate::corpus::Label;
use crate::features::SparseVector;

/// A non-zero `(feature, count, label)` entry of a node's records.
type Entry = (usize, u32, Label);

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    /// Maximum number of splits on any root-to-leaf path.
    pub max_depth: usize,
    /// Nodes with fewer documents than this are not split.
    pub min_node_size: usize,
    /// Only the highest-variance features of a node are searched for a split;
    /// `None` searches all of them.
    pub feature_cap: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 32,
            min_node_size: 2,
            feature_cap: Some(10_000),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        label: Label,
        n_pos: u64,
        n_neg: u64,
    },
    /// `x[feature] <= threshold` goes to `left`, otherwise `right`.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Nodes are stored in an arena in pre-order; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTreeModel {
    pub(crate) dim: usize,
    pub(crate) nodes: Vec<TreeNode>,
    pub(crate) params: TreeParams,
}

/// Class counts of a node as exact integers.
#[derive(Debug, Clone, Copy, Default)]

struct Counts {
    pos: u64,
    neg: u64,
}

impl Counts {
    fn n(self) -> u64 {
        self.pos + self.neg
    }

    fn add(&mut self, label: Label) {
        if label.is_positive() {
            self.pos += 1;
        } else {
            self.neg += 1;
        }
    }

    fn sub(self, other: Counts) -> Counts {
        Counts {
            pos: self.pos - other.pos,
            neg: self.neg - other.neg,
        }
    }

    fn squares(self) -> u128 {
        (self.pos as u128).pow(2) + (self.neg as u128).pow(2)
    }
}

/// `(sum_k n_lk^2)/n_l + (sum_k n_rk^2)/n_r` as a fraction. Gini impurity of a
/// partition is `1 - purity/n`, so maximising purity maximises the gain.
#[derive(Debug, Clone, Copy)]
struct Purity {
    num: u128,
    den: u128,
}

impl Purity {
    fn of_node(c: Counts) -> Self {
        Purity {
            num: c.squares(),
            den: c.n() as u128,
        }
    }

    fn of_split(l: Counts, r: Counts) -> Self {
        let (nl, nr) = (l.n() as u128, r.n() as u128);
        Purity {
            num: l.squares() * nr + r.squares() * nl,
            den: nl * nr,
        }
    }

    fn cmp(&self, other: &Purity) -> Ordering {
        // Numerators stay below n^3 and denominators below n^2, so the products
        // fit in u128 for any realistic n.
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

struct Candidate {
    feature: usize,
    threshold: f64,
    purity: Purity,
}

struct Builder<'a> {
    xs: &'a [SparseVector],
    ys: &'a [Label],
    params: &'a TreeParams,
    nodes: Vec<TreeNode>,
    leaf_of: Vec<usize>,
}

impl Builder<'_> {
    fn grow(&mut self, members: Vec<usize>, depth: usize) -> usize {
        let mut counts = Counts::default();
        for &i in &members {
            counts.add(self.ys[i]);
        }
        let id = self.nodes.len();
        let splittable = depth < self.params.max_depth
            && members.len() >= self.params.min_node_size.max(2)
            && counts.pos > 0
            && counts.neg > 0;
        let split = if splittable {
            self.best_split(&members, counts)
        } else {
            None
        };

        let Some(split) = split else {
            let label = if counts.pos > counts.neg {
                Label::Positive
            } else {
                Label::Negative
            };
            self.nodes.push(TreeNode::Leaf {
                label,
                n_pos: counts.pos,
                n_neg: counts.neg,
            });
            for &i in &members {
                self.leaf_of[i] = id;
            }
            return id;
        };

        self.nodes.push(TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: 0,
            right: 0,
        });
        let (left_members, right_members): (Vec<usize>, Vec<usize>) = members
            .into_iter()
            .partition(|&i| (self.xs[i].get(split.feature) as f64) <= split.threshold);
        let left = self.grow(left_members, depth + 1);
        let right = self.grow(right_members, depth + 1);
        if let TreeNode::Split {
            left: l, right: r, ..
        } = &mut self.nodes[id]
        {
            *l = left;
            *r = right;
        }
        id
    }

    fn best_split(&self, members: &[usize], total: Counts) -> Option<Candidate> {
        // (feature, count, label) for every non-zero entry in the node.
        let mut entries: Vec<Entry> = Vec::new();
        for &i in members {
            entries.extend(self.xs[i].iter().map(|(f, c)| (f, c, self.ys[i])));
        }
        entries.sort_unstable_by_key(|e| (e.0, e.1));
        let columns: Vec<&[Entry]> = entries.chunk_by(|a, b| a.0 == b.0).collect();
        let columns = self.cap_features(columns, members.len() as u128);

        let parent = Purity::of_node(total);
        let mut best: Option<Candidate> = None;
        for column in columns {
            let feature = column[0].0;
            // Documents with a zero count sit left of every threshold.
            let mut left = total;
            for &(_, _, label) in column {
                if label.is_positive() {
                    left.pos -= 1;
                } else {
                    left.neg -= 1;
                }
            }
            let mut prev = 0u32;
            for run in column.chunk_by(|a, b| a.1 == b.1) {
                let value = run[0].1;
                if left.n() > 0 {
                    let purity = Purity::of_split(left, total.sub(left));
                    let better = match &best {
                        None => purity.cmp(&parent) == Ordering::Greater,
                        Some(b) => purity.cmp(&b.purity) == Ordering::Greater,
                    };
                    if better {
                        best = Some(Candidate {
                            feature,
                            threshold: (prev as f64 + value as f64) / 2.0,
                            purity,
                        });
                    }
                }
                for &(_, _, label) in run {
                    left.add(label);
                }
                prev = value;
            }
        }
        best
    }

    /// Keeps at most `feature_cap` columns, preferring high count variance
    /// within the node (lower feature index on ties), in feature order.
    fn cap_features<'c>(&self, columns: Vec<&'c [Entry]>, n: u128) -> Vec<&'c [Entry]> {
        let Some(cap) = self.params.feature_cap else {
            return columns;
        };
        if columns.len() <= cap {
            return columns;
        }
        // n^2 * variance = n * sum(x^2) - (sum x)^2, exact.
        let mut scored: Vec<(u128, &[Entry])> = columns
            .into_iter()
            .map(|col| {
                let (s, s2) = col.iter().fold((0u128, 0u128), |(s, s2), e| {
                    (s + e.1 as u128, s2 + (e.1 as u128).pow(2))
                });
                (n * s2 - s * s, col)
            })
            .collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(a.1[0].0.cmp(&b.1[0].0)));
        scored.truncate(cap);
        let mut kept: Vec<_> = scored.into_iter().map(|(_, c)| c).collect();
        kept.sort_by_key(|c| c[0].0);
        kept
    }
}

/// Grows a tree and returns it with the leaf index reached by each training
/// document.
pub fn train(
    xs: &[SparseVector],
    ys: &[Label],
    params: &TreeParams,
) -> Result<(DecisionTreeModel, Vec<usize>), ModelError> {
    let dim = check_training_set(xs, ys, false)?;
    if params.feature_cap == Some(0) {
        return Err(ModelError::InvalidHyperparameter(
            "feature cap must be at least 1".into(),
        ));
    }
    let mut builder = Builder {
        xs,
        ys,
        params,
        nodes: Vec::new(),
        leaf_of: vec![0; xs.len()],
    };
    builder.grow((0..xs.len()).collect(), 0);
    Ok((
        DecisionTreeModel {
            dim,
            nodes: builder.nodes,
            params: params.clone(),
        },
        builder.leaf_of,
    ))
}

impl DecisionTreeModel {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    /// Index of the leaf that `x` falls into.
    pub fn leaf_of(&self, x: &SparseVector) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                TreeNode::Leaf { .. } => return id,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if (x.get(*feature) as f64) <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Number of splits on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], id: usize) -> usize {
            match &nodes[id] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

impl Classifier for DecisionTreeModel {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn score(&self, x: &SparseVector) -> f64 {
        match self.nodes[self.leaf_of(x)] {
            TreeNode::Leaf { n_pos, n_neg, .. } => n_pos as f64 / (n_pos + n_neg) as f64,
            TreeNode::Split { .. } => unreachable!("leaf_of returns a leaf"),
        }
    }

    fn classify(&self, x: &SparseVector) -> Label {
        match self.nodes[self.leaf_of(x)] {
            TreeNode::Leaf { label, .. } => label,
            TreeNode::Split { .. } => unreachable!("leaf_of returns a leaf"),
        }
    }
}
