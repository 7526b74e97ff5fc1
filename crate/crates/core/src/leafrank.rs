//! Cost-sensitive binary classification tree used to split ranking cells.
//!
//! Splits axis-aligned regions of the feature space to minimize the
//! empirical weighted misclassification risk
//! `(2/m) (1-w) #(positives sent right) + (2/m) w #(negatives sent left)`.
//! Growth is best-first under a leaf budget. Each split minimizes the
//! cost-weighted Gini impurity, with the weighted risk breaking impurity
//! ties and `(feature, threshold)` breaking the rest; leaf labels minimize
//! the local weighted risk. Risk itself is not the split criterion: on
//! noisy balanced cells it rewards splits that chase sample imbalance,
//! while the impurity rewards carving small pure regions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::FeatureVector;
use crate::Label;

/// One labeled feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    pub features: FeatureVector,
    pub label: Label,
}

impl WeightedSample {
    pub fn new(features: FeatureVector, label: Label) -> Self {
        Self { features, label }
    }

    /// Convenience constructor from raw values.
    pub fn from_values(values: Vec<f64>, label: Label) -> Self {
        Self {
            features: FeatureVector::free(values),
            label,
        }
    }
}

/// Node of a [`CostSensitiveTree`]; `<=` comparisons go left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        label: Label,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }
}

/// A trained cost-sensitive classification tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostSensitiveTree {
    pub root: TreeNode,
    /// Feature dimension the tree was trained on.
    pub dim: usize,
    /// Leaf budget used during training.
    pub max_leaves: usize,
}

impl CostSensitiveTree {
    /// Single-leaf tree predicting `label` regardless of input.
    pub fn constant(label: Label, dim: usize) -> Self {
        Self {
            root: TreeNode::Leaf { label },
            dim,
            max_leaves: 1,
        }
    }

    pub fn num_leaves(&self) -> usize {
        self.root.leaves()
    }

    /// Routes a feature vector to its leaf label.
    pub fn predict(&self, features: &FeatureVector) -> Result<Label> {
        if features.len() != self.dim {
            return Err(Error::IndexMismatch(format!(
                "feature dimension {} does not match tree dimension {}",
                features.len(),
                self.dim
            )));
        }
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { label } => return Ok(*label),
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if features.values[*feature] <= *threshold {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Empirical weighted misclassification risk of the tree on `samples`.
    pub fn weighted_risk(&self, samples: &[WeightedSample], omega: f64) -> Result<f64> {
        let tree = self;
        weighted_risk(
            |fv| tree.predict(fv).map(|l| l.is_positive()),
            samples,
            omega,
        )
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "cost omega must lie in (0, 1), got {omega}"
        )));
    }
    Ok(())
}

/// Empirical weighted misclassification risk of an arbitrary
/// predicted-positive region:
/// `(2/m) (1-w) #(pos predicted negative) + (2/m) w #(neg predicted positive)`.
pub fn weighted_risk<F>(mut predicted_positive: F, samples: &[WeightedSample], omega: f64) -> Result<f64>
where
    F: FnMut(&FeatureVector) -> Result<bool>,
{
    if samples.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    check_omega(omega)?;
    let mut false_neg = 0usize;
    let mut false_pos = 0usize;
    for s in samples {
        let in_positive = predicted_positive(&s.features)?;
        match (s.label, in_positive) {
            (Label::Pos, false) => false_neg += 1,
            (Label::Neg, true) => false_pos += 1,
            _ => {}
        }
    }
    let m = samples.len() as f64;
    Ok(2.0 / m * ((1.0 - omega) * false_neg as f64 + omega * false_pos as f64))
}

/// Optimal leaf label and its weighted cost for a cell with the given class
/// counts. Predicts positive only when that strictly lowers the cost.
fn leaf_label(pos: usize, neg: usize, omega: f64) -> (Label, f64) {
    let cost_pos = 2.0 * omega * neg as f64;
    let cost_neg = 2.0 * (1.0 - omega) * pos as f64;
    if cost_pos < cost_neg {
        (Label::Pos, cost_pos)
    } else {
        (Label::Neg, cost_neg)
    }
}

/// Cost-weighted Gini impurity of a cell (unnormalized; additive across
/// cells).
fn gini(pos: usize, neg: usize, omega: f64) -> f64 {
    let wp = 2.0 * (1.0 - omega) * pos as f64;
    let wn = 2.0 * omega * neg as f64;
    let total = wp + wn;
    if total == 0.0 {
        0.0
    } else {
        wp * wn / total
    }
}

#[derive(Debug, Clone, Copy)]
struct SplitChoice {
    feature: usize,
    threshold: f64,
    /// Summed leaf costs of the two children (same scale as leaf_label cost).
    cost: f64,
    gini: f64,
}

/// Best split of a cell, or None when every feature is constant on it.
fn best_split(
    samples: &[WeightedSample],
    cell: &[usize],
    dim: usize,
    omega: f64,
) -> Option<SplitChoice> {
    let total_pos = cell
        .iter()
        .filter(|&&i| samples[i].label.is_positive())
        .count();
    let total_neg = cell.len() - total_pos;

    let mut best: Option<SplitChoice> = None;
    let mut scratch: Vec<(f64, bool)> = Vec::with_capacity(cell.len());
    for feature in 0..dim {
        scratch.clear();
        scratch.extend(
            cell.iter()
                .map(|&i| (samples[i].features.values[feature], samples[i].label.is_positive())),
        );
        scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut left_pos = 0usize;
        let mut left_neg = 0usize;
        for w in 0..scratch.len() - 1 {
            if scratch[w].1 {
                left_pos += 1;
            } else {
                left_neg += 1;
            }
            let (v, next) = (scratch[w].0, scratch[w + 1].0);
            if v == next {
                continue;
            }
            let threshold = v + (next - v) / 2.0;
            let right_pos = total_pos - left_pos;
            let right_neg = total_neg - left_neg;
            let cost = leaf_label(left_pos, left_neg, omega).1
                + leaf_label(right_pos, right_neg, omega).1;
            let g = gini(left_pos, left_neg, omega) + gini(right_pos, right_neg, omega);
            let better = match &best {
                None => true,
                Some(b) => {
                    g < b.gini
                        || (g == b.gini && cost < b.cost)
                        || (g == b.gini
                            && cost == b.cost
                            && (feature, threshold) < (b.feature, b.threshold))
                }
            };
            if better {
                best = Some(SplitChoice {
                    feature,
                    threshold,
                    cost,
                    gini: g,
                });
            }
        }
    }
    best
}

struct OpenLeaf {
    cell: Vec<usize>,
    pos: usize,
    neg: usize,
    split: Option<SplitChoice>,
    /// Creation order; breaks ties between equally attractive leaves.
    seq: usize,
    node: usize,
}

enum ArenaNode {
    Leaf { label: Label },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

fn build_node(arena: &[ArenaNode], at: usize) -> TreeNode {
    match &arena[at] {
        ArenaNode::Leaf { label } => TreeNode::Leaf { label: *label },
        ArenaNode::Split {
            feature,
            threshold,
            left,
            right,
        } => TreeNode::Split {
            feature: *feature,
            threshold: *threshold,
            left: Box::new(build_node(arena, *left)),
            right: Box::new(build_node(arena, *right)),
        },
    }
}

/// Greedy best-first growth with a leaf budget.
///
/// A cell stops splitting when it is pure, holds fewer than `min_node`
/// samples, or no feature varies on it. Both classes being present is not
/// required; a single-class input yields a one-leaf tree predicting the
/// present class.
pub fn train(
    samples: &[WeightedSample],
    omega: f64,
    max_leaves: usize,
    min_node: usize,
) -> Result<CostSensitiveTree> {
    if samples.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    check_omega(omega)?;
    if max_leaves < 2 {
        return Err(Error::InvalidParameter(format!(
            "max_leaves must be >= 2, got {max_leaves}"
        )));
    }
    let dim = samples[0].features.len();
    if dim == 0 {
        return Err(Error::InvalidFeatures("zero-dimensional features".into()));
    }
    if let Some(s) = samples.iter().find(|s| s.features.len() != dim) {
        return Err(Error::IndexMismatch(format!(
            "inconsistent feature dimensions: {} vs {}",
            s.features.len(),
            dim
        )));
    }

    let mut arena: Vec<ArenaNode> = Vec::new();
    let mut open: Vec<OpenLeaf> = Vec::new();
    let mut seq = 0usize;

    let make_leaf = |samples: &[WeightedSample],
                         cell: Vec<usize>,
                         arena: &mut Vec<ArenaNode>,
                         open: &mut Vec<OpenLeaf>,
                         seq: &mut usize| {
        let pos = cell
            .iter()
            .filter(|&&i| samples[i].label.is_positive())
            .count();
        let neg = cell.len() - pos;
        let node = arena.len();
        arena.push(ArenaNode::Leaf {
            label: leaf_label(pos, neg, omega).0,
        });
        let splittable = pos > 0 && neg > 0 && cell.len() >= min_node;
        let split = if splittable {
            best_split(samples, &cell, dim, omega)
        } else {
            None
        };
        open.push(OpenLeaf {
            cell,
            pos,
            neg,
            split,
            seq: *seq,
            node,
        });
        *seq += 1;
    };

    make_leaf(samples, (0..samples.len()).collect(), &mut arena, &mut open, &mut seq);
    let mut leaves = 1usize;

    while leaves < max_leaves {
        // most attractive open leaf: largest impurity gain, then largest
        // risk gain, then earliest created
        let mut chosen: Option<usize> = None;
        let mut chosen_key = (f64::NEG_INFINITY, f64::NEG_INFINITY, usize::MAX);
        for (i, leaf) in open.iter().enumerate() {
            let Some(split) = &leaf.split else { continue };
            let parent_cost = leaf_label(leaf.pos, leaf.neg, omega).1;
            let parent_gini = gini(leaf.pos, leaf.neg, omega);
            let key = (parent_gini - split.gini, parent_cost - split.cost, leaf.seq);
            let better = match chosen {
                None => true,
                Some(_) => {
                    key.0 > chosen_key.0
                        || (key.0 == chosen_key.0 && key.1 > chosen_key.1)
                        || (key.0 == chosen_key.0 && key.1 == chosen_key.1 && key.2 < chosen_key.2)
                }
            };
            if better {
                chosen = Some(i);
                chosen_key = key;
            }
        }
        let Some(at) = chosen else { break };
        let leaf = open.swap_remove(at);
        let split = leaf.split.expect("chosen leaf has a split");

        let (mut left, mut right) = (Vec::new(), Vec::new());
        for &i in &leaf.cell {
            if samples[i].features.values[split.feature] <= split.threshold {
                left.push(i);
            } else {
                right.push(i);
            }
        }
        debug_assert!(!left.is_empty() && !right.is_empty());

        let left_node = arena.len();
        make_leaf(samples, left, &mut arena, &mut open, &mut seq);
        let right_node = arena.len();
        make_leaf(samples, right, &mut arena, &mut open, &mut seq);
        arena[leaf.node] = ArenaNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left: left_node,
            right: right_node,
        };
        leaves += 1;
    }

    Ok(CostSensitiveTree {
        root: build_node(&arena, 0),
        dim,
        max_leaves,
    })
}

/// Routes one feature vector through a trained tree.
pub fn predict(tree: &CostSensitiveTree, features: &FeatureVector) -> Result<Label> {
    tree.predict(features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ws(values: &[f64], label: i32) -> WeightedSample {
        WeightedSample::from_values(values.to_vec(), Label::from_signum(label).unwrap())
    }

    fn one_d(values: &[f64], labels: &[i32]) -> Vec<WeightedSample> {
        values
            .iter()
            .zip(labels)
            .map(|(&v, &l)| ws(&[v], l))
            .collect()
    }

    #[test]
    fn weighted_risk_matches_direct_evaluation() {
        let samples = one_d(&[1.0, 2.0, 3.0, 4.0], &[1, 1, -1, -1]);
        // perfect region
        let r = weighted_risk(|fv| Ok(fv.values[0] <= 2.5), &samples, 0.3).unwrap();
        assert_eq!(r, 0.0);
        // everything sent left: two negatives in the positive region
        let r = weighted_risk(|_| Ok(true), &samples, 0.5).unwrap();
        assert_eq!(r, 0.5);
        // everything sent right: two positives missed, symmetric at 0.5
        let r = weighted_risk(|_| Ok(false), &samples, 0.5).unwrap();
        assert_eq!(r, 0.5);
        assert!(matches!(
            weighted_risk(|_| Ok(true), &[], 0.5),
            Err(Error::EmptyEnsemble)
        ));
        assert!(matches!(
            weighted_risk(|_| Ok(true), &samples, 1.0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn separable_one_dimensional_data_trains_a_zero_risk_stump() {
        let samples = one_d(&[1.0, 2.0, 3.0, 4.0], &[-1, -1, 1, 1]);
        for omega in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let tree = train(&samples, omega, 2, 1).unwrap();
            assert_eq!(tree.num_leaves(), 2);
            match &tree.root {
                TreeNode::Split { threshold, .. } => {
                    assert!(*threshold > 2.0 && *threshold < 3.0)
                }
                _ => panic!("expected a stump"),
            }
            assert_eq!(tree.weighted_risk(&samples, omega).unwrap(), 0.0);
        }
    }

    #[test]
    fn pure_input_collapses_to_a_single_leaf() {
        let samples = one_d(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        let tree = train(&samples, 0.5, 4, 1).unwrap();
        assert_eq!(tree.num_leaves(), 1);
        assert_eq!(tree.predict(&FeatureVector::free(vec![9.0])).unwrap(), Label::Pos);
        assert_eq!(tree.weighted_risk(&samples, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn xor_needs_more_than_a_stump() {
        let samples = vec![
            ws(&[0.0, 0.0], 1),
            ws(&[1.0, 1.0], 1),
            ws(&[0.0, 1.0], -1),
            ws(&[1.0, 0.0], -1),
        ];
        let deep = train(&samples, 0.5, 4, 1).unwrap();
        assert_eq!(deep.weighted_risk(&samples, 0.5).unwrap(), 0.0);
        assert_eq!(deep.num_leaves(), 4);
        for s in &samples {
            assert_eq!(deep.predict(&s.features).unwrap(), s.label);
        }

        let stump = train(&samples, 0.5, 2, 1).unwrap();
        let stump_risk = stump.weighted_risk(&samples, 0.5).unwrap();
        assert_eq!(stump_risk, 0.5);
        // exhaustive search over axis-aligned stumps confirms none beats 0.5
        let (_, brute_risk) = brute_force_best_stump(&samples, 0.5);
        assert_eq!(brute_risk, 0.5);
    }

    #[test]
    fn boundary_values_route_left() {
        let tree = CostSensitiveTree {
            root: TreeNode::Split {
                feature: 0,
                threshold: 2.5,
                left: Box::new(TreeNode::Leaf { label: Label::Pos }),
                right: Box::new(TreeNode::Leaf { label: Label::Neg }),
            },
            dim: 1,
            max_leaves: 2,
        };
        assert_eq!(tree.predict(&FeatureVector::free(vec![1.0])).unwrap(), Label::Pos);
        assert_eq!(tree.predict(&FeatureVector::free(vec![2.5])).unwrap(), Label::Pos);
        assert_eq!(tree.predict(&FeatureVector::free(vec![2.6])).unwrap(), Label::Neg);
        assert!(matches!(
            tree.predict(&FeatureVector::free(vec![1.0, 2.0])),
            Err(Error::IndexMismatch(_))
        ));
    }

    /// (gini, risk) of the best stump over every (feature, midpoint)
    /// candidate under the documented selection key, by direct enumeration
    /// independent of the training code path.
    fn brute_force_best_stump(samples: &[WeightedSample], omega: f64) -> (f64, f64) {
        let dim = samples[0].features.len();
        let m = samples.len() as f64;
        let mut best: Option<(f64, f64, usize, f64)> = None;
        for f in 0..dim {
            let mut vals: Vec<f64> = samples.iter().map(|s| s.features.values[f]).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            for w in vals.windows(2) {
                let t = w[0] + (w[1] - w[0]) / 2.0;
                let (mut lp, mut ln, mut rp, mut rn) = (0usize, 0usize, 0usize, 0usize);
                for s in samples {
                    let pos = s.label.is_positive();
                    if s.features.values[f] <= t {
                        if pos { lp += 1 } else { ln += 1 }
                    } else if pos {
                        rp += 1
                    } else {
                        rn += 1
                    }
                }
                let g = gini(lp, ln, omega) + gini(rp, rn, omega);
                let risk =
                    (leaf_label(lp, ln, omega).1 + leaf_label(rp, rn, omega).1) / m;
                let better = match &best {
                    None => true,
                    Some((bg, br, bf, bt)) => {
                        g < *bg
                            || (g == *bg && risk < *br)
                            || (g == *bg && risk == *br && (f, t) < (*bf, *bt))
                    }
                };
                if better {
                    best = Some((g, risk, f, t));
                }
            }
        }
        let (g, risk, _, _) = best.expect("at least one candidate");
        (g, risk)
    }

    #[test]
    fn trained_stump_matches_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        for trial in 0..400 {
            let m = rng.gen_range(2..=12);
            let dim = rng.gen_range(1..=3);
            let samples: Vec<WeightedSample> = (0..m)
                .map(|_| {
                    let values: Vec<f64> =
                        (0..dim).map(|_| rng.gen_range(0..4) as f64).collect();
                    ws(&values, if rng.gen_bool(0.5) { 1 } else { -1 })
                })
                .collect();
            let pos = samples.iter().filter(|s| s.label.is_positive()).count();
            let splittable = pos > 0
                && pos < samples.len()
                && (0..dim).any(|f| {
                    samples
                        .iter()
                        .any(|s| s.features.values[f] != samples[0].features.values[f])
                });
            if !splittable {
                continue;
            }
            checked += 1;
            let omega = [0.1, 0.25, 0.5, 0.61, 0.9][rng.gen_range(0..5)];
            let tree = train(&samples, omega, 2, 1).unwrap();
            let risk = tree.weighted_risk(&samples, omega).unwrap();
            let (_, oracle_risk) = brute_force_best_stump(&samples, omega);
            assert!(
                (risk - oracle_risk).abs() < 1e-12,
                "trial {trial}: trained {risk} vs oracle {oracle_risk}"
            );
        }
        assert!(checked > 200, "too few splittable instances: {checked}");
    }

    #[test]
    fn risk_is_monotone_in_leaf_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<WeightedSample> = (0..60)
            .map(|_| {
                let x = rng.gen_range(-1.0..1.0);
                let y = rng.gen_range(-1.0..1.0);
                let noisy = rng.gen_bool(0.2);
                let label = if (x + 0.3 * y > 0.0) ^ noisy { 1 } else { -1 };
                ws(&[x, y], label)
            })
            .collect();
        let mut prev = f64::INFINITY;
        for max_leaves in 2..=10 {
            let tree = train(&samples, 0.4, max_leaves, 2).unwrap();
            let risk = tree.weighted_risk(&samples, 0.4).unwrap();
            assert!(risk <= prev + 1e-12, "budget {max_leaves}: {risk} > {prev}");
            prev = risk;
        }
        // and never worse than the best constant classifier
        let pos = samples.iter().filter(|s| s.label.is_positive()).count();
        let constant = leaf_label(pos, samples.len() - pos, 0.4).1 / samples.len() as f64;
        assert!(prev <= constant + 1e-12);
    }

    #[test]
    fn false_positives_decrease_as_omega_grows() {
        // Stumps choose from a fixed candidate set, so the risk-minimizing
        // (FP, FN) point moves monotonically as omega sweeps. Retrained
        // deeper trees change structure between omega values and their FP
        // counts are not monotone; the sweep is therefore pinned on stumps.
        for seed in [0u64, 1, 2, 3, 4] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<WeightedSample> = (0..200)
                .map(|_| {
                    let x: f64 = rng.gen_range(-1.0..1.0);
                    let p = 1.0 / (1.0 + (-4.0 * x).exp());
                    ws(&[x], if rng.gen_bool(p) { 1 } else { -1 })
                })
                .collect();
            let mut prev_fp = usize::MAX;
            for omega in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
                let tree = train(&samples, omega, 2, 1).unwrap();
                let fp = samples
                    .iter()
                    .filter(|s| {
                        !s.label.is_positive()
                            && tree.predict(&s.features).unwrap().is_positive()
                    })
                    .count();
                assert!(fp <= prev_fp, "seed {seed} omega {omega}: {fp} > {prev_fp}");
                prev_fp = fp;
            }
        }
    }

    #[test]
    fn nested_json_round_trips() {
        let samples = vec![
            ws(&[0.0, 0.0], 1),
            ws(&[1.0, 1.0], 1),
            ws(&[0.0, 1.0], -1),
            ws(&[1.0, 0.0], -1),
        ];
        let tree = train(&samples, 0.5, 4, 1).unwrap();
        let json = serde_json::to_string(&tree).unwrap();
        assert!(json.contains("\"feature\"") && json.contains("\"threshold\""));
        let back: CostSensitiveTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn invalid_inputs_error() {
        assert!(matches!(train(&[], 0.5, 2, 1), Err(Error::EmptyEnsemble)));
        let empty_features = vec![WeightedSample::from_values(vec![], Label::Pos)];
        assert!(matches!(
            train(&empty_features, 0.5, 2, 1),
            Err(Error::InvalidFeatures(_))
        ));
        let samples = one_d(&[1.0, 2.0], &[1, -1]);
        assert!(matches!(
            train(&samples, 0.5, 1, 1),
            Err(Error::InvalidParameter(_))
        ));
    }
}
