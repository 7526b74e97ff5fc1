//! Ranking-tree learners: recursive AUC-oriented partitioning over fixed
//! feature vectors or over curves with per-node adaptive wavelet filtering,
//! plus AUC-driven pruning and scoring.
//!
//! A ranking tree is a left-right-oriented binary tree. Each inner node
//! carries a cost-sensitive classifier trained with the cell's positive rate
//! as its cost; curves the classifier accepts go to the left child. Leaves,
//! read left to right, carry strictly decreasing ranks, and the score of an
//! input is the rank of the leaf it lands in.
//!
//! Inside every node the selected coefficient indices are presented to the
//! classifier in lexicographic `(level, pos)` order. Selection statistics
//! decide only which indices enter a node's filter, never how the classifier
//! sees them, so growing with the full index set reproduces the tree grown
//! on globally filtered features node for node.

use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filtering::{
    apply_filter, threshold_index_set, top_variance_index_set, FeatureVector, FilterIndexSet,
    SelectionMode, ThresholdRule,
};
use crate::leafrank::{self, CostSensitiveTree, WeightedSample};
use crate::metrics::{empirical_auc, ScoredSample};
use crate::wavelet::{dwt_forward, CoefficientSet, Curve, WaveletFamily};
use crate::Label;

/// Knobs of the per-node classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafParams {
    pub max_leaves: usize,
    pub min_node: usize,
}

impl Default for LeafParams {
    fn default() -> Self {
        Self {
            max_leaves: 8,
            min_node: 5,
        }
    }
}

/// Knobs of the master ranking tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowParams {
    /// Maximum depth `D`; at most `2^D` leaves.
    pub depth: usize,
    /// Cells smaller than this become leaves.
    pub min_split: usize,
    pub leaf: LeafParams,
}

impl Default for GrowParams {
    fn default() -> Self {
        Self {
            depth: 4,
            min_split: 20,
            leaf: LeafParams::default(),
        }
    }
}

/// Functional growth configuration: which coefficients each node may select.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalParams {
    /// Coefficients selected per node (top-variance mode).
    pub n_coeffs: usize,
    /// `TopVariance` or `Threshold`; `Linear` does not depend on the cell.
    pub selection: SelectionMode,
    /// Threshold rule used when `selection == Threshold`.
    pub threshold: ThresholdRule,
    /// Finest detail level considered by selection.
    pub jmax: usize,
    pub grow: GrowParams,
}

/// Labeled curves with cached wavelet analyses.
#[derive(Debug, Clone)]
pub struct LabeledCurveSet {
    curves: Vec<Curve>,
    labels: Vec<Label>,
    family: WaveletFamily,
    j0: usize,
    coeffs: Vec<CoefficientSet>,
}

impl LabeledCurveSet {
    /// Transforms every curve once and caches the coefficient sets.
    pub fn analyze(
        curves: Vec<Curve>,
        labels: Vec<Label>,
        family: WaveletFamily,
        j0: usize,
    ) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if curves.len() != labels.len() {
            return Err(Error::DataError(format!(
                "{} curves but {} labels",
                curves.len(),
                labels.len()
            )));
        }
        let len = curves[0].len();
        if curves.iter().any(|c| c.len() != len) {
            return Err(Error::DataError(
                "curves must share one sample count".into(),
            ));
        }
        let coeffs = curves
            .iter()
            .map(|c| dwt_forward(c, family, j0))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            curves,
            labels,
            family,
            j0,
            coeffs,
        })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn coeffs(&self) -> &[CoefficientSet] {
        &self.coeffs
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn j0(&self) -> usize {
        self.j0
    }

    /// Finest detail level of the cached analyses.
    pub fn jmax(&self) -> usize {
        self.coeffs[0].jmax()
    }

    /// Total coefficient count per curve.
    pub fn coeff_count(&self) -> usize {
        self.coeffs[0].total_len()
    }

    /// Copy restricted to the given sample indices (fold construction).
    pub fn subset(&self, idx: &[usize]) -> LabeledCurveSet {
        LabeledCurveSet {
            curves: idx.iter().map(|&i| self.curves[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            family: self.family,
            j0: self.j0,
            coeffs: idx.iter().map(|&i| self.coeffs[i].clone()).collect(),
        }
    }
}

/// Node of a [`RankingTree`].
#[derive(Debug, Clone, PartialEq)]
pub enum RankNode {
    Leaf {
        /// Score of inputs landing here; strictly decreasing left to right.
        rank: usize,
        /// Training occupancy, kept for AUC bookkeeping and pruning.
        train_pos: usize,
        train_neg: usize,
    },
    Inner {
        /// Coefficient indices this node reads; `None` in trees grown on
        /// plain feature vectors.
        filter: Option<FilterIndexSet>,
        classifier: CostSensitiveTree,
        omega: f64,
        left: Box<RankNode>,
        right: Box<RankNode>,
    },
}

impl RankNode {
    fn num_leaves(&self) -> usize {
        match self {
            RankNode::Leaf { .. } => 1,
            RankNode::Inner { left, right, .. } => left.num_leaves() + right.num_leaves(),
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a RankNode>) {
        match self {
            RankNode::Leaf { .. } => out.push(self),
            RankNode::Inner { left, right, .. } => {
                left.collect_leaves(out);
                right.collect_leaves(out);
            }
        }
    }

    fn assign_ranks(&mut self, total: usize, next_index: &mut usize) {
        match self {
            RankNode::Leaf { rank, .. } => {
                *rank = total - *next_index;
                *next_index += 1;
            }
            RankNode::Inner { left, right, .. } => {
                left.assign_ranks(total, next_index);
                right.assign_ranks(total, next_index);
            }
        }
    }
}

/// Left-right-oriented ranking tree. Functional trees remember the analysis
/// family and coarsest scale so test curves are transformed exactly once.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingTree {
    pub family: Option<WaveletFamily>,
    pub j0: usize,
    pub root: RankNode,
}

impl RankingTree {
    pub fn num_leaves(&self) -> usize {
        self.root.num_leaves()
    }

    pub fn depth(&self) -> usize {
        fn depth_of(node: &RankNode) -> usize {
            match node {
                RankNode::Leaf { .. } => 0,
                RankNode::Inner { left, right, .. } => 1 + depth_of(left).max(depth_of(right)),
            }
        }
        depth_of(&self.root)
    }

    fn finalize_ranks(&mut self) {
        let total = self.root.num_leaves();
        let mut idx = 0;
        self.root.assign_ranks(total, &mut idx);
    }

    /// Training AUC from leaf occupancy counts: positives in higher-ranked
    /// leaves concord with negatives in lower-ranked ones, within-leaf pairs
    /// count half.
    pub fn training_auc(&self) -> Result<f64> {
        let mut leaves = Vec::new();
        self.root.collect_leaves(&mut leaves);
        let mut num = 0u128;
        let mut total_pos = 0u64;
        let mut total_neg = 0u64;
        let mut neg_after = 0u64;
        for leaf in &leaves {
            if let RankNode::Leaf { train_neg, .. } = leaf {
                neg_after += *train_neg as u64;
            }
        }
        for leaf in &leaves {
            let RankNode::Leaf {
                train_pos,
                train_neg,
                ..
            } = leaf
            else {
                unreachable!()
            };
            let (p, n) = (*train_pos as u64, *train_neg as u64);
            neg_after -= n;
            num += 2 * (p as u128) * (neg_after as u128) + (p as u128) * (n as u128);
            total_pos += p;
            total_neg += n;
        }
        if total_pos == 0 || total_neg == 0 {
            return Err(Error::DegenerateSample(
                "tree was trained on a single class".into(),
            ));
        }
        Ok(num as f64 / (2 * total_pos * total_neg) as f64)
    }
}

fn class_split(labels: &[Label], cell: &[usize]) -> (usize, usize) {
    let pos = cell.iter().filter(|&&i| labels[i].is_positive()).count();
    (pos, cell.len() - pos)
}

/// Per-cell feature source used by the growers.
trait CellFeatures {
    /// Filter metadata and one feature vector per cell member, or `None`
    /// when this cell offers nothing to split on.
    fn features_for(
        &mut self,
        cell: &[usize],
    ) -> Result<Option<(Option<FilterIndexSet>, Vec<FeatureVector>)>>;
}

struct FixedFeatures<'a> {
    features: &'a [FeatureVector],
    filter: Option<FilterIndexSet>,
}

impl CellFeatures for FixedFeatures<'_> {
    fn features_for(
        &mut self,
        cell: &[usize],
    ) -> Result<Option<(Option<FilterIndexSet>, Vec<FeatureVector>)>> {
        let feats = cell.iter().map(|&i| self.features[i].clone()).collect();
        Ok(Some((self.filter.clone(), feats)))
    }
}

struct LocalSelection<'a> {
    data: &'a LabeledCurveSet,
    params: &'a FunctionalParams,
}

impl CellFeatures for LocalSelection<'_> {
    fn features_for(
        &mut self,
        cell: &[usize],
    ) -> Result<Option<(Option<FilterIndexSet>, Vec<FeatureVector>)>> {
        let sets: Vec<&CoefficientSet> = cell.iter().map(|&i| &self.data.coeffs[i]).collect();
        let selected = match self.params.selection {
            SelectionMode::TopVariance => top_variance_index_set(
                &sets,
                self.params.n_coeffs,
                self.data.j0,
                self.params.jmax,
            )?,
            SelectionMode::Threshold => {
                threshold_index_set(&sets, &self.params.threshold, self.data.j0, self.params.jmax)?
            }
            SelectionMode::Linear => {
                return Err(Error::InvalidParameter(
                    "linear selection does not depend on the cell; grow with a fixed filter"
                        .into(),
                ))
            }
        };
        if selected.is_empty() {
            return Ok(None);
        }
        // canonical presentation order for the classifier
        let mut filter = selected.sorted_lex();
        filter.family = Some(self.data.family);
        let feats = cell
            .iter()
            .map(|&i| apply_filter(&self.data.coeffs[i], &filter))
            .collect::<Result<Vec<_>>>()?;
        Ok(Some((Some(filter), feats)))
    }
}

fn grow_node(
    labels: &[Label],
    cell: Vec<usize>,
    depth_left: usize,
    provider: &mut dyn CellFeatures,
    params: &GrowParams,
) -> Result<RankNode> {
    let (pos, neg) = class_split(labels, &cell);
    let leaf = |pos, neg| RankNode::Leaf {
        rank: 0,
        train_pos: pos,
        train_neg: neg,
    };
    if depth_left == 0 || cell.len() < params.min_split || pos == 0 || neg == 0 {
        return Ok(leaf(pos, neg));
    }
    let Some((filter, feats)) = provider.features_for(&cell)? else {
        return Ok(leaf(pos, neg));
    };
    if feats.iter().any(|f| f.is_empty()) {
        return Ok(leaf(pos, neg));
    }
    let omega = pos as f64 / cell.len() as f64;
    let samples: Vec<WeightedSample> = feats
        .iter()
        .zip(cell.iter())
        .map(|(f, &i)| WeightedSample::new(f.clone(), labels[i]))
        .collect();
    let classifier = leafrank::train(
        &samples,
        omega,
        params.leaf.max_leaves,
        params.leaf.min_node,
    )?;

    let mut left_cell = Vec::new();
    let mut right_cell = Vec::new();
    for (f, &i) in feats.iter().zip(cell.iter()) {
        if classifier.predict(f)?.is_positive() {
            left_cell.push(i);
        } else {
            right_cell.push(i);
        }
    }
    // a split that moves nothing is no split; demote to a leaf
    if left_cell.is_empty() || right_cell.is_empty() {
        return Ok(leaf(pos, neg));
    }
    Ok(RankNode::Inner {
        filter,
        classifier,
        omega,
        left: Box::new(grow_node(labels, left_cell, depth_left - 1, provider, params)?),
        right: Box::new(grow_node(
            labels,
            right_cell,
            depth_left - 1,
            provider,
            params,
        )?),
    })
}

fn check_root(labels: &[Label]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::DegenerateSample(
            "root cell must contain both classes".into(),
        ));
    }
    Ok(())
}

/// TreeRank over fixed feature vectors.
pub fn grow_standard(samples: &[WeightedSample], params: &GrowParams) -> Result<RankingTree> {
    let labels: Vec<Label> = samples.iter().map(|s| s.label).collect();
    check_root(&labels)?;
    let features: Vec<FeatureVector> = samples.iter().map(|s| s.features.clone()).collect();
    let mut provider = FixedFeatures {
        features: &features,
        filter: None,
    };
    let mut tree = RankingTree {
        family: None,
        j0: 0,
        root: grow_node(
            &labels,
            (0..samples.len()).collect(),
            params.depth,
            &mut provider,
            params,
        )?,
    };
    tree.finalize_ranks();
    Ok(tree)
}

/// Functional TreeRank: every node re-selects its coefficient subset from
/// the curves lying in that cell before training its classifier.
pub fn grow_functional(data: &LabeledCurveSet, params: &FunctionalParams) -> Result<RankingTree> {
    check_root(data.labels())?;
    if params.jmax > data.jmax() {
        return Err(Error::InvalidScale(format!(
            "selection level {} exceeds analysis level {}",
            params.jmax,
            data.jmax()
        )));
    }
    let mut provider = LocalSelection { data, params };
    let mut tree = RankingTree {
        family: Some(data.family()),
        j0: data.j0(),
        root: grow_node(
            data.labels(),
            (0..data.len()).collect(),
            params.grow.depth,
            &mut provider,
            &params.grow,
        )?,
    };
    tree.finalize_ranks();
    Ok(tree)
}

/// TreeRank over curves with one fixed filter applied at every node
/// (globally filtered variant). The filter is canonicalized to lexicographic
/// order, so this tree is node-for-node comparable with the functional one.
pub fn grow_filtered(
    data: &LabeledCurveSet,
    filter: &FilterIndexSet,
    params: &GrowParams,
) -> Result<RankingTree> {
    check_root(data.labels())?;
    let mut fixed = filter.sorted_lex();
    fixed.family = Some(data.family());
    let features = data
        .coeffs()
        .iter()
        .map(|cs| apply_filter(cs, &fixed))
        .collect::<Result<Vec<_>>>()?;
    let mut provider = FixedFeatures {
        features: &features,
        filter: Some(fixed),
    };
    let mut tree = RankingTree {
        family: Some(data.family()),
        j0: data.j0(),
        root: grow_node(
            data.labels(),
            (0..data.len()).collect(),
            params.depth,
            &mut provider,
            params,
        )?,
    };
    tree.finalize_ranks();
    Ok(tree)
}

/// Scores one curve with a functional (or filtered) tree: one transform,
/// then each node reads its own indices.
pub fn score_curve(tree: &RankingTree, curve: &Curve) -> Result<f64> {
    let family = tree.family.ok_or_else(|| {
        Error::IndexMismatch("tree was grown on feature vectors; score features instead".into())
    })?;
    let coeffs = dwt_forward(curve, family, tree.j0)?;
    let mut node = &tree.root;
    loop {
        match node {
            RankNode::Leaf { rank, .. } => return Ok(*rank as f64),
            RankNode::Inner {
                filter,
                classifier,
                left,
                right,
                ..
            } => {
                let filter = filter.as_ref().ok_or_else(|| {
                    Error::IndexMismatch("inner node lacks a filter for curve input".into())
                })?;
                let fv = apply_filter(&coeffs, filter)?;
                node = if classifier.predict(&fv)?.is_positive() {
                    left
                } else {
                    right
                };
            }
        }
    }
}

/// Scores one feature vector with a tree grown on fixed features.
pub fn score_features(tree: &RankingTree, features: &FeatureVector) -> Result<f64> {
    let mut node = &tree.root;
    loop {
        match node {
            RankNode::Leaf { rank, .. } => return Ok(*rank as f64),
            RankNode::Inner {
                filter,
                classifier,
                left,
                right,
                ..
            } => {
                if filter.is_some() {
                    return Err(Error::IndexMismatch(
                        "tree reads wavelet coefficients; score curves instead".into(),
                    ));
                }
                node = if classifier.predict(features)?.is_positive() {
                    left
                } else {
                    right
                };
            }
        }
    }
}

/// Scores every curve of a set.
pub fn score_curves(tree: &RankingTree, curves: &[Curve]) -> Result<Vec<f64>> {
    curves.iter().map(|c| score_curve(tree, c)).collect()
}

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

/// Validation scheme for pruning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneMethod {
    /// Stratified V-fold cross-validation.
    VFold(usize),
    /// Single stratified split; the value is the training fraction.
    Holdout(f64),
}

/// One candidate of the pruning ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PruneCandidate {
    pub leaves: usize,
    pub cv_auc: f64,
}

/// Pruned tree with the evaluated candidate ladder.
#[derive(Debug, Clone)]
pub struct PruneResult {
    pub tree: RankingTree,
    pub candidates: Vec<PruneCandidate>,
    pub selected_leaves: usize,
}

/// Merges the collapsible inner node (both children leaves) whose removal
/// costs the least training AUC; ties collapse the deepest, leftmost node.
/// Returns false when the tree is a single leaf.
fn merge_weakest(node: &mut RankNode) -> bool {
    // locate best candidate by (auc_loss, Reverse(depth), position)
    struct Best {
        loss: f64,
        depth: usize,
        position: usize,
    }
    fn scan(node: &RankNode, depth: usize, position: usize, best: &mut Option<(Best, usize)>, counter: &mut usize) {
        if let RankNode::Inner { left, right, .. } = node {
            if let (
                RankNode::Leaf {
                    train_pos: a,
                    train_neg: c,
                    ..
                },
                RankNode::Leaf {
                    train_pos: b,
                    train_neg: d,
                    ..
                },
            ) = (left.as_ref(), right.as_ref())
            {
                let id = *counter;
                // concordance lost by merging: (1/2)(ad - bc), unnormalized
                let loss = 0.5 * ((*a * *d) as f64 - (*b * *c) as f64);
                let better = match best {
                    None => true,
                    Some((cur, _)) => {
                        loss < cur.loss
                            || (loss == cur.loss && depth > cur.depth)
                            || (loss == cur.loss && depth == cur.depth && position < cur.position)
                    }
                };
                if better {
                    *best = Some((
                        Best {
                            loss,
                            depth,
                            position,
                        },
                        id,
                    ));
                }
            }
            *counter += 1;
            scan(left, depth + 1, position * 2, best, counter);
            scan(right, depth + 1, position * 2 + 1, best, counter);
        }
    }
    fn apply(node: &mut RankNode, target: usize, counter: &mut usize) -> bool {
        if let RankNode::Inner { left, right, .. } = node {
            let here = *counter;
            *counter += 1;
            if here == target {
                if let (
                    RankNode::Leaf {
                        train_pos: a,
                        train_neg: c,
                        ..
                    },
                    RankNode::Leaf {
                        train_pos: b,
                        train_neg: d,
                        ..
                    },
                ) = (left.as_ref(), right.as_ref())
                {
                    *node = RankNode::Leaf {
                        rank: 0,
                        train_pos: a + b,
                        train_neg: c + d,
                    };
                    return true;
                }
                return false;
            }
            let (l, r) = match node {
                RankNode::Inner { left, right, .. } => (left, right),
                _ => unreachable!(),
            };
            if apply(l, target, counter) {
                return true;
            }
            return apply(r, target, counter);
        }
        false
    }

    let mut best = None;
    let mut counter = 0usize;
    scan(node, 0, 0, &mut best, &mut counter);
    let Some((_, id)) = best else { return false };
    let mut counter = 0usize;
    apply(node, id, &mut counter)
}

/// Prunes a copy of the tree down to at most `target` leaves.
fn pruned_to(tree: &RankingTree, target: usize) -> RankingTree {
    let mut out = tree.clone();
    while out.num_leaves() > target {
        if !merge_weakest(&mut out.root) {
            break;
        }
    }
    out.finalize_ranks();
    out
}

/// Deterministic stratified fold assignment: each class dealt round-robin
/// in data order.
pub(crate) fn stratified_folds(labels: &[Label], v: usize) -> Vec<usize> {
    let mut next = [0usize; 2];
    labels
        .iter()
        .map(|l| {
            let c = usize::from(l.is_positive());
            let fold = next[c] % v;
            next[c] += 1;
            fold
        })
        .collect()
}

fn prune_generic(
    tree: &RankingTree,
    labels: &[Label],
    method: PruneMethod,
    regrow: &dyn Fn(&[usize]) -> Result<RankingTree>,
    score_one: &dyn Fn(&RankingTree, usize) -> Result<f64>,
) -> Result<PruneResult> {
    let n = labels.len();
    let splits: Vec<(Vec<usize>, Vec<usize>)> = match method {
        PruneMethod::VFold(v) => {
            if v < 2 || n < 2 * v {
                return Err(Error::DegenerateSample(format!(
                    "{n} samples cannot support {v}-fold pruning"
                )));
            }
            let assignment = stratified_folds(labels, v);
            (0..v)
                .map(|fold| {
                    let train = (0..n).filter(|&i| assignment[i] != fold).collect();
                    let val = (0..n).filter(|&i| assignment[i] == fold).collect();
                    (train, val)
                })
                .collect()
        }
        PruneMethod::Holdout(frac) => {
            if !(0.0 < frac && frac < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "holdout training fraction must lie in (0,1), got {frac}"
                )));
            }
            // stratified: the first ceil(frac * class size) of each class
            let mut taken = [0usize; 2];
            let quota = |class: usize| -> usize {
                let size = labels
                    .iter()
                    .filter(|l| usize::from(l.is_positive()) == class)
                    .count();
                ((size as f64) * frac).ceil() as usize
            };
            let quotas = [quota(0), quota(1)];
            let mut train = Vec::new();
            let mut val = Vec::new();
            for (i, l) in labels.iter().enumerate() {
                let c = usize::from(l.is_positive());
                if taken[c] < quotas[c] {
                    train.push(i);
                    taken[c] += 1;
                } else {
                    val.push(i);
                }
            }
            vec![(train, val)]
        }
    };

    // candidate ladder: leaf counts of the full tree's merge sequence
    let full_leaves = tree.num_leaves();
    let candidate_sizes: Vec<usize> = (1..=full_leaves).rev().collect();

    let mut sums = vec![0.0f64; candidate_sizes.len()];
    let mut used_splits = 0usize;
    for (train_idx, val_idx) in &splits {
        let fold_tree = match regrow(train_idx) {
            Ok(t) => t,
            Err(Error::DegenerateSample(_)) => continue,
            Err(e) => return Err(e),
        };
        let val_labels: Vec<Label> = val_idx.iter().map(|&i| labels[i]).collect();
        let pos = val_labels.iter().filter(|l| l.is_positive()).count();
        if pos == 0 || pos == val_labels.len() {
            continue;
        }
        used_splits += 1;
        for (c, &size) in candidate_sizes.iter().enumerate() {
            let pruned = pruned_to(&fold_tree, size);
            let scored: Vec<ScoredSample> = val_idx
                .iter()
                .map(|&i| Ok(ScoredSample::new(score_one(&pruned, i)?, labels[i])))
                .collect::<Result<Vec<_>>>()?;
            sums[c] += empirical_auc(&scored)?;
        }
    }
    if used_splits == 0 {
        return Err(Error::DegenerateSample(
            "no validation split contained both classes".into(),
        ));
    }

    let candidates: Vec<PruneCandidate> = candidate_sizes
        .iter()
        .zip(&sums)
        .map(|(&leaves, &s)| PruneCandidate {
            leaves,
            cv_auc: s / used_splits as f64,
        })
        .collect();

    // argmax CV-AUC; candidates run from largest to smallest leaf count, so
    // taking strict improvements scanning toward smaller trees picks the
    // smallest tree among exact ties
    let mut best = 0usize;
    for (c, cand) in candidates.iter().enumerate() {
        if cand.cv_auc >= candidates[best].cv_auc {
            best = c;
        }
    }
    let selected_leaves = candidates[best].leaves;
    Ok(PruneResult {
        tree: pruned_to(tree, selected_leaves),
        candidates,
        selected_leaves,
    })
}

/// Prunes a functional tree by cross-validated AUC over fold-regrown trees.
pub fn prune_functional(
    tree: &RankingTree,
    data: &LabeledCurveSet,
    params: &FunctionalParams,
    method: PruneMethod,
) -> Result<PruneResult> {
    prune_generic(
        tree,
        data.labels(),
        method,
        &|idx| grow_functional(&data.subset(idx), params),
        &|t, i| score_curve(t, &data.curves()[i]),
    )
}

/// Prunes a filtered (fixed-filter) tree.
pub fn prune_filtered(
    tree: &RankingTree,
    data: &LabeledCurveSet,
    filter: &FilterIndexSet,
    params: &GrowParams,
    method: PruneMethod,
) -> Result<PruneResult> {
    prune_generic(
        tree,
        data.labels(),
        method,
        &|idx| grow_filtered(&data.subset(idx), filter, params),
        &|t, i| score_curve(t, &data.curves()[i]),
    )
}

/// Prunes a tree grown on fixed feature vectors.
pub fn prune_standard(
    tree: &RankingTree,
    samples: &[WeightedSample],
    params: &GrowParams,
    method: PruneMethod,
) -> Result<PruneResult> {
    let labels: Vec<Label> = samples.iter().map(|s| s.label).collect();
    prune_generic(
        tree,
        &labels,
        method,
        &|idx| {
            let sub: Vec<WeightedSample> = idx.iter().map(|&i| samples[i].clone()).collect();
            grow_standard(&sub, params)
        },
        &|t, i| score_features(t, &samples[i].features),
    )
}

// ---------------------------------------------------------------------------
// Serialization: flat node array with (d, k) heap addressing
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NodeKindDoc {
    Leaf {
        rank: usize,
        train_pos: usize,
        train_neg: usize,
    },
    Inner {
        omega: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        filter: Option<FilterIndexSet>,
        classifier: CostSensitiveTree,
    },
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    d: usize,
    k: usize,
    #[serde(flatten)]
    kind: NodeKindDoc,
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<WaveletFamily>,
    j0: usize,
    nodes: Vec<NodeDoc>,
}

fn flatten_nodes(node: &RankNode, d: usize, k: usize, out: &mut Vec<NodeDoc>) {
    match node {
        RankNode::Leaf {
            rank,
            train_pos,
            train_neg,
        } => out.push(NodeDoc {
            d,
            k,
            kind: NodeKindDoc::Leaf {
                rank: *rank,
                train_pos: *train_pos,
                train_neg: *train_neg,
            },
        }),
        RankNode::Inner {
            filter,
            classifier,
            omega,
            left,
            right,
        } => {
            out.push(NodeDoc {
                d,
                k,
                kind: NodeKindDoc::Inner {
                    omega: *omega,
                    filter: filter.clone(),
                    classifier: classifier.clone(),
                },
            });
            flatten_nodes(left, d + 1, 2 * k, out);
            flatten_nodes(right, d + 1, 2 * k + 1, out);
        }
    }
}

impl Serialize for RankingTree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut nodes = Vec::new();
        flatten_nodes(&self.root, 0, 0, &mut nodes);
        nodes.sort_by_key(|n| (n.d, n.k));
        TreeDoc {
            family: self.family,
            j0: self.j0,
            nodes,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RankingTree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = TreeDoc::deserialize(deserializer)?;
        use std::collections::HashMap;
        let mut by_addr: HashMap<(usize, usize), NodeDoc> = HashMap::new();
        for node in doc.nodes {
            if by_addr.insert((node.d, node.k), node).is_some() {
                return Err(D::Error::custom("duplicate node address"));
            }
        }
        fn build<E: serde::de::Error>(
            by_addr: &mut std::collections::HashMap<(usize, usize), NodeDoc>,
            d: usize,
            k: usize,
        ) -> std::result::Result<RankNode, E> {
            let doc = by_addr
                .remove(&(d, k))
                .ok_or_else(|| E::custom(format!("missing node ({d}, {k})")))?;
            Ok(match doc.kind {
                NodeKindDoc::Leaf {
                    rank,
                    train_pos,
                    train_neg,
                } => RankNode::Leaf {
                    rank,
                    train_pos,
                    train_neg,
                },
                NodeKindDoc::Inner {
                    omega,
                    filter,
                    classifier,
                } => RankNode::Inner {
                    filter,
                    classifier,
                    omega,
                    left: Box::new(build(by_addr, d + 1, 2 * k)?),
                    right: Box::new(build(by_addr, d + 1, 2 * k + 1)?),
                },
            })
        }
        let root = build::<D::Error>(&mut by_addr, 0, 0)?;
        if !by_addr.is_empty() {
            return Err(D::Error::custom("unreachable nodes in tree document"));
        }
        Ok(RankingTree {
            family: doc.family,
            j0: doc.j0,
            root,
        })
    }
}
