// dev probe: dissect what a filtered tree learns on the synthetic mixture
use curverank::filtering::linear_index_set;
use curverank::metrics::{empirical_auc, ScoredSample};
use curverank::synth::{build_spec, optimal_auc, sample, AtomProcess, SpecParams};
use curverank::treerank::{grow_filtered, score_curve, GrowParams, LabeledCurveSet, LeafParams, RankNode};
use curverank::Label;

fn walk(node: &RankNode, depth: usize) {
    match node {
        RankNode::Leaf { rank, train_pos, train_neg } => {
            println!("{:indent$}leaf rank {rank}: +{train_pos} -{train_neg}", "", indent = depth * 2);
        }
        RankNode::Inner { classifier, omega, left, right, .. } => {
            println!("{:indent$}inner omega {omega:.3} (classifier leaves {})", "", classifier.num_leaves(), indent = depth * 2);
            walk(left, depth + 1);
            walk(right, depth + 1);
        }
    }
}

fn main() {
    let params = SpecParams {
        components: 50,
        target_auc: 0.94,
        signal_length: 2048,
        j0: 1,
        process: AtomProcess { atoms_per_scale: 2.0, amplitude_std: 1.0, amplitude_decay: 1.5, amplitude_spread: 0.0, loudness_spread: 0.0, equalize_energy: false, template_correlation: 1.0, scale_coupling: 1.0 },
        ..Default::default()
    };
    let spec = build_spec(&params, 7).unwrap();
    println!("AUC* {:.4}", optimal_auc(&spec));
    let train = sample(&spec, 600, 99).unwrap();
    let test = sample(&spec, 600, 101).unwrap();
    let data = LabeledCurveSet::analyze(
        train.iter().map(|d| d.curve.clone()).collect(),
        train.iter().map(|d| d.label).collect(),
        spec.family, 1).unwrap();
    let full_linear = linear_index_set(11, 1).unwrap();
    let filter = curverank::filtering::FilterIndexSet {
        indices: full_linear.indices.into_iter().take(20).collect(),
        ..full_linear
    };
    let grow = GrowParams { depth: 4, min_split: 20, leaf: LeafParams::default() };
    let tree = grow_filtered(&data, &filter, &grow).unwrap();
    println!("tree depth {} leaves {}", tree.depth(), tree.num_leaves());
    walk(&tree.root, 0);
    let scored: Vec<ScoredSample> = test.iter()
        .map(|d| ScoredSample::new(score_curve(&tree, &d.curve).unwrap(), d.label))
        .collect();
    println!("test AUC {:.4}", empirical_auc(&scored).unwrap());
    // how do test scores correlate with component rank?
    let mut per_comp: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for d in &test {
        let s = score_curve(&tree, &d.curve).unwrap();
        let e = per_comp.entry(d.component).or_insert((0.0, 0));
        e.0 += s; e.1 += 1;
    }
    print!("mean score by comp rank: ");
    for (c, (sum, n)) in per_comp.iter().take(25) {
        print!("{}:{:.1} ", c, sum / *n as f64);
    }
    println!();
}
