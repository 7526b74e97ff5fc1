// dev probe: per-node behavior of the functional learner on the mixture
use curverank::filtering::{top_variance_index_set, CoeffIndex};
use curverank::metrics::{empirical_auc, ScoredSample};
use curverank::synth::{build_spec, optimal_auc, sample, AtomProcess, SpecParams};
use curverank::treerank::*;
use curverank::Label;
use std::collections::{BTreeMap, HashMap};

fn main() {
    let loud: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.5);
    let params = SpecParams {
        components: 50,
        target_auc: 0.94,
        signal_length: 2048,
        j0: 1,
        process: AtomProcess { atoms_per_scale: 2.0, amplitude_std: 1.0, amplitude_decay: 0.0, amplitude_spread: 0.0, loudness_spread: 0.0, concentration_bands: 5, equalize_energy: true, template_correlation: 1.0, scale_coupling: 0.0 },
        ..Default::default()
    };
    let spec = build_spec(&params, 7).unwrap();
    let mut owner: HashMap<CoeffIndex, usize> = HashMap::new();
    for (kk, atoms) in spec.atoms.iter().enumerate() {
        for a in atoms { owner.insert(a.index, kk); }
    }
    let train = sample(&spec, 2000, 99).unwrap();
    let test = sample(&spec, 600, 101).unwrap();
    let data = LabeledCurveSet::analyze(
        train.iter().map(|d| d.curve.clone()).collect(),
        train.iter().map(|d| d.label).collect(),
        spec.family, 1).unwrap();
    let fp = FunctionalParams {
        n_coeffs: 20,
        selection: curverank::filtering::SelectionMode::TopVariance,
        threshold: Default::default(),
        jmax: 10,
        grow: GrowParams { depth: 4, min_split: 20, leaf: LeafParams::default() },
    };
    let tree = grow_functional(&data, &fp).unwrap();
    println!("AUC* {:.4}, train AUC {:.4}, leaves {}", optimal_auc(&spec), tree.training_auc().unwrap(), tree.num_leaves());

    // walk the tree, reproducing cells to report selections
    fn walk(
        node: &RankNode, cell: Vec<usize>, depth: usize,
        train: &[curverank::synth::OracleSample],
        data: &LabeledCurveSet,
        owner: &HashMap<CoeffIndex, usize>,
    ) {
        match node {
            RankNode::Leaf { rank, train_pos, train_neg } => {
                let mut comps: BTreeMap<usize, usize> = BTreeMap::new();
                for &i in &cell { *comps.entry(train[i].component).or_default() += 1; }
                let top: Vec<String> = comps.iter().take(6).map(|(c, n)| format!("{c}x{n}")).collect();
                println!("{:indent$}leaf r{rank} +{train_pos}-{train_neg} comps[{}] {}", "", comps.len(), top.join(","), indent = depth*2);
            }
            RankNode::Inner { filter, classifier, omega, left, right } => {
                let f = filter.as_ref().unwrap();
                let mut sel_comps: BTreeMap<usize, usize> = BTreeMap::new();
                for ix in &f.indices {
                    if let Some(c) = owner.get(ix) { *sel_comps.entry(*c).or_default() += 1; }
                }
                let sel: Vec<String> = sel_comps.iter().map(|(c, n)| format!("{c}x{n}")).collect();
                println!("{:indent$}node |cell|={} w={omega:.2} sel_comps[{}]: {}", "", cell.len(), sel_comps.len(), sel.join(","), indent = depth*2);
                let mut lc = Vec::new(); let mut rc = Vec::new();
                for &i in &cell {
                    let fv = curverank::filtering::apply_filter(&data.coeffs()[i], f).unwrap();
                    if classifier.predict(&fv).unwrap().is_positive() { lc.push(i); } else { rc.push(i); }
                }
                walk(left, lc, depth+1, train, data, owner);
                walk(right, rc, depth+1, train, data, owner);
            }
        }
    }
    walk(&tree.root, (0..2000).collect(), 0, &train, &data, &owner);

    let scored: Vec<ScoredSample> = test.iter()
        .map(|d| ScoredSample::new(score_curve(&tree, &d.curve).unwrap(), d.label))
        .collect();
    println!("functional test AUC {:.4}", empirical_auc(&scored).unwrap());

    // filtered learner on the same data
    let gfilter = top_variance_index_set(data.coeffs(), 20, 1, 10).unwrap();
    let ftree = grow_filtered(&data, &gfilter, &fp.grow).unwrap();
    let fscored: Vec<ScoredSample> = test.iter()
        .map(|d| ScoredSample::new(score_curve(&ftree, &d.curve).unwrap(), d.label))
        .collect();
    println!("filtered   test AUC {:.4} (train {:.4})", empirical_auc(&fscored).unwrap(), ftree.training_auc().unwrap());
    let mut per_comp: std::collections::BTreeMap<usize, (f64, usize)> = Default::default();
    for d in &test {
        let s = score_curve(&ftree, &d.curve).unwrap();
        let e = per_comp.entry(d.component).or_insert((0.0, 0));
        e.0 += s; e.1 += 1;
    }
    print!("filtered mean score by comp: ");
    for (c, (sum, n)) in per_comp.iter() {
        print!("{}:{:.1} ", c, sum / *n as f64);
    }
    println!();
    // raw selected-feature values for curves of unrelated components
    let lexf = gfilter.sorted_lex();
    for want in [10usize, 30, 45] {
        if let Some(d) = test.iter().find(|d| d.component == want) {
            let cs = curverank::wavelet::dwt_forward(&d.curve, spec.family, spec.j0).unwrap();
            let fv = curverank::filtering::apply_filter(&cs, &lexf).unwrap();
            let vals: Vec<String> = fv.values.iter().take(8).map(|v| format!("{v:.3e}")).collect();
            println!("comp {want} features: {}", vals.join(" "));
        }
    }

    // reference: global filter ownership
    let gf = top_variance_index_set(data.coeffs(), 20, 1, 10).unwrap();
    let mut gcomps: BTreeMap<usize, usize> = BTreeMap::new();
    for ix in &gf.indices { if let Some(c) = owner.get(ix) { *gcomps.entry(*c).or_default() += 1; } }
    println!("global selection comps[{}]: {:?}", gcomps.len(), gcomps);
}
// appended probe: raw feature values of curves from unrelated components
