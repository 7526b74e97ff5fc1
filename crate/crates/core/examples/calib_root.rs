// dev probe: root split anatomy
use curverank::filtering::{apply_filter, top_variance_index_set, CoeffIndex};
use curverank::synth::{build_spec, sample, AtomProcess, SpecParams};
use curverank::treerank::LabeledCurveSet;
use curverank::leafrank::{train as lr_train, WeightedSample};
use std::collections::{BTreeMap, HashMap};

fn main() {
    let params = SpecParams {
        components: 50, target_auc: 0.94, signal_length: 2048, j0: 1,
        process: AtomProcess { atoms_per_scale: 2.0, amplitude_std: 1.0, amplitude_decay: 1.5, amplitude_spread: 0.0, loudness_spread: 0.0, equalize_energy: false, template_correlation: 1.0, scale_coupling: 1.0 },
        ..Default::default()
    };
    let spec = build_spec(&params, 7).unwrap();
    let mut owner: HashMap<CoeffIndex, usize> = HashMap::new();
    for (kk, atoms) in spec.atoms.iter().enumerate() {
        for a in atoms { owner.insert(a.index, kk); }
    }
    let train = sample(&spec, 600, 99).unwrap();
    let data = LabeledCurveSet::analyze(
        train.iter().map(|d| d.curve.clone()).collect(),
        train.iter().map(|d| d.label).collect(),
        spec.family, 1).unwrap();
    let filter = top_variance_index_set(data.coeffs(), 20, 1, 10).unwrap().sorted_lex();
    println!("selected (lex order):");
    for (i, ix) in filter.indices.iter().enumerate() {
        println!("  f{} = ({},{}) comp {:?}", i, ix.level(), ix.pos(), owner.get(ix));
    }
    let samples: Vec<WeightedSample> = (0..600)
        .map(|i| WeightedSample::new(apply_filter(&data.coeffs()[i], &filter).unwrap(), train[i].label))
        .collect();
    let pos = train.iter().filter(|d| d.label.is_positive()).count();
    let omega = pos as f64 / 600.0;
    let clf = lr_train(&samples, omega, 8, 5).unwrap();
    println!("root classifier: {}", serde_json::to_string_pretty(&clf).unwrap());
    // routing table: comp -> (left, right)
    let mut route: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let e = route.entry(train[i].component).or_default();
        if clf.predict(&s.features).unwrap().is_positive() { e.0 += 1 } else { e.1 += 1 }
    }
    println!("comp routing (left,right): {:?}", route);
}
