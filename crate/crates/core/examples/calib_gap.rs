// dev probe: who owns the globally selected coefficients, and what do the
// calibrated mixture weights look like
use curverank::filtering::{top_variance_index_set, CoeffIndex};
use curverank::synth::{build_spec, optimal_auc, sample, AtomProcess, SpecParams};
use curverank::treerank::LabeledCurveSet;
use curverank::Label;
use std::collections::HashMap;

fn main() {
    let decay: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let params = SpecParams {
        components: 50,
        target_auc: 0.94,
        signal_length: 2048,
        j0: 1,
        process: AtomProcess { atoms_per_scale: 2.0, amplitude_std: 1.0, amplitude_decay: 1.5, amplitude_spread: 0.0, loudness_spread: 0.0, equalize_energy: false, template_correlation: 1.0, scale_coupling: 1.0 },
        ..Default::default()
    };
    let spec = build_spec(&params, 7).unwrap();
    println!("optimal AUC: {:.4}", optimal_auc(&spec));
    let wp = &spec.omega_plus;
    let wm = &spec.omega_minus;
    print!("omega+ top10: ");
    for k in 0..10 { print!("{:.3} ", wp[k]); }
    println!();
    print!("omega- top10: ");
    for k in 0..10 { print!("{:.3} ", wm[k]); }
    println!();
    let cum: f64 = wp[..5].iter().sum();
    println!("omega+ mass in top 5 components: {:.3}", cum);

    // atom ownership map
    let mut owner: HashMap<CoeffIndex, usize> = HashMap::new();
    for (k, atoms) in spec.atoms.iter().enumerate() {
        for a in atoms { owner.insert(a.index, k); }
    }
    let atoms_per: Vec<usize> = spec.atoms.iter().map(|a| a.len()).collect();
    println!("atoms per component: min {} max {} total {}",
        atoms_per.iter().min().unwrap(), atoms_per.iter().max().unwrap(), atoms_per.iter().sum::<usize>());

    let draws = sample(&spec, 600, 99).unwrap();
    let curves: Vec<_> = draws.iter().map(|d| d.curve.clone()).collect();
    let labels: Vec<Label> = draws.iter().map(|d| d.label).collect();
    let data = LabeledCurveSet::analyze(curves, labels, spec.family, spec.j0).unwrap();
    let filter = top_variance_index_set(data.coeffs(), 20, 1, 10).unwrap();
    println!("global top-20 by variance:");
    for ix in &filter.indices {
        match owner.get(ix) {
            Some(k) => println!("  ({}, {:4})  comp {:2}  (w+ {:.3}, w- {:.3})", ix.level(), ix.pos(), k, wp[*k], wm[*k]),
            None => println!("  ({}, {:4})  NOT AN ATOM", ix.level(), ix.pos()),
        }
    }
}
