// dev probe: FP monotonicity across omega for candidate datasets
use curverank::leafrank::{train, WeightedSample};
use curverank::Label;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    for seed in 0..20u64 {
        for (name, n, max_leaves, min_node) in [("sig8", 200usize, 8usize, 5usize), ("sig2", 200, 2, 1), ("step8", 120, 8, 5)] {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<WeightedSample> = (0..n).map(|_| {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let p = match name {
                    "step8" => if x > 0.0 { 0.8 } else { 0.2 },
                    _ => 1.0 / (1.0 + (-4.0 * x).exp()),
                };
                let label = if rng.gen_bool(p) { Label::Pos } else { Label::Neg };
                WeightedSample::from_values(vec![x], label)
            }).collect();
            let mut fps = vec![];
            for w in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9] {
                let tree = train(&samples, w, max_leaves, min_node).unwrap();
                let fp = samples.iter().filter(|s| !s.label.is_positive() && tree.predict(&s.features).unwrap().is_positive()).count();
                fps.push(fp);
            }
            let mono = fps.windows(2).all(|w| w[1] <= w[0]);
            if !mono { println!("seed {seed} {name}: {:?} NOT MONOTONE", fps); }
            else if seed < 3 { println!("seed {seed} {name}: {:?} ok", fps); }
        }
    }
}
