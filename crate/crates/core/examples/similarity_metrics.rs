//! RBF class-similarity matrices and the separation ratio for two synthetic
//! feature clouds: tight classes and heavily overlapping ones.

use myotrain::metrics::{class_similarity, median_heuristic, separation, PairSet};
use myotrain::Gesture;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn cloud(spread: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<Gesture>) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, spread).unwrap();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, g) in Gesture::ALL.iter().enumerate() {
        for _ in 0..10 {
            let mut v = vec![0.0; 4];
            v[k % 4] = 1.0 + (k / 4) as f64;
            x.push(v.iter().map(|c| c + noise.sample(&mut rng)).collect());
            y.push(*g);
        }
    }
    (x, y)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spread in [0.05, 1.5] {
        let (x, y) = cloud(spread, 3);
        let gamma = median_heuristic(&x, PairSet::Distinct)?;
        let d = class_similarity(&x, &y, gamma)?;
        println!(
            "spread {spread}: gamma {gamma:.4}, d_sep {:.3}",
            separation(&d)?
        );
        print!("{}", d.to_csv());
    }
    Ok(())
}
