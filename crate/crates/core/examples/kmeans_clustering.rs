// k-means++ seeding and Lloyd iteration on three color blobs.
//
// ```bash
// cargo run --example kmeans_clustering
// ```

use leafscan::clustering::{lloyd, Dataset, LloydParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> leafscan::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let blobs = [[0.1, 0.5, 0.1], [0.6, 0.4, 0.2], [0.9, 0.9, 0.9]];
    let mut points = Vec::new();
    for center in blobs {
        for _ in 0..50 {
            points.push(center.map(|c: f64| c + rng.gen_range(-0.05..0.05)));
        }
    }
    let data = Dataset::from_points(&points)?;

    let model = lloyd(&data, 3, &mut rng, LloydParams::default())?;
    println!("stopped after {} iterations: {:?}", model.iterations, model.stop_reason);
    for (center, size) in model.centers.iter().zip(model.cluster_sizes()) {
        println!("  [{:.3}, {:.3}, {:.3}] x {size}", center[0], center[1], center[2]);
    }
    println!("objective history: {:?}", model.objective_history);
    assert!(model.objective_history.windows(2).all(|w| w[1] <= w[0]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}
