// Generate a leaf with a known lesion, segment it and compare with the truth.
//
// ```bash
// cargo run --example segment_synthetic_leaf
// ```

use leafscan::synthetic::{generate, SyntheticLeafSpec};
use leafscan::{analyze, PipelineConfig};

pub fn run_example() -> leafscan::Result<()> {
    let spec = SyntheticLeafSpec {
        noise: 6,
        seed: 3,
        ..Default::default()
    };
    let leaf = generate(&spec)?;
    let result = analyze(&leaf.image, &PipelineConfig::default())?;

    println!("background threshold  {}", result.otsu_background_threshold);
    println!("leaf pixels           {}", result.leaf_mask.count_ones());
    println!("faulty pixels         {}", result.faulty_mask.count_ones());
    println!("refinement            {} passes, {:?}", result.refine_iterations, result.refine_stop);
    println!("fault ratio           {:.4} (truth {:.4})", result.fault_ratio, leaf.true_fault_ratio());

    assert!(result.faulty_mask.is_subset_of(&leaf.disk_mask)?);
    assert!((result.fault_ratio - leaf.true_fault_ratio()).abs() <= 0.02);
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}
