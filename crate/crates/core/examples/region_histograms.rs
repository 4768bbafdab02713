// Gray-level histograms of the whole leaf and of its faulty and normal parts.
//
// The leaf histogram is the bin-wise sum of the other two.
//
// ```bash
// cargo run --example region_histograms
// ```

use leafscan::pipeline::emit_region_histograms;
use leafscan::synthetic::{generate, SyntheticLeafSpec};
use leafscan::{analyze, PipelineConfig};

pub fn run_example() -> leafscan::Result<()> {
    let leaf = generate(&SyntheticLeafSpec {
        size: 128,
        lesion_fraction: 0.2,
        ..Default::default()
    })?;
    let result = analyze(&leaf.image, &PipelineConfig::default())?;
    let h = emit_region_histograms(&result.equalized, &result)?;

    assert_eq!(h.sample, &h.faulty + &h.normal);
    for (name, hist) in [("sample", &h.sample), ("faulty", &h.faulty), ("normal", &h.normal)] {
        let levels: Vec<String> = (0..=255u8)
            .filter(|&l| hist.get(l) > 0)
            .map(|l| format!("{l}:{}", hist.get(l)))
            .collect();
        println!("{name:<7} total {:>6}  levels {}", hist.total(), levels.join(" "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}
