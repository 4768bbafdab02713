// Otsu's threshold on a bimodal histogram, and binarization with it.
//
// ```bash
// cargo run --example otsu_threshold
// ```

use leafscan::threshold::class_statistics;
use leafscan::{binarize, otsu_threshold, GrayImage, Histogram};

pub fn run_example() -> leafscan::Result<()> {
    let mut counts = [0u64; 256];
    counts[10] = 8;
    counts[12] = 8;
    counts[200] = 4;
    let hist = Histogram::from_counts(counts);
    let otsu = otsu_threshold(&hist)?;
    println!(
        "t = {}  sigma_b^2 = {:.2}  means = ({:.2}, {:.2})",
        otsu.threshold, otsu.between_class_variance, otsu.class_means.0, otsu.class_means.1
    );
    assert_eq!(otsu.threshold, 12);

    let stats = class_statistics(&hist, otsu.threshold).expect("non-empty");
    println!("within {:.2} + between {:.2} = {:.2}", stats.within, stats.between, stats.within + stats.between);

    let image = GrayImage::from_pixels(5, 1, vec![10, 12, 13, 200, 90])?;
    let mask = binarize(&image, otsu.threshold);
    println!("foreground: {:?}", mask.bits());
    assert_eq!(mask.count_ones(), 3);
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}
