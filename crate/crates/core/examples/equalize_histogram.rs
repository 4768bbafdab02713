// Histogram equalization of a low-contrast gray ramp.
//
// ```bash
// cargo run --example equalize_histogram
// ```

use leafscan::histogram::{compute_histogram, equalization_lut, equalize};
use leafscan::GrayImage;

pub fn run_example() -> leafscan::Result<()> {
    let tiny = GrayImage::from_pixels(2, 2, vec![0, 64, 128, 255])?;
    assert_eq!(equalize(&tiny).pixels(), &[0, 85, 170, 255]);

    // Levels squeezed into 100..=131.
    let dull = GrayImage::from_pixels(16, 8, (0..128u32).map(|i| 100 + (i / 4) as u8).collect())?;
    let hist = compute_histogram(&dull, None)?;
    let lut = equalization_lut(&hist).expect("more than one level");
    let eq = equalize(&dull);

    let range = |img: &GrayImage| {
        let p = img.pixels();
        (*p.iter().min().unwrap(), *p.iter().max().unwrap())
    };
    println!("before: {:?}  after: {:?}", range(&dull), range(&eq));
    for level in [100u8, 108, 116, 124, 131] {
        println!("  {level:>3} -> {:>3}", lut[level as usize]);
    }
    assert_eq!(range(&eq), (0, 255));
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}
